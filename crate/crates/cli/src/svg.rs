//! Minimal SVG line plots and heatmaps.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
/// Heatmaps are downsampled to at most this many cells per axis.
const MAX_CELLS: usize = 200;

pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

pub struct Heatmap<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// Row-major with `x` as the slow index.
    pub values: &'a [f64],
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }
    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = f.x.0 + t * (f.x.1 - f.x.0);
        let yv = f.y.0 + t * (f.y.1 - f.y.0);
        let (px, py) = (f.px(xv), f.py(yv));
        let _ = writeln!(out, r#"<line x1="{px:.2}" y1="{y1}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, y1 + 5.0);
        let _ = writeln!(out, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y1 + 18.0, fmt_num(xv));
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, py + 4.0, fmt_num(yv));
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let f = Frame {
        x: extent(series.iter().flat_map(|s| s.x.iter().copied())),
        y: extent(series.iter().flat_map(|s| s.y.iter().copied())),
    };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &f, x_label, y_label);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut pts = String::new();
        for (&x, &y) in s.x.iter().zip(s.y) {
            if x.is_finite() && y.is_finite() {
                let _ = write!(pts, "{:.2},{:.2} ", f.px(x), f.py(y));
            }
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.trim_end()
        );
        let ly = TOP + 14.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 10.0;
        let _ = writeln!(out, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 18.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 22.0, ly + 4.0, escape(s.label));
    }
    out.push_str("</svg>\n");
    out
}

/// Diverging blue-white-red map for signed data, white-to-blue otherwise.
fn color(v: f64, lo: f64, hi: f64) -> String {
    let (r, g, b) = if lo < 0.0 {
        let m = lo.abs().max(hi.abs());
        let t = (v / m).clamp(-1.0, 1.0);
        if t >= 0.0 {
            (1.0, 1.0 - t, 1.0 - t)
        } else {
            (1.0 + t, 1.0 + t, 1.0)
        }
    } else {
        let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
        (1.0 - 0.9 * t, 1.0 - 0.7 * t, 1.0 - 0.3 * t)
    };
    format!("#{:02x}{:02x}{:02x}", (r * 255.0).round() as u8, (g * 255.0).round() as u8, (b * 255.0).round() as u8)
}

pub fn heatmap(h: &Heatmap) -> String {
    let (lo, hi) = extent(h.values.iter().copied());
    let f = Frame { x: h.x_range, y: h.y_range };
    let mut out = String::new();
    header(&mut out, h.title);
    let cx = h.nx.min(MAX_CELLS);
    let cy = h.ny.min(MAX_CELLS);
    let cw = (WIDTH - LEFT - RIGHT) / cx as f64;
    let ch = (HEIGHT - TOP - BOTTOM) / cy as f64;
    for i in 0..cx {
        let si = if cx == 1 { 0 } else { i * (h.nx - 1) / (cx - 1) };
        for j in 0..cy {
            let sj = if cy == 1 { 0 } else { j * (h.ny - 1) / (cy - 1) };
            let v = h.values[si * h.ny + sj];
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                LEFT + i as f64 * cw,
                HEIGHT - BOTTOM - (j + 1) as f64 * ch,
                cw + 0.3,
                ch + 0.3,
                color(v, lo, hi)
            );
        }
    }
    axes(&mut out, &f, h.x_label, h.y_label);
    let bx = WIDTH - RIGHT + 20.0;
    let steps = 40;
    let bh = (HEIGHT - TOP - BOTTOM) / steps as f64;
    let (clo, chi) = if lo < 0.0 { (-lo.abs().max(hi.abs()), lo.abs().max(hi.abs())) } else { (lo, hi) };
    for k in 0..steps {
        let v = clo + (k as f64 + 0.5) / steps as f64 * (chi - clo);
        let _ = writeln!(
            out,
            r#"<rect x="{bx}" y="{:.2}" width="16" height="{:.2}" fill="{}"/>"#,
            HEIGHT - BOTTOM - (k + 1) as f64 * bh,
            bh + 0.3,
            color(v, lo, hi)
        );
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, bx + 20.0, TOP + 10.0, fmt_num(chi));
    let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, bx + 20.0, HEIGHT - BOTTOM, fmt_num(clo));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_plot_is_well_formed() {
        let x = [0.0, 1.0, 2.0];
        let s = line_plot("t<1>", "x", "y", &[Series { label: "a&b", x: &x, y: &[1.0, 0.0, f64::NAN] }]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("t&lt;1&gt;") && s.contains("a&amp;b"));
        assert_eq!(s.matches("<polyline").count(), 1);
    }

    #[test]
    fn heatmap_downsamples() {
        let values: Vec<f64> = (0..300 * 3).map(|k| (k as f64).sin()).collect();
        let h = Heatmap {
            title: "w",
            x_label: "q",
            y_label: "p",
            values: &values,
            nx: 300,
            ny: 3,
            x_range: (-1.0, 1.0),
            y_range: (0.0, 1.0),
        };
        let s = heatmap(&h);
        assert_eq!(s.matches("<rect").count(), 1 + 200 * 3 + 1 + 40);
    }

    #[test]
    fn diverging_map_is_white_at_zero() {
        assert_eq!(color(0.0, -1.0, 2.0), "#ffffff");
        assert_eq!(color(2.0, -1.0, 2.0), "#ff0000");
    }
}
