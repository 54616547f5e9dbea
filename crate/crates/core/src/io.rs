//! Readers and writers for Wigner grids and optical sinograms.
//!
//! Two encodings are supported:
//! * CSV, with header `q,p,W` (grids) or `phi,x,w` (sinograms), one sample
//!   per row in storage order;
//! * a container made of one JSON header line followed by the raw values as
//!   little-endian `f64`, row-major.
//!
//! Readers detect the encoding from the first byte.

use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::states::{Axis, WignerGrid};
use crate::tomography::OpticalSinogram;

pub const CONTAINER_FORMAT: &str = "symtomo-container";
pub const CONTAINER_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Bin,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "bin" => Ok(Format::Bin),
            other => Err(Error::Format(format!("unknown format {other:?}, expected csv or bin"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Layout {
    WignerGrid { q: Axis, p: Axis },
    OpticalSinogram { n_phi: usize, x: Axis },
}

impl Layout {
    fn len(&self) -> usize {
        match self {
            Layout::WignerGrid { q, p } => q.n * p.n,
            Layout::OpticalSinogram { n_phi, x } => n_phi * x.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    #[serde(flatten)]
    layout: Layout,
    dtype: String,
    byte_order: String,
    order: String,
    len: usize,
}

fn write_container<W: Write>(layout: Layout, values: &[f64], mut out: W) -> Result<()> {
    let header = Header {
        format: CONTAINER_FORMAT.into(),
        version: CONTAINER_VERSION,
        len: layout.len(),
        layout,
        dtype: "f64".into(),
        byte_order: "little-endian".into(),
        order: "row-major".into(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(values.len() * 8);
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

fn read_container<R: BufRead>(mut input: R) -> Result<(Layout, Vec<f64>)> {
    let mut line = Vec::new();
    input.read_until(b'\n', &mut line)?;
    let header: Header = serde_json::from_slice(&line)?;
    if header.format != CONTAINER_FORMAT || header.version != CONTAINER_VERSION {
        return Err(Error::Format(format!(
            "unsupported container {} v{}",
            header.format, header.version
        )));
    }
    if header.dtype != "f64" || header.byte_order != "little-endian" || header.order != "row-major" {
        return Err(Error::Format("container must hold little-endian row-major f64".into()));
    }
    if header.len != header.layout.len() {
        return Err(Error::Format(format!(
            "header length {} does not match axes ({})",
            header.len,
            header.layout.len()
        )));
    }
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() != header.len * 8 {
        return Err(Error::Format(format!(
            "container body has {} bytes, expected {}",
            body.len(),
            header.len * 8
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok((header.layout, values))
}

/// Uniform axis through the distinct values of `coords`, in first-seen order.
fn infer_axis(name: &str, distinct: &[f64]) -> Result<Axis> {
    let n = distinct.len();
    if n < 2 {
        return Err(Error::Format(format!("column {name} needs at least two distinct values")));
    }
    let axis = Axis::new(distinct[0], distinct[n - 1], n)?;
    let tol = 1e-9 * axis.step().abs().max(1e-300);
    for (i, &v) in distinct.iter().enumerate() {
        if (v - axis.at(i)).abs() > tol {
            return Err(Error::Format(format!("column {name} is not a uniform grid at row {i}")));
        }
    }
    Ok(axis)
}

fn read_triples<R: Read>(input: R, header: [&str; 3]) -> Result<Vec<[f64; 3]>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let got: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if got != header {
        return Err(Error::Format(format!("expected CSV header {}, got {}", header.join(","), got.join(","))));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Format(format!("expected 3 columns, got {}", rec.len())));
        }
        let mut row = [0.0; 3];
        for (k, field) in rec.iter().enumerate() {
            row[k] = field
                .parse()
                .map_err(|_| Error::Format(format!("not a number: {field:?}")))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Splits `slow × fast` rows into the distinct slow and fast coordinates,
/// checking the tensor ordering.
fn split_tensor(rows: &[[f64; 3]]) -> Result<(Vec<f64>, Vec<f64>)> {
    let first = rows.first().ok_or_else(|| Error::Format("no data rows".into()))?[0];
    let n_fast = rows.iter().take_while(|r| r[0] == first).count();
    if rows.len() % n_fast != 0 {
        return Err(Error::Format("rows do not form a full tensor grid".into()));
    }
    let fast: Vec<f64> = rows[..n_fast].iter().map(|r| r[1]).collect();
    let slow: Vec<f64> = rows.iter().step_by(n_fast).map(|r| r[0]).collect();
    for (i, r) in rows.iter().enumerate() {
        if r[0] != slow[i / n_fast] || r[1] != fast[i % n_fast] {
            return Err(Error::Format(format!("row {} breaks the tensor ordering", i + 2)));
        }
    }
    Ok((slow, fast))
}

fn sniff<R: Read>(input: R) -> Result<(bool, BufReader<R>)> {
    let mut br = BufReader::new(input);
    let is_container = br.fill_buf()?.first() == Some(&b'{');
    Ok((is_container, br))
}

pub fn write_grid<W: Write>(grid: &WignerGrid, format: Format, out: W) -> Result<()> {
    match format {
        Format::Bin => write_container(
            Layout::WignerGrid { q: grid.q_axis(), p: grid.p_axis() },
            grid.values(),
            out,
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["q", "p", "W"])?;
            let (qa, pa) = (grid.q_axis(), grid.p_axis());
            for i in 0..qa.n {
                for j in 0..pa.n {
                    w.write_record(&[qa.at(i).to_string(), pa.at(j).to_string(), grid.get(i, j).to_string()])?;
                }
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub fn read_grid<R: Read>(input: R) -> Result<WignerGrid> {
    let (is_container, br) = sniff(input)?;
    if is_container {
        match read_container(br)? {
            (Layout::WignerGrid { q, p }, values) => WignerGrid::new(q, p, values),
            _ => Err(Error::Format("container holds a sinogram, not a Wigner grid".into())),
        }
    } else {
        let rows = read_triples(br, ["q", "p", "W"])?;
        let (qs, ps) = split_tensor(&rows)?;
        let grid = WignerGrid::new(
            infer_axis("q", &qs)?,
            infer_axis("p", &ps)?,
            rows.iter().map(|r| r[2]).collect(),
        )?;
        Ok(grid)
    }
}

pub fn write_sinogram<W: Write>(sino: &OpticalSinogram, format: Format, out: W) -> Result<()> {
    match format {
        Format::Bin => write_container(
            Layout::OpticalSinogram { n_phi: sino.n_phi(), x: sino.x_axis() },
            sino.values(),
            out,
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["phi", "x", "w"])?;
            let xa = sino.x_axis();
            for k in 0..sino.n_phi() {
                let phi = sino.phi(k).to_string();
                for (i, v) in sino.column(k).iter().enumerate() {
                    w.write_record(&[phi.clone(), xa.at(i).to_string(), v.to_string()])?;
                }
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub fn read_sinogram<R: Read>(input: R) -> Result<OpticalSinogram> {
    let (is_container, br) = sniff(input)?;
    if is_container {
        match read_container(br)? {
            (Layout::OpticalSinogram { n_phi, x }, values) => OpticalSinogram::new(n_phi, x, values),
            _ => Err(Error::Format("container holds a Wigner grid, not a sinogram".into())),
        }
    } else {
        let rows = read_triples(br, ["phi", "x", "w"])?;
        let (phis, xs) = split_tensor(&rows)?;
        let n_phi = phis.len();
        let sino = OpticalSinogram::new(n_phi, infer_axis("x", &xs)?, rows.iter().map(|r| r[2]).collect())?;
        for (k, &phi) in phis.iter().enumerate() {
            if (phi - sino.phi(k)).abs() > 1e-12 {
                return Err(Error::Format(format!(
                    "angle {k} is {phi}, expected {} (angles must be kπ/{n_phi})",
                    sino.phi(k)
                )));
            }
        }
        Ok(sino)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::GaussianState;
    use crate::tomography::GaussianTomogram;

    fn grid() -> WignerGrid {
        let s = GaussianState::new(0.2, -0.3, 0.7, 0.5, 0.1).unwrap();
        WignerGrid::sample(&s, Axis::new(-3.0, 3.0, 7).unwrap(), Axis::new(-2.0, 2.5, 5).unwrap())
    }

    #[test]
    fn grid_round_trips_exactly() {
        let g = grid();
        for fmt in [Format::Csv, Format::Bin] {
            let mut buf = Vec::new();
            write_grid(&g, fmt, &mut buf).unwrap();
            let back = read_grid(buf.as_slice()).unwrap();
            assert_eq!(back.values(), g.values());
            assert_eq!(back.q_axis().n, 7);
            let mut again = Vec::new();
            write_grid(&back, fmt, &mut again).unwrap();
            assert_eq!(buf, again);
        }
    }

    #[test]
    fn sinogram_round_trips_exactly() {
        let vac = GaussianTomogram::new(GaussianState::vacuum());
        let s = OpticalSinogram::from_tomogram(&vac, 6, Axis::new(-4.0, 4.0, 9).unwrap(), None).unwrap();
        for fmt in [Format::Csv, Format::Bin] {
            let mut buf = Vec::new();
            write_sinogram(&s, fmt, &mut buf).unwrap();
            let back = read_sinogram(buf.as_slice()).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn kind_mismatch_and_truncation_rejected() {
        let mut buf = Vec::new();
        write_grid(&grid(), Format::Bin, &mut buf).unwrap();
        assert!(read_sinogram(buf.as_slice()).is_err());
        buf.truncate(buf.len() - 3);
        assert!(read_grid(buf.as_slice()).is_err());
    }

    #[test]
    fn bad_csv_rejected() {
        assert!(read_grid("a,b,c\n1,2,3\n".as_bytes()).is_err());
        assert!(read_grid("q,p,W\n0,0,1\n0,1,1\n1,0,1\n".as_bytes()).is_err());
        assert!(read_grid("q,p,W\n0,0,1\n0,1,x\n1,0,1\n1,1,1\n".as_bytes()).is_err());
        assert!(read_sinogram("phi,x,w\n0,0,1\n0,1,1\n0.5,0,1\n0.5,1,1\n".as_bytes()).is_err());
        assert!("png".parse::<Format>().is_err());
    }
}
