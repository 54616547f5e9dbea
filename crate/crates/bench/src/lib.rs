//! Fixtures shared by the benchmarks.

use symtomo::oscillator::ModeFunction;
use symtomo::states::{Axis, CatSpec, Parity};
use symtomo::tomography::{CatTomogram, OpticalSinogram};
use symtomo::{Complex64, OscillatorParams};

pub fn params() -> OscillatorParams {
    OscillatorParams::new(0.5, 1.3).expect("valid parameters")
}

pub fn even_cat(alpha: f64) -> CatTomogram {
    CatTomogram::new(CatSpec::new(Complex64::new(alpha, 0.0), Parity::Even).expect("valid cat"))
}

pub fn phase_space_axis(n: usize) -> Axis {
    Axis::new(-4.0, 4.0, n).expect("valid axis")
}

pub fn cat_sinogram(n_phi: usize, n_x: usize) -> OpticalSinogram {
    let x = Axis::new(-7.0, 7.0, n_x).expect("valid axis");
    OpticalSinogram::from_tomogram(&even_cat(1.5), n_phi, x, None::<&ModeFunction>).expect("sinogram")
}
