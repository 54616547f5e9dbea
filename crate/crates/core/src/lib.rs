//! Simulation and tomography of nonclassical states of a trapped ion.
//!
//! The ion is modelled as a parametric oscillator. [`oscillator`] solves its
//! classical mode function, [`states`] builds Gaussian and even/odd cat
//! states with their Wigner functions, [`tomography`] computes symplectic
//! tomograms, evolves them, and inverts them back to Wigner functions, and
//! [`verify`] checks the evolution equation and moment dynamics numerically.
//!
//! ```
//! use symtomo::{solve_epsilon, OscillatorParams, TomogramQuery, Tomogram};
//! use symtomo::tomography::{CatTomogram, EvolvedTomogram};
//! use symtomo::states::{CatSpec, Parity};
//! use symtomo::Complex64;
//!
//! let params = OscillatorParams::new(0.5, 1.3)?;
//! let traj = solve_epsilon(&params, 10.0, 1000, 1e-12)?;
//! let mode = traj.propagate_to(3.0)?;
//!
//! let cat = CatTomogram::new(CatSpec::new(Complex64::new(1.5, 0.0), Parity::Even)?);
//! let evolved = EvolvedTomogram::new(cat, &mode)?;
//! let w = evolved.eval(&TomogramQuery::new(0.3, 1.0, 0.0, 0.0))?;
//! assert!(w.is_finite() && w >= 0.0);
//! # Ok::<(), symtomo::Error>(())
//! ```

pub mod error;
pub mod io;
pub mod oscillator;
pub mod states;
pub mod tomography;
pub mod verify;

pub use error::{Error, Result};
pub use oscillator::{
    omega_squared, solve_epsilon, symplectic_map, EpsilonTrajectory, ModeFunction,
    OscillatorParams, SymplecticMap,
};
pub use states::{
    eval_wavefunction, gaussian_from_epsilon, wigner_cat, wigner_gaussian, Axis, CatSpec,
    GaussianState, MultimodeCatSpec, Parity, WavefunctionKind, Wigner, WignerGrid,
};
pub use num_complex::Complex64;
pub use tomography::{
    evolve_tomogram, invert_to_wigner, optical_slice, project_wigner, radon_reconstruct,
    tomogram_cat, tomogram_gaussian, OpticalSinogram, Tomogram, TomogramQuery,
};
pub use verify::ResidualReport;
