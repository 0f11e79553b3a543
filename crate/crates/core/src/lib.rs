//! Error-corrected state transfer on free-fermion spin chains.

pub mod chain;
pub mod code;
pub mod decoder;
pub mod error;
pub mod freefermion;
pub mod harness;
pub mod hilbert;
mod linalg;
pub mod noise;
pub mod rng;

pub use error::{Error, Result};

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Largest entry modulus of a complex matrix.
pub trait MaxNorm {
    fn max_norm(&self) -> f64;
}

impl MaxNorm for DMatrix<Complex64> {
    fn max_norm(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
