use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chain::ChainSpec;
use crate::error::{invalid, Error, Result};
use crate::hilbert::{Evolver, PauliString};

/// Largest chain accepted by [`brute_force_conjugate`].
pub const BRUTE_FORCE_LIMIT: usize = 6;

/// Dense `exp(-iHt) P exp(iHt)`.
pub fn brute_force_conjugate(p: &PauliString, spec: &ChainSpec, t: f64) -> Result<DMatrix<Complex64>> {
    let n = spec.n_sites;
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::ResourceLimit(format!("brute-force oracle limited to {BRUTE_FORCE_LIMIT} sites, got {n}")));
    }
    if p.n_qubits() != n {
        return Err(invalid("Pauli string and chain sizes differ"));
    }
    let u = Evolver::new(spec)?.unitary(t, 1e-14)?;
    Ok(&u * p.to_dense() * u.adjoint())
}
