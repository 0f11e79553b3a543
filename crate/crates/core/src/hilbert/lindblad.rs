//! Dense density matrices and the dephasing master equation
//! `d rho/dt = -i[H, rho] - N gamma rho + gamma sum_n Z_n rho Z_n`.

use crate::MaxNorm;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::evolve::{ChainHamiltonian, Evolver};
use super::state::StateVector;
use crate::chain::ChainSpec;
use crate::error::{invalid, Error, Result};
use crate::freefermion::jordan_wigner;

/// Largest chain a density matrix is built for.
pub const MAX_DENSITY_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_sites: usize,
    entries: DMatrix<Complex64>,
}

fn guard(n_sites: usize) -> Result<()> {
    if n_sites > MAX_DENSITY_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "density matrices are limited to {MAX_DENSITY_QUBITS} sites, got {n_sites}"
        )));
    }
    Ok(())
}

impl DensityMatrix {
    pub fn new(n_sites: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        guard(n_sites)?;
        let dim = 1usize << n_sites;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(invalid(format!("expected a {dim}x{dim} matrix")));
        }
        Ok(DensityMatrix { n_sites, entries })
    }

    pub fn pure(state: &StateVector) -> Result<Self> {
        guard(state.n_sites())?;
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self::new(state.n_sites(), &v * v.adjoint())
    }

    pub fn maximally_mixed(n_sites: usize) -> Result<Self> {
        guard(n_sites)?;
        let dim = 1usize << n_sites;
        Self::new(n_sites, DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).max_norm()
    }

    /// `Tr(rho A)`.
    pub fn expectation(&self, operator: &DMatrix<Complex64>) -> Complex64 {
        (&self.entries * operator).trace()
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.entries - &other.entries).max_norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().min()
    }
}

/// Right-hand side of the master equation. `H` acts through its sparse
/// hops; the dephasing sum collapses to `-2 gamma d(i, j) rho_ij` with
/// `d` the Hamming distance between basis indices.
fn master_rhs(h: &ChainHamiltonian, gamma: f64, rho: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
    let dim = rho.nrows();
    let diag = h.diagonal();
    let minus_i = Complex64::new(0.0, -1.0);
    for j in 0..dim {
        for i in 0..dim {
            let mut comm = rho[(i, j)] * (diag[i] - diag[j]);
            for (k, v) in h.hops(i as u64) {
                comm += rho[(k as usize, j)] * v;
            }
            for (k, v) in h.hops(j as u64) {
                comm -= rho[(i, k as usize)] * v;
            }
            let hamming = ((i ^ j) as u64).count_ones() as f64;
            out[(i, j)] = minus_i * comm - rho[(i, j)] * (2.0 * gamma * hamming);
        }
    }
}

/// Default step: `(|H| step)^4 <= 1e-12`.
pub fn default_step(spec: &ChainSpec, gamma: f64) -> Result<f64> {
    let h = ChainHamiltonian::new(spec)?;
    let scale = h.norm() + 2.0 * gamma * spec.n_sites as f64;
    Ok(if scale > 0.0 { 1e-3 / scale } else { 1e-3 })
}

/// Integrate the master equation to time `t` with classical fourth-order
/// Runge-Kutta. `step = None` uses [`default_step`].
pub fn lindblad_evolve(
    rho: &DensityMatrix,
    spec: &ChainSpec,
    gamma: f64,
    t: f64,
    step: Option<f64>,
) -> Result<DensityMatrix> {
    Ok(lindblad_trajectory(rho, spec, gamma, &[t], step)?.pop().expect("one time requested"))
}

/// States at each of the ascending `times` (measured from 0).
pub fn lindblad_trajectory(
    rho: &DensityMatrix,
    spec: &ChainSpec,
    gamma: f64,
    times: &[f64],
    step: Option<f64>,
) -> Result<Vec<DensityMatrix>> {
    guard(spec.n_sites)?;
    if rho.n_sites != spec.n_sites {
        return Err(invalid("density matrix and chain sizes differ"));
    }
    if !(gamma >= 0.0) {
        return Err(invalid("gamma must be non-negative"));
    }
    if times.iter().any(|t| !(*t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times must be non-negative and ascending"));
    }
    let h = ChainHamiltonian::new(spec)?;
    let max_step = match step {
        Some(s) if s > 0.0 => s,
        Some(_) => return Err(invalid("step must be positive")),
        None => default_step(spec, gamma)?,
    };
    let dim = rho.entries.nrows();
    let mut state = rho.entries.clone();
    let mut k = [
        DMatrix::zeros(dim, dim),
        DMatrix::zeros(dim, dim),
        DMatrix::zeros(dim, dim),
        DMatrix::zeros(dim, dim),
    ];
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - now;
        let steps = (span / max_step).ceil() as usize;
        if steps > 0 {
            let dt = span / steps as f64;
            let half = Complex64::new(0.5 * dt, 0.0);
            let full = Complex64::new(dt, 0.0);
            let sixth = Complex64::new(dt / 6.0, 0.0);
            for _ in 0..steps {
                master_rhs(&h, gamma, &state, &mut k[0]);
                let probe = &state + &k[0] * half;
                master_rhs(&h, gamma, &probe, &mut k[1]);
                let probe = &state + &k[1] * half;
                master_rhs(&h, gamma, &probe, &mut k[2]);
                let probe = &state + &k[2] * full;
                master_rhs(&h, gamma, &probe, &mut k[3]);
                state += (&k[0] + &k[1] * Complex64::new(2.0, 0.0) + &k[2] * Complex64::new(2.0, 0.0) + &k[3])
                    * sixth;
                // Trace guard.
                let tr = state.trace();
                if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-13 && tr.norm() > 0.0 {
                    state /= tr;
                }
            }
        }
        now = target;
        let herm = (&state + state.adjoint()) * Complex64::new(0.5, 0.0);
        out.push(DensityMatrix { n_sites: rho.n_sites, entries: herm });
    }
    Ok(out)
}

/// Mode carried by `chi(n)`: `c_{N+1-n}` for `n <= N` and `c_{3N+1-n}` for
/// `N < n <= 2N` (the mirror image inside each half).
pub fn chi_mode(n: usize, n_sites: usize) -> Result<usize> {
    match n {
        _ if n == 0 || n > 2 * n_sites => Err(invalid(format!("mode {n} outside 1..={}", 2 * n_sites))),
        _ if n <= n_sites => Ok(n_sites + 1 - n),
        _ => Ok(3 * n_sites + 1 - n),
    }
}

/// `Tr(rho e^{-iHt} c e^{iHt})` for the mode `c` selected by [`chi_mode`].
///
/// `rho` is the state at time `t`; the Majorana operator is carried forward
/// with the noiseless dynamics, so without noise the value is constant.
pub fn chi(rho: &DensityMatrix, spec: &ChainSpec, n: usize, t: f64) -> Result<Complex64> {
    let evolver = Evolver::shared(spec)?;
    chi_with(rho, &evolver, n, t)
}

pub fn chi_with(rho: &DensityMatrix, evolver: &Evolver, n: usize, t: f64) -> Result<Complex64> {
    let n_sites = evolver.spec().n_sites;
    if rho.n_sites != n_sites {
        return Err(invalid("density matrix and chain sizes differ"));
    }
    let mode = jordan_wigner(chi_mode(n, n_sites)?, n_sites)?.to_dense();
    let u = evolver.unitary(t, 1e-14)?;
    let carried = &u * mode * u.adjoint();
    Ok(rho.expectation(&carried))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::pst_couplings;
    use crate::hilbert::evolve::evolve;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn plus_then_zeros(n: usize) -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut qubits = vec![[c(h), c(h)]];
        qubits.extend(std::iter::repeat([c(1.0), c(0.0)]).take(n - 1));
        StateVector::product(&qubits).unwrap()
    }

    #[test]
    fn zero_gamma_is_unitary() {
        let spec = pst_couplings(3, 1.0).unwrap();
        let psi = plus_then_zeros(3);
        let rho = lindblad_evolve(&DensityMatrix::pure(&psi).unwrap(), &spec, 0.0, 0.9, None).unwrap();
        let want = DensityMatrix::pure(&evolve(&psi, &spec, 0.9, 1e-14).unwrap()).unwrap();
        assert!(rho.max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn single_qubit_dephasing() {
        // H = 0 for one site with no field: a 1-site "chain" is not allowed, so
        // use two uncoupled sites and look at the first.
        let spec = ChainSpec::new(vec![0.0], vec![0.0, 0.0]).unwrap();
        let gamma = 0.3;
        let rho0 = DensityMatrix::pure(&plus_then_zeros(2)).unwrap();
        for &t in &[0.5, 2.0] {
            let rho = lindblad_evolve(&rho0, &spec, gamma, t, None).unwrap();
            // |+0><+0| coherence sits at (0, 2).
            assert!((rho.matrix()[(0, 2)].re - 0.5 * (-2.0 * gamma * t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_hermiticity_positivity() {
        let spec = pst_couplings(4, 1.0).unwrap();
        let rho0 = DensityMatrix::pure(&plus_then_zeros(4)).unwrap();
        let rho = lindblad_evolve(&rho0, &spec, 0.2, 1.3, None).unwrap();
        assert!((rho.trace() - c(1.0)).norm() < 1e-8);
        assert!(rho.hermiticity_error() < 1e-10);
        assert!(rho.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn density_guard() {
        assert!(matches!(DensityMatrix::maximally_mixed(9), Err(Error::ResourceLimit(_))));
        let spec = pst_couplings(9, 1.0).unwrap();
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(lindblad_evolve(&rho, &spec, 0.1, 1.0, None).is_err());
    }

    #[test]
    fn chi_examples() {
        let n = 4;
        let spec = pst_couplings(n, 1.0).unwrap();
        let rho = DensityMatrix::pure(&plus_then_zeros(n)).unwrap();
        assert!((chi(&rho, &spec, n, 0.0).unwrap() - c(1.0)).norm() < 1e-14);
        let mixed = DensityMatrix::maximally_mixed(n).unwrap();
        for mode in 1..=2 * n {
            assert!(chi(&mixed, &spec, mode, 0.7).unwrap().norm() < 1e-14);
        }
        assert!(chi(&mixed, &spec, 0, 0.0).is_err());
    }

    #[test]
    fn chi_is_conserved_without_noise() {
        let n = 4;
        let spec = pst_couplings(n, 1.0).unwrap();
        let rho0 = DensityMatrix::pure(&plus_then_zeros(n)).unwrap();
        let x0 = chi(&rho0, &spec, n, 0.0).unwrap();
        let rho = lindblad_evolve(&rho0, &spec, 0.0, 1.1, None).unwrap();
        assert!((chi(&rho, &spec, n, 1.1).unwrap() - x0).norm() < 1e-9);
    }
}
