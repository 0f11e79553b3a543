//! Linear evolution of Majorana modes under the quadratic chain Hamiltonian.

use nalgebra::DMatrix;

use super::majorana::{FermionOperator, DEFAULT_TERM_CAP};
use crate::chain::SingleExcitationMatrix;
use crate::error::{invalid, Result};

/// `O(t)` with `e^{-iHt} c_n e^{iHt} = sum_m O_{mn} c_m`.
///
/// Block form `[[cos H1 t, sin H1 t], [-sin H1 t, cos H1 t]]`, built from
/// the eigendecomposition of `H1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModePropagator {
    n_sites: usize,
    time: f64,
    matrix: DMatrix<f64>,
}

impl ModePropagator {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `O_{mn}` for 1-based modes.
    pub fn entry(&self, m: usize, n: usize) -> f64 {
        self.matrix[(m - 1, n - 1)]
    }

    /// `max |O^T O - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let dim = self.matrix.nrows();
        (self.matrix.transpose() * &self.matrix - DMatrix::identity(dim, dim)).amax()
    }

    /// Image of mode `n` as a linear form in the modes.
    pub fn image(&self, n: usize) -> Result<FermionOperator> {
        if n == 0 || n > 2 * self.n_sites {
            return Err(invalid(format!("mode {n} outside 1..={}", 2 * self.n_sites)));
        }
        let column: Vec<f64> = self.matrix.column(n - 1).iter().copied().collect();
        FermionOperator::linear(self.n_sites, &column)
    }

    /// Propagator for the composed time `self.time + other.time`.
    pub fn compose(&self, other: &ModePropagator) -> Result<ModePropagator> {
        if self.n_sites != other.n_sites {
            return Err(invalid("propagators on different chains"));
        }
        Ok(ModePropagator {
            n_sites: self.n_sites,
            time: self.time + other.time,
            matrix: &self.matrix * &other.matrix,
        })
    }
}

pub fn mode_propagator(h1: &SingleExcitationMatrix, t: f64) -> Result<ModePropagator> {
    if !t.is_finite() {
        return Err(invalid("propagation time must be finite"));
    }
    let n = h1.dim();
    let eig = h1.eigen();
    let v = &eig.vectors;
    let cos_d = DMatrix::from_diagonal(&eig.values.map(|l| (l * t).cos()));
    let sin_d = DMatrix::from_diagonal(&eig.values.map(|l| (l * t).sin()));
    let c = v * cos_d * v.transpose();
    let s = v * sin_d * v.transpose();
    let mut matrix = DMatrix::zeros(2 * n, 2 * n);
    matrix.view_mut((0, 0), (n, n)).copy_from(&c);
    matrix.view_mut((0, n), (n, n)).copy_from(&s);
    matrix.view_mut((n, 0), (n, n)).copy_from(&(-&s));
    matrix.view_mut((n, n), (n, n)).copy_from(&c);
    Ok(ModePropagator { n_sites: n, time: t, matrix })
}

/// Heisenberg image `e^{-iHt} op e^{iHt}` with the default term cap.
pub fn propagate(op: &FermionOperator, prop: &ModePropagator) -> Result<FermionOperator> {
    propagate_capped(op, prop, DEFAULT_TERM_CAP)
}

/// Substitute `c_n -> sum_m O_{mn} c_m` in every monomial, expand and
/// normal-order. Fails with a resource-limit error above `cap` terms.
pub fn propagate_capped(op: &FermionOperator, prop: &ModePropagator, cap: usize) -> Result<FermionOperator> {
    let n = op.n_sites();
    if n != prop.n_sites {
        return Err(invalid("operator and propagator act on different chains"));
    }
    let images: Vec<FermionOperator> = (1..=2 * n).map(|m| prop.image(m)).collect::<Result<_>>()?;
    let mut out = FermionOperator::zero(n);
    for term in op.terms() {
        let mut acc = FermionOperator::identity(n).scaled(term.coefficient);
        for &m in &term.modes {
            acc = acc.mul_capped(&images[m - 1], cap)?;
        }
        out = out.plus(&acc)?;
        if out.len() > cap {
            return Err(crate::error::Error::ResourceLimit(format!("operator grew beyond {cap} terms")));
        }
    }
    Ok(out)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::MaxNorm;
    use num_complex::Complex64;
    fn unit(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }
    use crate::chain::{pst_couplings, single_excitation_matrix, ChainSpec};
    use crate::freefermion::pauli_to_fermion;
    use crate::hilbert::{Evolver, PauliString};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn dense_conjugate(p: &PauliString, spec: &ChainSpec, t: f64) -> DMatrix<Complex64> {
        let u = Evolver::new(spec).unwrap().unitary(t, 1e-13).unwrap();
        &u * p.to_dense() * u.adjoint()
    }

    #[test]
    fn identity_at_zero() {
        let h1 = single_excitation_matrix(&pst_couplings(4, 1.0).unwrap());
        let o = mode_propagator(&h1, 0.0).unwrap();
        assert!((o.matrix() - DMatrix::identity(8, 8)).amax() < 1e-15);
    }

    #[test]
    fn two_site_blocks() {
        let h1 = single_excitation_matrix(&pst_couplings(2, 1.0).unwrap());
        let t = 0.37;
        let o = mode_propagator(&h1, t).unwrap();
        let (c, s) = (t.cos(), t.sin());
        let want = DMatrix::from_row_slice(4, 4, &[c, 0.0, 0.0, s, 0.0, c, s, 0.0, 0.0, -s, c, 0.0, -s, 0.0, 0.0, c]);
        assert!((o.matrix() - want).amax() < 1e-14);
    }

    #[test]
    fn transfer_time_gives_signed_mirror() {
        for n in [3usize, 6, 9] {
            let h1 = single_excitation_matrix(&pst_couplings(n, 1.0).unwrap());
            let o = mode_propagator(&h1, FRAC_PI_2).unwrap();
            assert!(o.orthogonality_error() < 1e-12);
            for m in 1..=2 * n {
                for k in 1..=2 * n {
                    // Odd N: H1 has even eigenvalues, so sin(H1 t0) = 0 and the
                    // mirror stays within a block. Even N swaps the blocks.
                    let same_block = (m <= n) == (k <= n);
                    let site = |x: usize| if x <= n { x } else { x - n };
                    let mirrored = same_block == (n % 2 == 1) && site(m) == n + 1 - site(k);
                    let want = if mirrored { 1.0 } else { 0.0 };
                    assert!((o.entry(m, k).abs() - want).abs() < 1e-10, "n={n} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn propagate_trivial_cases() {
        let h1 = single_excitation_matrix(&pst_couplings(3, 1.0).unwrap());
        let o = mode_propagator(&h1, 0.8).unwrap();
        let id = FermionOperator::identity(3);
        assert_eq!(propagate(&id, &o).unwrap(), id);
        let c1 = FermionOperator::monomial(3, unit(1.0), &[1]).unwrap();
        let o0 = mode_propagator(&h1, 0.0).unwrap();
        assert!(propagate(&c1, &o0).unwrap().distance(&c1) < 1e-15);
    }

    #[test]
    fn z2_half_transfer_matches_dense() {
        let spec = pst_couplings(3, 1.0).unwrap();
        let h1 = single_excitation_matrix(&spec);
        let t = FRAC_PI_2 / 2.0;
        let z2: PauliString = "IZI".parse().unwrap();
        let f = propagate(&pauli_to_fermion(&z2).unwrap(), &mode_propagator(&h1, t).unwrap()).unwrap();
        assert!(f.degrees().iter().all(|&d| d == 0 || d == 2));
        assert!((f.to_dense().unwrap() - dense_conjugate(&z2, &spec, t)).max_norm() < 1e-10);
    }

    #[test]
    fn term_cap_is_enforced() {
        let spec = pst_couplings(5, 1.0).unwrap();
        let h1 = single_excitation_matrix(&spec);
        let x5: PauliString = "IIIIX".parse().unwrap();
        let op = pauli_to_fermion(&x5).unwrap();
        let err = propagate_capped(&op, &mode_propagator(&h1, 0.3).unwrap(), 50).unwrap_err();
        assert_eq!(err.kind(), "resource-limit");
    }

    fn random_chain(n: usize, seed: u64) -> ChainSpec {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(seed, 0);
        let j = (0..n - 1).map(|_| rng.gen_range(0.3..1.5)).collect();
        let b = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        ChainSpec::new(j, b).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn oracle_equivalence(n in 2usize..=5, site in 1usize..=4, kind in 0usize..3, t in -2.0f64..2.0, seed in any::<u64>()) {
            let spec = random_chain(n, seed);
            let site = 1 + (site - 1) % (n - 1);
            let label: String = (1..=n).map(|s| match kind {
                0 => if s == site { 'Z' } else { 'I' },
                1 => if s == site || s == site + 1 { 'X' } else { 'I' },
                _ => if s == site || s == site + 1 { 'Y' } else { 'I' },
            }).collect();
            let p: PauliString = label.parse().unwrap();
            let h1 = single_excitation_matrix(&spec);
            let f = propagate(&pauli_to_fermion(&p).unwrap(), &mode_propagator(&h1, t).unwrap()).unwrap();
            prop_assert!((f.to_dense().unwrap() - dense_conjugate(&p, &spec, t)).max_norm() < 1e-10);
        }

        #[test]
        fn homomorphism_and_quadratic_closure(
            n in 2usize..=6, a in 1usize..=12, b in 1usize..=12,
            re in -1.0f64..1.0, im in -1.0f64..1.0, t in -1.5f64..1.5, s in -1.5f64..1.5, seed in any::<u64>(),
        ) {
            let spec = random_chain(n, seed);
            let h1 = single_excitation_matrix(&spec);
            let (a, b) = (1 + (a - 1) % (2 * n), 1 + (b - 1) % (2 * n));
            prop_assume!(a != b);
            let op = FermionOperator::monomial(n, Complex64::new(re, im), &[a, b]).unwrap()
                .plus(&FermionOperator::identity(n).scaled(unit(0.5))).unwrap();
            let os = mode_propagator(&h1, s).unwrap();
            let ot = mode_propagator(&h1, t).unwrap();
            let ots = mode_propagator(&h1, t + s).unwrap();
            let direct = propagate(&op, &ots).unwrap();
            let stepped = propagate(&propagate(&op, &os).unwrap(), &ot).unwrap();
            prop_assert!(direct.distance(&stepped) < 1e-10);
            prop_assert!(direct.degrees().iter().all(|&d| d == 0 || d == 2));
            prop_assert!(ot.compose(&os).unwrap().matrix().relative_eq(ots.matrix(), 1e-10, 1e-10));
        }
    }
}
