//! Exact unitary evolution under the chain Hamiltonian.
//!
//! Two backends share one sparse representation of `H`:
//!
//! * **sector eigendecomposition**: `H` is block diagonal in the excitation
//!   number, each block is diagonalised once and cached;
//! * **Chebyshev propagation**: `exp(-iHt)` expanded in Chebyshev
//!   polynomials of each occupied sector's block, with Bessel-function
//!   coefficients. Used when the largest sector is too big to diagonalise.
//!
//! Both only ever move amplitude between basis states of equal Hamming
//! weight, so sector weights are preserved exactly.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::state::StateVector;
use crate::chain::{single_excitation_matrix, ChainSpec};
use crate::error::{invalid, Error, Result};

/// Largest sector dimension the `Auto` backend will diagonalise.
pub const SECTOR_EIGEN_LIMIT: usize = 256;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Sparse many-body Hamiltonian in basis-index order.
#[derive(Debug, Clone)]
pub struct ChainHamiltonian {
    n_sites: usize,
    diagonal: Vec<f64>,
    /// `(mask of the two index bits, J)` per bond.
    bonds: Vec<(u64, f64)>,
    /// Smallest and largest many-body eigenvalue.
    bounds: (f64, f64),
    /// Single-particle energies, ascending.
    modes: Vec<f64>,
    offset: f64,
}

impl ChainHamiltonian {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n_sites;
        if n > super::state::MAX_STATE_QUBITS {
            return Err(Error::ResourceLimit(format!("{n} sites is too many for a state vector")));
        }
        let offset = -0.5 * spec.fields.iter().sum::<f64>();
        let site_bits: Vec<u64> = (1..=n).map(|s| 1u64 << (n - s)).collect();
        let diagonal = (0..1u64 << n)
            .map(|b| {
                offset
                    + spec
                        .fields
                        .iter()
                        .zip(&site_bits)
                        .filter(|(_, &bit)| b & bit != 0)
                        .map(|(f, _)| f)
                        .sum::<f64>()
            })
            .collect();
        let bonds = spec
            .couplings
            .iter()
            .enumerate()
            .map(|(k, &j)| (site_bits[k] | site_bits[k + 1], j))
            .collect();
        // Many-body energies are sums of occupied single-particle energies.
        let eig = single_excitation_matrix(spec).eigen();
        let low: f64 = eig.values.iter().filter(|&&v| v < 0.0).sum();
        let high: f64 = eig.values.iter().filter(|&&v| v > 0.0).sum();
        let modes = eig.values.iter().copied().collect();
        Ok(ChainHamiltonian { n_sites: n, diagonal, bonds, bounds: (low + offset, high + offset), modes, offset })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn spectral_bounds(&self) -> (f64, f64) {
        self.bounds
    }

    /// Spectral bounds of the block with `k` excitations.
    pub fn sector_bounds(&self, k: usize) -> (f64, f64) {
        let n = self.modes.len();
        let low: f64 = self.modes[..k].iter().sum();
        let high: f64 = self.modes[n - k..].iter().sum();
        (low + self.offset, high + self.offset)
    }

    /// Largest |eigenvalue|.
    pub fn norm(&self) -> f64 {
        self.bounds.0.abs().max(self.bounds.1.abs())
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Non-zero off-diagonal entries of row `b` as `(column, value)`.
    pub fn hops(&self, b: u64) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.bonds.iter().filter_map(move |&(mask, j)| {
            let pair = b & mask;
            (pair != 0 && pair != mask).then_some((b ^ mask, j))
        })
    }

    /// `out = H v`.
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        for (o, (&d, &x)) in out.iter_mut().zip(self.diagonal.iter().zip(v)) {
            *o = x * d;
        }
        for &(mask, j) in &self.bonds {
            for (b, o) in out.iter_mut().enumerate() {
                let pair = b as u64 & mask;
                if pair != 0 && pair != mask {
                    *o += v[b ^ mask as usize] * j;
                }
            }
        }
    }

    /// Dense real matrix; only sensible for small chains.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            m[(b, b)] = self.diagonal[b];
            for (c, j) in self.hops(b as u64) {
                m[(c as usize, b)] += j;
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionMethod {
    /// Sector eigendecomposition when every sector has dimension at most
    /// [`SECTOR_EIGEN_LIMIT`], Chebyshev otherwise.
    Auto,
    SectorEigen,
    Chebyshev,
}

#[derive(Debug)]
struct Sector {
    indices: Vec<usize>,
    values: DVector<f64>,
    vectors: DMatrix<f64>,
}

/// One excitation block of `H` in compressed-row form.
#[derive(Debug)]
struct SparseSector {
    indices: Vec<usize>,
    diagonal: Vec<f64>,
    row_start: Vec<usize>,
    columns: Vec<u32>,
    values: Vec<f64>,
    bounds: (f64, f64),
}

impl SparseSector {
    fn new(h: &ChainHamiltonian, k: usize) -> Self {
        let indices: Vec<usize> = (0..h.dim()).filter(|b| b.count_ones() as usize == k).collect();
        let mut row_start = Vec::with_capacity(indices.len() + 1);
        let mut columns = Vec::new();
        let mut values = Vec::new();
        row_start.push(0);
        for &b in &indices {
            for (c, j) in h.hops(b as u64) {
                let p = indices.binary_search(&(c as usize)).expect("hop leaves the sector");
                columns.push(p as u32);
                values.push(j);
            }
            row_start.push(columns.len());
        }
        let diagonal = indices.iter().map(|&b| h.diagonal[b]).collect();
        SparseSector { indices, diagonal, row_start, columns, values, bounds: h.sector_bounds(k) }
    }

    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = v[r] * self.diagonal[r];
            for e in self.row_start[r]..self.row_start[r + 1] {
                acc += v[self.columns[e] as usize] * self.values[e];
            }
            *o = acc;
        }
    }
}

/// Evolution operator for one chain. The sector eigendecomposition is
/// computed on first use and shared between threads afterwards.
#[derive(Debug)]
pub struct Evolver {
    spec: ChainSpec,
    hamiltonian: ChainHamiltonian,
    method: EvolutionMethod,
    sectors: Vec<OnceLock<Sector>>,
    sparse: Vec<OnceLock<SparseSector>>,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

impl Evolver {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        Self::with_method(spec, EvolutionMethod::Auto)
    }

    pub fn with_method(spec: &ChainSpec, method: EvolutionMethod) -> Result<Self> {
        let hamiltonian = ChainHamiltonian::new(spec)?;
        let n = spec.n_sites;
        let method = match method {
            EvolutionMethod::Auto if binomial(n, n / 2) <= SECTOR_EIGEN_LIMIT => EvolutionMethod::SectorEigen,
            EvolutionMethod::Auto => EvolutionMethod::Chebyshev,
            m => m,
        };
        let sectors = (0..=n).map(|_| OnceLock::new()).collect();
        let sparse = (0..=n).map(|_| OnceLock::new()).collect();
        Ok(Evolver { spec: spec.clone(), hamiltonian, method, sectors, sparse })
    }

    /// Shared evolver from a process-wide cache keyed by the exact spec.
    pub fn shared(spec: &ChainSpec) -> Result<Arc<Evolver>> {
        static CACHE: OnceLock<Mutex<HashMap<Vec<u64>, Arc<Evolver>>>> = OnceLock::new();
        const CAPACITY: usize = 16;
        let key: Vec<u64> = spec.couplings.iter().chain(&spec.fields).map(|v| v.to_bits()).collect();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(e) = cache.lock().expect("evolver cache poisoned").get(&key) {
            return Ok(e.clone());
        }
        let evolver = Arc::new(Evolver::new(spec)?);
        let mut guard = cache.lock().expect("evolver cache poisoned");
        if guard.len() >= CAPACITY {
            guard.clear();
        }
        Ok(guard.entry(key).or_insert(evolver).clone())
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn hamiltonian(&self) -> &ChainHamiltonian {
        &self.hamiltonian
    }

    pub fn method(&self) -> EvolutionMethod {
        self.method
    }

    /// `exp(-iHt)|state>` to 2-norm accuracy `tol`.
    pub fn evolve(&self, state: &StateVector, t: f64, tol: f64) -> Result<StateVector> {
        if state.n_sites() != self.spec.n_sites {
            return Err(invalid(format!(
                "state on {} qubits, chain has {} sites",
                state.n_sites(),
                self.spec.n_sites
            )));
        }
        if !t.is_finite() {
            return Err(invalid("evolution time must be finite"));
        }
        if !(tol > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        if t == 0.0 {
            return Ok(state.clone());
        }
        let amps = match self.method {
            EvolutionMethod::SectorEigen => self.evolve_sectors(state.amplitudes(), t),
            _ => self.evolve_chebyshev(state.amplitudes(), t, tol),
        };
        StateVector::new(state.n_sites(), amps)
    }

    fn sector(&self, k: usize) -> &Sector {
        self.sectors[k].get_or_init(|| {
            let h = &self.hamiltonian;
            let indices: Vec<usize> = (0..h.dim()).filter(|b| b.count_ones() as usize == k).collect();
            let d = indices.len();
            let mut block = DMatrix::zeros(d, d);
            for (p, &b) in indices.iter().enumerate() {
                block[(p, p)] = h.diagonal[b];
                for (c, j) in h.hops(b as u64) {
                    let q = indices.binary_search(&(c as usize)).expect("hop leaves the sector");
                    block[(q, p)] += j;
                }
            }
            let (values, vectors) = crate::linalg::symmetric_eigen(&block);
            Sector { indices, values, vectors }
        })
    }

    fn evolve_sectors(&self, amps: &[Complex64], t: f64) -> Vec<Complex64> {
        let mut out = vec![ZERO; amps.len()];
        for k in occupied_sectors(amps, self.spec.n_sites) {
            let sector = self.sector(k);
            let d = sector.indices.len();
            let re = DVector::from_iterator(d, sector.indices.iter().map(|&b| amps[b].re));
            let im = DVector::from_iterator(d, sector.indices.iter().map(|&b| amps[b].im));
            let cr = sector.vectors.tr_mul(&re);
            let ci = sector.vectors.tr_mul(&im);
            let mut rr = DVector::zeros(d);
            let mut ri = DVector::zeros(d);
            for k in 0..d {
                let z = Complex64::new(cr[k], ci[k]) * Complex64::from_polar(1.0, -sector.values[k] * t);
                rr[k] = z.re;
                ri[k] = z.im;
            }
            let br = &sector.vectors * rr;
            let bi = &sector.vectors * ri;
            for (p, &b) in sector.indices.iter().enumerate() {
                out[b] = Complex64::new(br[p], bi[p]);
            }
        }
        out
    }

    fn evolve_chebyshev(&self, amps: &[Complex64], t: f64, tol: f64) -> Vec<Complex64> {
        let mut out = vec![ZERO; amps.len()];
        for k in occupied_sectors(amps, self.spec.n_sites) {
            let sector = self.sparse[k].get_or_init(|| SparseSector::new(&self.hamiltonian, k));
            let local: Vec<Complex64> = sector.indices.iter().map(|&b| amps[b]).collect();
            let evolved = chebyshev_propagate(&local, t, tol, sector.bounds, |x, y| sector.apply(x, y));
            for (&b, a) in sector.indices.iter().zip(evolved) {
                out[b] = a;
            }
        }
        out
    }

    /// Dense `exp(-iHt)` built column by column.
    pub fn unitary(&self, t: f64, tol: f64) -> Result<DMatrix<Complex64>> {
        let n = self.spec.n_sites;
        let dim = self.hamiltonian.dim();
        let mut u = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let col = self.evolve(&StateVector::basis(n, b)?, t, tol)?;
            for (r, a) in col.amplitudes().iter().enumerate() {
                u[(r, b)] = *a;
            }
        }
        Ok(u)
    }
}

/// Excitation numbers carrying nonzero amplitude.
fn occupied_sectors(amps: &[Complex64], n_sites: usize) -> Vec<usize> {
    let mut occupied = vec![false; n_sites + 1];
    for (b, a) in amps.iter().enumerate() {
        if *a != ZERO {
            occupied[b.count_ones() as usize] = true;
        }
    }
    (0..=n_sites).filter(|&k| occupied[k]).collect()
}

/// `exp(-iHt) v` for `H` given by `apply` with spectrum inside `bounds`.
fn chebyshev_propagate(
    v: &[Complex64],
    t: f64,
    tol: f64,
    bounds: (f64, f64),
    apply: impl Fn(&[Complex64], &mut [Complex64]),
) -> Vec<Complex64> {
    const MAX_ARGUMENT: f64 = 400.0;
    let (lo, hi) = bounds;
    let center = 0.5 * (hi + lo);
    let half_width = 0.5 * (hi - lo) * (1.0 + 1e-9) + 1e-12;
    let chunks = ((half_width * t.abs()) / MAX_ARGUMENT).ceil().max(1.0) as usize;
    let dt = t / chunks as f64;
    let coefficients = chebyshev_coefficients(half_width * dt, tol / chunks as f64);
    let shift = Complex64::from_polar(1.0, -center * dt);
    let mut current = v.to_vec();
    for _ in 0..chunks {
        current = chebyshev_step(&current, &coefficients, center, half_width, &apply);
        current.iter_mut().for_each(|a| *a *= shift);
    }
    current
}

/// `sum_k c_k T_k(H') v` with `H' = (H - center) / half_width`.
fn chebyshev_step(
    v: &[Complex64],
    coefficients: &[Complex64],
    center: f64,
    half_width: f64,
    apply: &impl Fn(&[Complex64], &mut [Complex64]),
) -> Vec<Complex64> {
    let inv = 1.0 / half_width;
    let rescaled = |x: &[Complex64], out: &mut [Complex64]| {
        apply(x, out);
        for (o, &xi) in out.iter_mut().zip(x) {
            *o = (*o - xi * center) * inv;
        }
    };
    let dim = v.len();
    let mut result: Vec<Complex64> = v.iter().map(|&x| x * coefficients[0]).collect();
    if coefficients.len() == 1 {
        return result;
    }
    let mut prev = v.to_vec();
    let mut cur = vec![ZERO; dim];
    rescaled(&prev, &mut cur);
    for (r, &c) in result.iter_mut().zip(&cur) {
        *r += c * coefficients[1];
    }
    let mut next = vec![ZERO; dim];
    for &coef in &coefficients[2..] {
        rescaled(&cur, &mut next);
        for ((n, &p), r) in next.iter_mut().zip(&prev).zip(result.iter_mut()) {
            *n = *n * 2.0 - p;
            *r += *n * coef;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    result
}

/// Expansion coefficients `(2 - delta_k0) (-i)^k J_k(x)` of `exp(-i x y)`
/// in Chebyshev polynomials `T_k(y)`, truncated once the tail drops below `tol`.
pub(crate) fn chebyshev_coefficients(x: f64, tol: f64) -> Vec<Complex64> {
    let sign: f64 = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    if x < 1e-300 {
        return vec![Complex64::new(1.0, 0.0)];
    }
    let terms = chebyshev_term_count(x, tol.max(1e-300));
    let bessel = bessel_j_sequence(x, terms);
    let mut i_pow = Complex64::new(1.0, 0.0);
    bessel
        .iter()
        .enumerate()
        .map(|(k, &j)| {
            let c = if k == 0 { Complex64::new(j, 0.0) } else { i_pow * (2.0 * j * sign.powi(k as i32)) };
            i_pow *= Complex64::new(0.0, -1.0);
            c
        })
        .collect()
}

/// Smallest `K > x` with `2 sum_{k >= K} |J_k(x)|` safely below `tol`, using
/// `|J_k(x)| <= (x/2)^k / k!`.
fn chebyshev_term_count(x: f64, tol: f64) -> usize {
    let target = (tol * 1e-2).ln();
    let log_half = (0.5 * x).ln();
    let mut log_bound = 0.0;
    let mut k = 0usize;
    loop {
        k += 1;
        log_bound += log_half - (k as f64).ln();
        let ratio = 0.5 * x / (k as f64 + 1.0);
        if k as f64 > x && ratio < 0.5 && log_bound + (2.0f64).ln() < target {
            return k + 1;
        }
    }
}

/// `J_0(x) .. J_{n-1}(x)` by Miller's downward recurrence, normalised with
/// `J_0 + 2 sum J_{2k} = 1`.
pub(crate) fn bessel_j_sequence(x: f64, n: usize) -> Vec<f64> {
    const RESCALE: f64 = 1e250;
    let start = {
        let s = n + 20 + (40.0 * (n as f64 + x)).sqrt() as usize;
        s + s % 2
    };
    let mut values = vec![0.0; n];
    let (mut above, mut current) = (0.0_f64, 1e-300_f64);
    let mut norm = 0.0;
    for k in (0..=start).rev() {
        if k < n {
            values[k] = current;
        }
        if k % 2 == 0 {
            norm += if k == 0 { current } else { 2.0 * current };
        }
        if k == 0 {
            break;
        }
        let below = 2.0 * k as f64 / x * current - above;
        above = current;
        current = below;
        if current.abs() > RESCALE {
            current /= RESCALE;
            above /= RESCALE;
            norm /= RESCALE;
            values.iter_mut().for_each(|v| *v /= RESCALE);
        }
    }
    values.iter_mut().for_each(|v| *v /= norm);
    values
}

/// `exp(-iHt)|state>` using the shared evolver for `spec`.
pub fn evolve(state: &StateVector, spec: &ChainSpec, t: f64, tol: f64) -> Result<StateVector> {
    Evolver::shared(spec)?.evolve(state, t, tol)
}
