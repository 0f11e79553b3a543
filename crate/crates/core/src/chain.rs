//! Nearest-neighbour XX chains: construction, the single-excitation matrix
//! and the perfect-transfer analysis.
//!
//! The many-body Hamiltonian is
//!
//! ```text
//! H = 1/2 sum_n J_n (X_n X_{n+1} + Y_n Y_{n+1}) + sum_n B_n |1><1|_n - 1/2 sum_n B_n
//! ```
//!
//! so that its restriction to the one-excitation subspace is exactly the
//! tridiagonal matrix with `B_n` on the diagonal and `J_n` next to it
//! (the constant shift is dropped).

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default tolerance for classifying a chain as a perfect-transfer chain.
pub const DEFAULT_TRANSFER_TOLERANCE: f64 = 1e-10;

/// Couplings and fields of an `N`-site chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub couplings: Vec<f64>,
    pub fields: Vec<f64>,
}

impl ChainSpec {
    pub fn new(couplings: Vec<f64>, fields: Vec<f64>) -> Result<Self> {
        let spec = ChainSpec { n_sites: fields.len(), couplings, fields };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(invalid(format!("chain needs at least 2 sites, got {}", self.n_sites)));
        }
        if self.couplings.len() + 1 != self.n_sites {
            return Err(invalid(format!(
                "expected {} couplings for {} sites, got {}",
                self.n_sites - 1,
                self.n_sites,
                self.couplings.len()
            )));
        }
        if self.fields.len() != self.n_sites {
            return Err(invalid(format!(
                "expected {} fields, got {}",
                self.n_sites,
                self.fields.len()
            )));
        }
        if self.couplings.iter().chain(&self.fields).any(|v| !v.is_finite()) {
            return Err(invalid("couplings and fields must be finite"));
        }
        Ok(())
    }

    /// Parse the key-value config format (`n_sites`, `couplings`, `fields`).
    /// A missing `fields` key means zero fields.
    pub fn from_config_str(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            n_sites: usize,
            couplings: Vec<f64>,
            #[serde(default)]
            fields: Option<Vec<f64>>,
        }
        let raw: Raw = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let spec = ChainSpec {
            n_sites: raw.n_sites,
            fields: raw.fields.unwrap_or_else(|| vec![0.0; raw.n_sites]),
            couplings: raw.couplings,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_config_string(&self) -> String {
        let list = |v: &[f64]| {
            let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
            format!("[{}]", items.join(", "))
        };
        format!(
            "n_sites = {}\ncouplings = {}\nfields = {}\n",
            self.n_sites,
            list(&self.couplings),
            list(&self.fields)
        )
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: ChainSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Load from a file; `.json` files are read as JSON, anything else as
    /// the key-value format.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_config_str(&text),
        }
    }
}

/// Standard perfect-transfer couplings `J_n = scale * sqrt(n (N - n))`, zero fields.
pub fn pst_couplings(n_sites: usize, scale: f64) -> Result<ChainSpec> {
    if n_sites < 2 {
        return Err(invalid(format!("n_sites must be at least 2, got {n_sites}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(invalid(format!("scale must be positive, got {scale}")));
    }
    let n = n_sites as f64;
    let couplings = (1..n_sites).map(|k| scale * (k as f64 * (n - k as f64)).sqrt()).collect();
    Ok(ChainSpec { n_sites, couplings, fields: vec![0.0; n_sites] })
}

/// The Hamiltonian restricted to one excitation: an `N x N` real symmetric
/// tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleExcitationMatrix {
    entries: DMatrix<f64>,
}

/// Eigendecomposition with ascending eigenvalues; column `k` of `vectors`
/// belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SingleExcitationMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn eigen(&self) -> SpectralDecomposition {
        let (eigenvalues, eigenvectors) = crate::linalg::symmetric_eigen(&self.entries);
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
        let values = DVector::from_iterator(n, order.iter().map(|&k| eigenvalues[k]));
        let vectors = DMatrix::from_fn(n, n, |i, j| eigenvectors[(i, order[j])]);
        SpectralDecomposition { values, vectors }
    }

    /// Largest singular value (= largest |eigenvalue| for a symmetric matrix).
    pub fn spectral_bound(&self) -> f64 {
        self.eigen().values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl SpectralDecomposition {
    /// `<row| exp(-i H1 t) |col>`, zero-based.
    pub fn evolution_element(&self, row: usize, col: usize, t: f64) -> Complex64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &lambda)| {
                self.vectors[(row, k)] * self.vectors[(col, k)] * Complex64::from_polar(1.0, -lambda * t)
            })
            .sum()
    }

    /// `exp(-i H1 t)` as a dense complex matrix.
    pub fn evolution(&self, t: f64) -> DMatrix<Complex64> {
        let n = self.values.len();
        let phases: Vec<Complex64> =
            self.values.iter().map(|&l| Complex64::from_polar(1.0, -l * t)).collect();
        DMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| self.vectors[(i, k)] * self.vectors[(j, k)] * phases[k]).sum()
        })
    }
}

pub fn single_excitation_matrix(spec: &ChainSpec) -> SingleExcitationMatrix {
    let n = spec.n_sites;
    let mut entries = DMatrix::zeros(n, n);
    for (i, &b) in spec.fields.iter().enumerate() {
        entries[(i, i)] = b;
    }
    for (i, &j) in spec.couplings.iter().enumerate() {
        entries[(i, i + 1)] = j;
        entries[(i + 1, i)] = j;
    }
    SingleExcitationMatrix { entries }
}

/// Outcome of the transfer-time search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferReport {
    /// Smallest time reaching the tolerance, or the best time in the search
    /// window when `perfect` is false.
    pub transfer_time: f64,
    /// `<N| exp(-i H1 t0) |1>` normalised to unit modulus.
    pub global_phase: Complex64,
    /// Entry `n - 1` is the unit phase of `<N+1-n| exp(-i H1 t0) |n>`.
    pub mirror_phases: Vec<Complex64>,
    /// `|<N| exp(-i H1 t0) |1>|^2`.
    pub mirror_fidelity: f64,
    /// Largest singular value of H1.
    pub spectral_bound: f64,
    pub perfect: bool,
}

/// Search controls for chains whose spectrum is not equally spaced.
#[derive(Debug, Clone, Copy)]
pub struct TransferSearch {
    /// Upper end of the scanned time window; `None` picks `4 pi N / bandwidth`.
    pub window: Option<f64>,
    pub grid_points: usize,
}

impl Default for TransferSearch {
    fn default() -> Self {
        TransferSearch { window: None, grid_points: 4000 }
    }
}

pub fn analyze_transfer(spec: &ChainSpec, tolerance: f64) -> Result<TransferReport> {
    analyze_transfer_with(spec, tolerance, TransferSearch::default())
}

pub fn analyze_transfer_with(
    spec: &ChainSpec,
    tolerance: f64,
    search: TransferSearch,
) -> Result<TransferReport> {
    spec.validate()?;
    if !(tolerance > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let h1 = single_excitation_matrix(spec);
    let eig = h1.eigen();
    let n = spec.n_sites;
    let amplitude = |t: f64| eig.evolution_element(n - 1, 0, t).norm();
    let spectral_bound = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));

    let mut found = None;
    if let Some(base) = commensurate_gap(eig.values.as_slice()) {
        let t = PI / base;
        if amplitude(t) >= 1.0 - tolerance {
            found = Some(t);
        }
    }

    let (transfer_time, perfect) = match found {
        Some(t) => (t, true),
        None => {
            let bandwidth = eig.values[n - 1] - eig.values[0];
            let window = search
                .window
                .unwrap_or_else(|| 4.0 * PI * n as f64 / bandwidth.max(1e-12));
            scan_for_transfer(&amplitude, window, search.grid_points.max(16), tolerance)
        }
    };

    let element = eig.evolution_element(n - 1, 0, transfer_time);
    let unit = |z: Complex64| if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) };
    let mirror_phases = (0..n)
        .map(|k| unit(eig.evolution_element(n - 1 - k, k, transfer_time)))
        .collect();
    Ok(TransferReport {
        transfer_time,
        global_phase: unit(element),
        mirror_phases,
        mirror_fidelity: element.norm_sqr().min(1.0),
        spectral_bound,
        perfect,
    })
}

/// Common gap `g` such that every eigenvalue difference is an integer
/// multiple of `g` (within 1e-8), if one exists.
fn commensurate_gap(values: &[f64]) -> Option<f64> {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let base = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > 1e-9 * scale)
        .fold(f64::INFINITY, f64::min);
    if !base.is_finite() {
        return None;
    }
    let commensurate = values.iter().all(|&v| {
        let ratio = (v - values[0]) / base;
        (ratio - ratio.round()).abs() <= 1e-8 * ratio.abs().max(1.0)
    });
    commensurate.then_some(base)
}

/// Grid scan followed by golden-section refinement of each local maximum.
/// Returns the first time reaching `1 - tolerance`, else the best one seen.
fn scan_for_transfer(
    amplitude: &dyn Fn(f64) -> f64,
    window: f64,
    grid_points: usize,
    tolerance: f64,
) -> (f64, bool) {
    let dt = window / grid_points as f64;
    let samples: Vec<f64> = (0..=grid_points + 1).map(|i| amplitude(i as f64 * dt)).collect();
    let mut best = (0.0, 0.0);
    for i in 1..=grid_points {
        if samples[i] >= samples[i - 1] && samples[i] >= samples[i + 1] {
            let (t, value) = golden_max(amplitude, (i - 1) as f64 * dt, (i + 1) as f64 * dt);
            if value >= 1.0 - tolerance {
                return (t, true);
            }
            if value > best.1 {
                best = (t, value);
            }
        }
    }
    (best.0, false)
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..100 {
        if hi - lo < 1e-14 * hi.abs().max(1.0) {
            break;
        }
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pst_couplings_small_cases() {
        let c = pst_couplings(2, 1.0).unwrap();
        assert_eq!(c.couplings, vec![1.0]);
        assert_eq!(c.fields, vec![0.0, 0.0]);

        let c = pst_couplings(4, 1.0).unwrap();
        let expected = [3f64.sqrt(), 2.0, 3f64.sqrt()];
        for (a, b) in c.couplings.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }

        let c = pst_couplings(15, 1.0).unwrap();
        assert!((c.couplings[6] - 56f64.sqrt()).abs() < 1e-14);
        assert!((c.couplings[7] - 56f64.sqrt()).abs() < 1e-14);
        for k in 0..14 {
            assert_eq!(c.couplings[k], c.couplings[13 - k]);
        }
    }

    #[test]
    fn pst_couplings_rejects_short_chain() {
        assert!(matches!(pst_couplings(1, 1.0), Err(Error::InvalidArgument(_))));
        assert!(pst_couplings(4, 0.0).is_err());
    }

    #[test]
    fn single_excitation_matrix_examples() {
        let m = single_excitation_matrix(&pst_couplings(2, 1.0).unwrap());
        assert_eq!(m.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));

        let m = single_excitation_matrix(&pst_couplings(3, 1.0).unwrap());
        let r2 = 2f64.sqrt();
        let want = DMatrix::from_row_slice(3, 3, &[0.0, r2, 0.0, r2, 0.0, r2, 0.0, r2, 0.0]);
        assert!((m.matrix() - want).amax() < 1e-15);

        let spec = ChainSpec::new(vec![0.5], vec![1.0, 2.0]).unwrap();
        let m = single_excitation_matrix(&spec);
        assert_eq!(m.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 2.0]));
    }

    #[test]
    fn pst_spectrum_is_equally_spaced() {
        for n in 2..=20 {
            let eig = single_excitation_matrix(&pst_couplings(n, 1.0).unwrap()).eigen();
            for k in 0..n {
                let expected = -(n as f64 - 1.0) + 2.0 * k as f64;
                assert!((eig.values[k] - expected).abs() < 1e-10, "N={n} k={k}");
            }
        }
    }

    #[test]
    fn transfer_time_for_standard_chains() {
        for n in 2..=20 {
            let report = analyze_transfer(&pst_couplings(n, 1.0).unwrap(), 1e-10).unwrap();
            assert!(report.perfect);
            assert!((report.transfer_time - PI / 2.0).abs() < 1e-12);
            assert!(report.mirror_fidelity >= 1.0 - 1e-12);
            assert!((report.spectral_bound - (n as f64 - 1.0)).abs() < 1e-10);
        }
        let report = analyze_transfer(&pst_couplings(8, 2.0).unwrap(), 1e-10).unwrap();
        assert!((report.transfer_time - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn mirror_property_holds_for_every_site() {
        let spec = pst_couplings(9, 1.0).unwrap();
        let report = analyze_transfer(&spec, 1e-10).unwrap();
        let u = single_excitation_matrix(&spec).eigen().evolution(report.transfer_time);
        for col in 0..9 {
            assert!((u[(8 - col, col)].norm() - 1.0).abs() < 1e-10);
        }
        assert!((report.mirror_phases[0] - report.global_phase).norm() < 1e-12);
    }

    #[test]
    fn non_pst_chain_is_flagged() {
        let spec = ChainSpec::new(vec![1.0; 5], vec![0.0; 6]).unwrap();
        let report = analyze_transfer(&spec, 1e-10).unwrap();
        assert!(!report.perfect);
        assert!(report.mirror_fidelity < 1.0 - 1e-6);
        assert!(report.mirror_fidelity > 0.0);
    }

    #[test]
    fn config_round_trip() {
        let spec = ChainSpec::new(vec![0.5, 1.25], vec![0.0, -1.0, 3.0]).unwrap();
        let parsed = ChainSpec::from_config_str(&spec.to_config_string()).unwrap();
        assert_eq!(parsed, spec);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(ChainSpec::from_json_str(&json).unwrap(), spec);
        assert!(ChainSpec::from_config_str("n_sites = 3\ncouplings = [1.0]\n").is_err());
        let no_fields = ChainSpec::from_config_str("n_sites = 2\ncouplings = [1.0]\n").unwrap();
        assert_eq!(no_fields.fields, vec![0.0, 0.0]);
    }
}
