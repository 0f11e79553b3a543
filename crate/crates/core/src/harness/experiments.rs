use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::csvio::{format_float, parse_field, CsvRow};
use crate::chain::{analyze_transfer, pst_couplings, DEFAULT_TRANSFER_TOLERANCE};
use crate::decoder::TransferSetup;
use crate::error::{invalid, Error, Result};
use crate::freefermion::jordan_wigner;
use crate::hilbert::lindblad::MAX_DENSITY_QUBITS;
use crate::hilbert::{lindblad_trajectory, DensityMatrix, Evolver, StateVector};
use crate::noise::{draw_single_z, ErrorScenario};

type Logical = (Complex64, Complex64);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleZRecord {
    pub sample: u64,
    pub site: usize,
    pub time: f64,
    pub success_probability: f64,
}

impl CsvRow for SingleZRecord {
    const HEADER: &'static [&'static str] = &["sample", "site", "time", "success_probability"];
    fn to_record(&self) -> Vec<String> {
        vec![self.sample.to_string(), self.site.to_string(), format_float(self.time), format_float(self.success_probability)]
    }
    fn from_record(r: &csv::StringRecord) -> Result<Self> {
        Ok(SingleZRecord {
            sample: parse_field(r, 0)?,
            site: parse_field(r, 1)?,
            time: parse_field(r, 2)?,
            success_probability: parse_field(r, 3)?,
        })
    }
}

/// Minimum and mean over samples; both `None` when there are no samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleZSummary {
    pub samples: u64,
    pub min_success: Option<f64>,
    pub mean_success: Option<f64>,
    pub records: Vec<SingleZRecord>,
}

impl SingleZSummary {
    pub fn from_records(records: Vec<SingleZRecord>) -> Self {
        let n = records.len();
        let min = records.iter().map(|r| r.success_probability).reduce(f64::min);
        let mean = (n > 0).then(|| records.iter().map(|r| r.success_probability).sum::<f64>() / n as f64);
        SingleZSummary { samples: n as u64, min_success: min, mean_success: mean, records }
    }
}

/// One single-Z sample: site and time drawn uniformly from stream `sample`.
pub fn single_z_sample(setup: &TransferSetup, logical: Logical, seed: u64, sample: u64, prune: f64) -> Result<SingleZRecord> {
    let scenario = draw_single_z(setup.spec.n_sites, setup.total_time(), seed, sample);
    let ErrorScenario::SingleZ { site, time } = scenario else { unreachable!("draw_single_z yields single-Z") };
    let report = setup.run(logical, &scenario, prune)?;
    Ok(SingleZRecord { sample, site, time, success_probability: report.success_probability })
}

pub fn exp_single_z(setup: &TransferSetup, logical: Logical, samples: u64, seed: u64, prune: f64) -> Result<SingleZSummary> {
    let records = (0..samples)
        .into_par_iter()
        .map(|s| single_z_sample(setup, logical, seed, s, prune))
        .collect::<Result<Vec<_>>>()?;
    Ok(SingleZSummary::from_records(records))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingPoint {
    pub delta_t: f64,
    pub delta_t_times_lambda_max: f64,
    pub success_probability: f64,
}

impl CsvRow for TimingPoint {
    const HEADER: &'static [&'static str] = &["delta_t", "delta_t_times_lambda_max", "success_probability"];
    fn to_record(&self) -> Vec<String> {
        [self.delta_t, self.delta_t_times_lambda_max, self.success_probability].map(format_float).to_vec()
    }
    fn from_record(r: &csv::StringRecord) -> Result<Self> {
        Ok(TimingPoint {
            delta_t: parse_field(r, 0)?,
            delta_t_times_lambda_max: parse_field(r, 1)?,
            success_probability: parse_field(r, 2)?,
        })
    }
}

/// `0 ..= 0.1 t0` in 21 points.
pub fn default_timing_grid(transfer_time: f64) -> Vec<f64> {
    (0..21).map(|i| 0.1 * transfer_time * i as f64 / 20.0).collect()
}

pub fn timing_point(setup: &TransferSetup, delta: f64, logical: Logical, prune: f64) -> Result<TimingPoint> {
    let (report, smallness) = setup.run_with_diagnostic(logical, &ErrorScenario::Timing { delta }, prune)?;
    Ok(TimingPoint { delta_t: delta, delta_t_times_lambda_max: smallness, success_probability: report.success_probability })
}

pub fn exp_timing(setup: &TransferSetup, grid: &[f64], logical: Logical, prune: f64) -> Result<Vec<TimingPoint>> {
    grid.par_iter().map(|&d| timing_point(setup, d, logical, prune)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingPoint {
    pub f: f64,
    pub mean_success: f64,
    pub min_success: f64,
    pub zeta_max_mean: f64,
}

impl CsvRow for CouplingPoint {
    const HEADER: &'static [&'static str] = &["f", "mean_success", "min_success", "zeta_max_mean"];
    fn to_record(&self) -> Vec<String> {
        [self.f, self.mean_success, self.min_success, self.zeta_max_mean].map(format_float).to_vec()
    }
    fn from_record(r: &csv::StringRecord) -> Result<Self> {
        Ok(CouplingPoint {
            f: parse_field(r, 0)?,
            mean_success: parse_field(r, 1)?,
            min_success: parse_field(r, 2)?,
            zeta_max_mean: parse_field(r, 3)?,
        })
    }
}

/// `0 ..= 0.1` in 11 points.
pub fn default_coupling_grid() -> Vec<f64> {
    (0..11).map(|i| i as f64 / 100.0).collect()
}

/// Mean and minimum success over `instances` disorder draws at strength `f`.
/// Instance `k` uses stream `k` of `seed` at every `f`, so neighbouring grid
/// points see the same relative perturbation pattern.
pub fn coupling_point(
    setup: &TransferSetup,
    f: f64,
    instances: u64,
    seed: u64,
    logical: Logical,
    prune: f64,
) -> Result<CouplingPoint> {
    if instances == 0 {
        return Err(invalid("need at least one disorder instance"));
    }
    let run = |instance: u64| -> Result<(f64, f64)> {
        let scenario = ErrorScenario::Coupling { fraction: f, seed, instance, field_disorder: false };
        let (report, zeta) = setup.run_with_diagnostic(logical, &scenario, prune)?;
        Ok((report.success_probability, zeta))
    };
    let results: Vec<(f64, f64)> = if f == 0.0 {
        // Every instance is the unperturbed chain.
        vec![run(0)?; instances as usize]
    } else {
        (0..instances).into_par_iter().map(run).collect::<Result<_>>()?
    };
    let n = results.len() as f64;
    Ok(CouplingPoint {
        f,
        mean_success: results.iter().map(|r| r.0).sum::<f64>() / n,
        min_success: results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min),
        zeta_max_mean: results.iter().map(|r| r.1).sum::<f64>() / n,
    })
}

pub fn exp_coupling(
    setup: &TransferSetup,
    grid: &[f64],
    instances: u64,
    seed: u64,
    logical: Logical,
    prune: f64,
) -> Result<Vec<CouplingPoint>> {
    grid.iter().map(|&f| coupling_point(setup, f, instances, seed, logical, prune)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DephasingConfig {
    /// Integration window; `None` means twice the transfer time.
    pub duration: Option<f64>,
    /// Evenly spaced checkpoints including both ends.
    pub time_points: usize,
    /// Runge-Kutta step; `None` uses the integrator default.
    pub step: Option<f64>,
}

impl Default for DephasingConfig {
    fn default() -> Self {
        DephasingConfig { duration: None, time_points: 21, step: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DephasingPoint {
    pub gamma: f64,
    /// `max_t |chi_1(t) - exp(-2 gamma t) chi_1(0)|`.
    pub max_deviation_chi1: f64,
    /// The same maximum taken over every mode.
    pub max_deviation_all: f64,
}

impl CsvRow for DephasingPoint {
    const HEADER: &'static [&'static str] = &["gamma", "max_deviation_chi1", "max_deviation_all"];
    fn to_record(&self) -> Vec<String> {
        [self.gamma, self.max_deviation_chi1, self.max_deviation_all].map(format_float).to_vec()
    }
    fn from_record(r: &csv::StringRecord) -> Result<Self> {
        Ok(DephasingPoint {
            gamma: parse_field(r, 0)?,
            max_deviation_chi1: parse_field(r, 1)?,
            max_deviation_all: parse_field(r, 2)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DephasingReport {
    pub n_sites: usize,
    pub duration: f64,
    pub times: Vec<f64>,
    pub points: Vec<DephasingPoint>,
}

/// Largest chain [`exp_dephasing`] accepts.
const DEPHASING_LIMIT: usize = 6;

/// Integrate the dephasing master equation on the perfect-transfer chain of
/// `n_sites`, starting from `|0..0+>`, and compare every `chi_n(t)` with
/// its closed-form decay.
pub fn exp_dephasing(n_sites: usize, gamma_grid: &[f64], config: &DephasingConfig) -> Result<DephasingReport> {
    if n_sites > DEPHASING_LIMIT.min(MAX_DENSITY_QUBITS) {
        return Err(Error::ResourceLimit(format!("dephasing experiment limited to {DEPHASING_LIMIT} sites")));
    }
    if config.time_points < 2 {
        return Err(invalid("need at least two time points"));
    }
    let spec = pst_couplings(n_sites, 1.0)?;
    let t0 = analyze_transfer(&spec, DEFAULT_TRANSFER_TOLERANCE)?.transfer_time;
    let duration = config.duration.unwrap_or(2.0 * t0);
    if !(duration > 0.0) {
        return Err(invalid("duration must be positive"));
    }
    let last = config.time_points - 1;
    let times: Vec<f64> = (0..=last).map(|i| duration * i as f64 / last as f64).collect();

    // Heisenberg-picture modes under the noiseless dynamics, per checkpoint.
    let evolver = Evolver::new(&spec)?;
    let modes: Vec<_> = (1..=2 * n_sites).map(|m| jordan_wigner(m, n_sites).map(|p| p.to_dense())).collect::<Result<_>>()?;
    let carried: Vec<Vec<_>> = times
        .iter()
        .map(|&t| {
            let u = evolver.unitary(t, 1e-14)?;
            Ok(modes.iter().map(|c| &u * c * u.adjoint()).collect())
        })
        .collect::<Result<_>>()?;

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut qubits = vec![[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]; n_sites - 1];
    qubits.push([Complex64::new(h, 0.0), Complex64::new(h, 0.0)]);
    let rho0 = DensityMatrix::pure(&StateVector::product(&qubits)?)?;

    let points = gamma_grid
        .par_iter()
        .map(|&gamma| {
            let states = lindblad_trajectory(&rho0, &spec, gamma, &times, config.step)?;
            let mut chi1 = 0.0_f64;
            let mut all = 0.0_f64;
            for (k, mode) in (1..=2 * n_sites).enumerate() {
                // chi_n carries the mirror-image mode.
                let idx = crate::hilbert::chi_mode(mode, n_sites)? - 1;
                let initial = states[0].expectation(&carried[0][idx]);
                for (i, rho) in states.iter().enumerate() {
                    let want = initial * (-2.0 * gamma * times[i]).exp();
                    let d = (rho.expectation(&carried[i][idx]) - want).norm();
                    all = all.max(d);
                    if k == 0 {
                        chi1 = chi1.max(d);
                    }
                }
            }
            Ok(DephasingPoint { gamma, max_deviation_chi1: chi1, max_deviation_all: all })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DephasingReport { n_sites, duration, times, points })
}

/// Integrator error at step `h` and `h / 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderCheck {
    pub coarse_step: f64,
    pub deviation_coarse: f64,
    pub deviation_fine: f64,
    /// `deviation_coarse / deviation_fine`; 16 for a fourth-order method.
    pub ratio: f64,
}

pub fn dephasing_order_check(n_sites: usize, gamma: f64, duration: f64, coarse_step: f64) -> Result<OrderCheck> {
    let deviation = |step: f64| -> Result<f64> {
        let config = DephasingConfig { duration: Some(duration), time_points: 2, step: Some(step) };
        Ok(exp_dephasing(n_sites, &[gamma], &config)?.points[0].max_deviation_all)
    };
    let coarse = deviation(coarse_step)?;
    let fine = deviation(0.5 * coarse_step)?;
    Ok(OrderCheck { coarse_step, deviation_coarse: coarse, deviation_fine: fine, ratio: coarse / fine })
}
