//! Error scenarios: a single dephasing event, dephasing trajectories,
//! timing offsets and static coupling disorder.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{single_excitation_matrix, ChainSpec};
use crate::error::{invalid, Result};
use crate::hilbert::trajectory::{apply_jumps, sample_jumps};
use crate::hilbert::{Evolver, Jump, Pauli, PauliString, StateVector};
use crate::rng::stream_rng;

/// Accuracy requested from every evolution in a scenario.
pub const EVOLUTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorScenario {
    /// `Z` on `site` at `time` into the run.
    SingleZ { site: usize, time: f64 },
    /// Poisson Z jumps at rate `gamma` per site; `stream` selects the
    /// trajectory within `seed`.
    Dephasing { gamma: f64, duration: f64, seed: u64, stream: u64 },
    /// Read out at `total + delta` instead of `total`.
    Timing { delta: f64 },
    /// Couplings scaled by independent draws from `[1 - f, 1 + f]`. With
    /// `field_disorder` the fields also receive offsets `f * max J * U[-1, 1]`.
    Coupling {
        fraction: f64,
        seed: u64,
        instance: u64,
        #[serde(default)]
        field_disorder: bool,
    },
}

impl ErrorScenario {
    pub fn noiseless() -> Self {
        ErrorScenario::Timing { delta: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ErrorScenario::SingleZ { site, time } => {
                if site == 0 || !(time >= 0.0) {
                    return Err(invalid("single-Z needs site >= 1 and time >= 0"));
                }
            }
            ErrorScenario::Dephasing { gamma, duration, .. } => {
                if !(gamma >= 0.0) || !(duration >= 0.0) {
                    return Err(invalid("dephasing needs gamma >= 0 and duration >= 0"));
                }
            }
            ErrorScenario::Timing { delta } => {
                if !delta.is_finite() {
                    return Err(invalid("timing offset must be finite"));
                }
            }
            ErrorScenario::Coupling { fraction, .. } => {
                if !(0.0..1.0).contains(&fraction) {
                    return Err(invalid("disorder fraction must lie in [0, 1)"));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: ErrorScenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }
}

/// Final state of a scenario plus the quantity that judges its size.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub state: StateVector,
    /// `|delta| lambda_max` for timing, `zeta_max` for disorder, jump count
    /// for dephasing, 0 otherwise.
    pub diagnostic: f64,
    pub jumps: Vec<Jump>,
}

/// `exp(-iH(total - t_err)) Z_site exp(-iH t_err) |state>`.
pub fn inject_single_z(state: &StateVector, spec: &ChainSpec, site: usize, t_err: f64, total_time: f64) -> Result<StateVector> {
    let evolver = Evolver::shared(spec)?;
    inject_single_z_with(&evolver, state, site, t_err, total_time)
}

pub fn inject_single_z_with(evolver: &Evolver, state: &StateVector, site: usize, t_err: f64, total_time: f64) -> Result<StateVector> {
    let n = evolver.spec().n_sites;
    if site == 0 || site > n {
        return Err(invalid(format!("site {site} outside 1..={n}")));
    }
    if !(0.0..=total_time).contains(&t_err) {
        return Err(invalid("error time outside [0, total_time]"));
    }
    let jump = Jump { time: t_err, site };
    apply_jumps(evolver, state, &[jump], total_time, EVOLUTION_TOLERANCE)
}

/// Evolve for `nominal + delta`; also returns `|delta| lambda_max`.
pub fn timing_offset(state: &StateVector, spec: &ChainSpec, nominal: f64, delta: f64) -> Result<(StateVector, f64)> {
    let evolver = Evolver::shared(spec)?;
    let smallness = delta.abs() * single_excitation_matrix(spec).spectral_bound();
    Ok((evolver.evolve(state, nominal + delta, EVOLUTION_TOLERANCE)?, smallness))
}

/// Couplings multiplied by independent `U[1 - f, 1 + f]` draws; returns the
/// perturbed chain and the largest singular value of the change in H1.
pub fn coupling_disorder(spec: &ChainSpec, f: f64, rng_seed: u64) -> Result<(ChainSpec, f64)> {
    coupling_disorder_instance(spec, f, rng_seed, 0, false)
}

/// As [`coupling_disorder`], drawing from stream `instance` of `seed`.
pub fn coupling_disorder_instance(
    spec: &ChainSpec,
    f: f64,
    seed: u64,
    instance: u64,
    field_disorder: bool,
) -> Result<(ChainSpec, f64)> {
    spec.validate()?;
    if !(0.0..1.0).contains(&f) {
        return Err(invalid("disorder fraction must lie in [0, 1)"));
    }
    let mut rng = stream_rng(seed, instance);
    let couplings: Vec<f64> = spec.couplings.iter().map(|&j| j * (1.0 + f * rng.gen_range(-1.0..=1.0))).collect();
    let j_max = spec.couplings.iter().fold(0.0_f64, |m, j| m.max(j.abs()));
    let fields: Vec<f64> = if field_disorder {
        spec.fields.iter().map(|&b| b + f * j_max * rng.gen_range(-1.0..=1.0)).collect()
    } else {
        spec.fields.clone()
    };
    let perturbed = ChainSpec::new(couplings, fields)?;
    let delta = single_excitation_matrix(&perturbed).matrix() - single_excitation_matrix(spec).matrix();
    let zeta_max = delta.symmetric_eigenvalues().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok((perturbed, zeta_max))
}

pub fn dephasing_trajectory_scenario(gamma: f64, duration: f64, seed: u64) -> Result<ErrorScenario> {
    let s = ErrorScenario::Dephasing { gamma, duration, seed, stream: 0 };
    s.validate()?;
    Ok(s)
}

/// Run `scenario` on `state` for a nominal `total_time` on `spec`.
pub fn run_scenario(state: &StateVector, spec: &ChainSpec, total_time: f64, scenario: &ErrorScenario) -> Result<ScenarioOutcome> {
    scenario.validate()?;
    let plain = |state: StateVector, diagnostic: f64| ScenarioOutcome { state, diagnostic, jumps: Vec::new() };
    match *scenario {
        ErrorScenario::SingleZ { site, time } => Ok(plain(inject_single_z(state, spec, site, time, total_time)?, 0.0)),
        ErrorScenario::Timing { delta } => {
            let (s, smallness) = timing_offset(state, spec, total_time, delta)?;
            Ok(plain(s, smallness))
        }
        ErrorScenario::Coupling { fraction, seed, instance, field_disorder } => {
            let (perturbed, zeta) = coupling_disorder_instance(spec, fraction, seed, instance, field_disorder)?;
            let evolver = if fraction == 0.0 { Evolver::shared(spec)? } else { Evolver::new(&perturbed)?.into() };
            Ok(plain(evolver.evolve(state, total_time, EVOLUTION_TOLERANCE)?, zeta))
        }
        ErrorScenario::Dephasing { gamma, duration, seed, stream } => {
            let evolver = Evolver::shared(spec)?;
            let jumps = sample_jumps(spec.n_sites, gamma, duration, seed, stream)?;
            let s = apply_jumps(&evolver, state, &jumps, duration, EVOLUTION_TOLERANCE)?;
            Ok(ScenarioOutcome { state: s, diagnostic: jumps.len() as f64, jumps })
        }
    }
}

/// Uniform draw of `(site, time)` for the single-Z experiment.
pub fn draw_single_z(n_sites: usize, total_time: f64, seed: u64, sample: u64) -> ErrorScenario {
    let mut rng = stream_rng(seed, sample);
    let site = rng.gen_range(1..=n_sites);
    let time = rng.gen_range(0.0..=total_time);
    ErrorScenario::SingleZ { site, time }
}

/// `Z` on one site, for callers composing errors by hand.
pub fn z_error(n_sites: usize, site: usize) -> Result<PauliString> {
    PauliString::single(n_sites, site, Pauli::Z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::pst_couplings;
    use crate::freefermion::{mode_propagator, pauli_to_fermion, propagate};
    use crate::hilbert::{fidelity, StateVector};
    use crate::MaxNorm;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = stream_rng(seed, 99);
        let amps = (0..1 << n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut s = StateVector::new(n, amps).unwrap();
        s.normalize();
        s
    }

    #[test]
    fn single_z_at_end_is_final_phase_flip() {
        let spec = pst_couplings(4, 1.0).unwrap();
        let psi = random_state(4, 1);
        let t = 1.1;
        let got = inject_single_z(&psi, &spec, 2, t, t).unwrap();
        let mut want = crate::hilbert::evolve(&psi, &spec, t, 1e-13).unwrap();
        want.apply_pauli_in_place(&z_error(4, 2).unwrap()).unwrap();
        assert!(fidelity(&got, &want).unwrap() > 1.0 - 1e-12);
        assert!(inject_single_z(&psi, &spec, 5, 0.0, t).is_err());
        assert!(inject_single_z(&psi, &spec, 1, 2.0, t).is_err());
    }

    #[test]
    fn single_z_matches_propagated_operator() {
        for n in 2..=5 {
            let spec = pst_couplings(n, 1.0).unwrap();
            let psi = random_state(n, n as u64);
            let (t_err, total) = (0.4, 1.3);
            for site in 1..=n {
                let got = inject_single_z(&psi, &spec, site, t_err, total).unwrap();
                let clean = crate::hilbert::evolve(&psi, &spec, total, 1e-13).unwrap();
                let op = pauli_to_fermion(&z_error(n, site).unwrap()).unwrap();
                let prop = mode_propagator(&single_excitation_matrix(&spec), total - t_err).unwrap();
                let dense = propagate(&op, &prop).unwrap().to_dense().unwrap();
                let v = nalgebra::DVector::from_column_slice(clean.amplitudes());
                let want = &dense * v;
                let diff = nalgebra::DMatrix::from_column_slice(want.len(), 1, want.as_slice())
                    - nalgebra::DMatrix::from_column_slice(want.len(), 1, got.amplitudes());
                assert!(diff.max_norm() < 1e-10, "n={n} site={site} diff={}", diff.max_norm());
            }
        }
    }

    #[test]
    fn timing_examples() {
        let spec = pst_couplings(15, 1.0).unwrap();
        let psi = StateVector::excited(15, &[1]).unwrap();
        let nominal = std::f64::consts::FRAC_PI_2;
        let (a, s0) = timing_offset(&psi, &spec, nominal, 0.0).unwrap();
        let b = crate::hilbert::evolve(&psi, &spec, nominal, 1e-13).unwrap();
        assert_eq!(s0, 0.0);
        assert!(fidelity(&a, &b).unwrap() > 1.0 - 1e-12);
        let (_, s) = timing_offset(&psi, &spec, nominal, 0.01).unwrap();
        assert!((s - 0.14).abs() < 1e-10);
        let mut last = 1.0 + 1e-12;
        for k in 1..=5 {
            let (d, _) = timing_offset(&psi, &spec, nominal, 0.01 * k as f64).unwrap();
            let f = fidelity(&d, &b).unwrap();
            assert!(f < last);
            last = f;
        }
    }

    #[test]
    fn disorder_examples() {
        let spec = pst_couplings(15, 1.0).unwrap();
        let (same, zeta) = coupling_disorder(&spec, 0.0, 3).unwrap();
        assert_eq!(same, spec);
        assert_eq!(zeta, 0.0);
        let j_max = spec.couplings.iter().cloned().fold(0.0, f64::max);
        for seed in 0..20 {
            let (p, zeta) = coupling_disorder(&spec, 0.1, seed).unwrap();
            assert!(zeta <= 2.0 * 0.1 * j_max + 1e-12);
            assert_eq!(p.fields, spec.fields);
            assert_eq!(coupling_disorder(&spec, 0.1, seed).unwrap().0, p);
            for (a, b) in p.couplings.iter().zip(&spec.couplings) {
                assert!((a / b - 1.0).abs() <= 0.1 + 1e-15);
            }
        }
        let (with_fields, _) = coupling_disorder_instance(&spec, 0.1, 1, 0, true).unwrap();
        assert_ne!(with_fields.fields, spec.fields);
        assert!(coupling_disorder(&spec, 1.0, 0).is_err());
    }

    #[test]
    fn scenario_json_round_trip() {
        let all = [
            ErrorScenario::SingleZ { site: 3, time: 0.25 },
            dephasing_trajectory_scenario(0.01, 3.0, 7).unwrap(),
            ErrorScenario::Timing { delta: -0.02 },
            ErrorScenario::Coupling { fraction: 0.05, seed: 1, instance: 4, field_disorder: false },
        ];
        for s in all {
            assert_eq!(ErrorScenario::from_json(&s.to_json().unwrap()).unwrap(), s);
        }
        assert!(ErrorScenario::from_json(r#"{"kind":"timing","delta":1e400}"#).is_err());
        assert!(dephasing_trajectory_scenario(-1.0, 1.0, 0).is_err());
    }

    #[test]
    fn noiseless_dephasing_is_plain_evolution() {
        let spec = pst_couplings(5, 1.0).unwrap();
        let psi = random_state(5, 4);
        let s = dephasing_trajectory_scenario(0.0, 1.0, 9).unwrap();
        let out = run_scenario(&psi, &spec, 1.0, &s).unwrap();
        assert!(out.jumps.is_empty());
        let want = crate::hilbert::evolve(&psi, &spec, 1.0, 1e-13).unwrap();
        assert!(fidelity(&out.state, &want).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn jump_counts_follow_poisson_mean() {
        let (n, gamma, duration) = (6usize, 0.2, 2.0);
        let samples = 4000;
        let total: usize =
            (0..samples).map(|k| sample_jumps(n, gamma, duration, 11, k).unwrap().len()).sum();
        let mean = total as f64 / samples as f64;
        let expect = gamma * n as f64 * duration;
        assert!((mean - expect).abs() < 3.0 * (expect / samples as f64).sqrt());
    }

    #[test]
    fn region_errors_match_mode_estimate() {
        // Each Z jump carries two Majorana modes, so the mean number of mode
        // errors on M sites is 2 M p and P(any jump) is close to M p.
        let (n, m, gamma, t) = (8usize, 3usize, 0.01, 1.0);
        let (_, p) = crate::freefermion::chi_decay(gamma, t).unwrap();
        let samples = 20000u64;
        let on_region: Vec<usize> = (0..samples)
            .map(|k| sample_jumps(n, gamma, t, 5, k).unwrap().iter().filter(|j| j.site > n - m).count())
            .collect();
        let modes = 2.0 * on_region.iter().sum::<usize>() as f64 / samples as f64;
        let hit = on_region.iter().filter(|&&c| c > 0).count() as f64 / samples as f64;
        let expect = 2.0 * m as f64 * p;
        let sigma = 2.0 * (expect / 2.0 / samples as f64).sqrt();
        assert!((modes - expect).abs() < 4.0 * sigma + 0.1 * expect * gamma * t, "modes {modes} vs {expect}");
        assert!((hit - m as f64 * p).abs() < 4.0 * sigma + 0.002, "hit {hit}");
    }

    #[test]
    fn draws_are_reproducible() {
        assert_eq!(draw_single_z(15, 3.0, 1, 7), draw_single_z(15, 3.0, 1, 7));
        assert_ne!(draw_single_z(15, 3.0, 1, 7), draw_single_z(15, 3.0, 1, 8));
    }
}
