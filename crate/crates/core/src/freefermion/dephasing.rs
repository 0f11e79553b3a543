//! Closed-form consequences of uniform dephasing on the Majorana modes.

use serde::Serialize;

use crate::error::{invalid, Result};

/// `(e^{-2 gamma t}, (1 - e^{-2 gamma t}) / 2)`: the decay of every mode
/// amplitude and the resulting per-mode error probability.
pub fn chi_decay(gamma: f64, t: f64) -> Result<(f64, f64)> {
    if !(gamma >= 0.0 && t >= 0.0) {
        return Err(invalid("chi_decay needs gamma >= 0 and t >= 0"));
    }
    let factor = (-2.0 * gamma * t).exp();
    Ok((factor, 0.5 * (1.0 - factor)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetReport {
    /// `2 gamma N t0`.
    pub expected_total: f64,
    /// `2 gamma M t0`.
    pub expected_on_region: f64,
    pub correctable: usize,
    pub feasible: bool,
    /// `k - 2 gamma M t0`.
    pub margin: f64,
    /// The expectation sits at the correctable count.
    pub marginal: bool,
}

pub fn error_budget(gamma: f64, t0: f64, n_sites: usize, region: usize, correctable: usize) -> Result<BudgetReport> {
    if !(gamma >= 0.0 && gamma.is_finite() && t0 > 0.0 && t0.is_finite()) {
        return Err(invalid("error_budget needs gamma >= 0 and t0 > 0"));
    }
    if region == 0 || region > n_sites {
        return Err(invalid(format!("region {region} outside 1..={n_sites}")));
    }
    let expected_total = 2.0 * gamma * n_sites as f64 * t0;
    let expected_on_region = 2.0 * gamma * region as f64 * t0;
    let margin = correctable as f64 - expected_on_region;
    Ok(BudgetReport {
        expected_total,
        expected_on_region,
        correctable,
        feasible: margin >= -1e-12,
        margin,
        marginal: margin.abs() <= 1e-9 * (correctable as f64).max(1.0),
    })
}
