//! Where a propagated error operator lands relative to the decoding region.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::Serialize;

use super::majorana::FermionOperator;
use crate::error::{invalid, Result};
use crate::hilbert::pauli::Pauli;

/// One monomial of an arriving error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermArrival {
    pub coefficient: Complex64,
    pub modes: Vec<usize>,
    /// Modes whose site lies in the decoding region.
    pub modes_in_region: Vec<usize>,
    /// Sites carrying X or Y in the term's Pauli string.
    pub flip_sites: Vec<usize>,
    /// Sites carrying a bare Z.
    pub z_sites: Vec<usize>,
    /// Flip sites inside the region.
    pub flips_in_region: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrivalClassification {
    pub region: (usize, usize),
    pub terms: Vec<TermArrival>,
    pub max_modes: usize,
    pub max_flips_in_region: usize,
}

impl ArrivalClassification {
    pub fn region(&self) -> RangeInclusive<usize> {
        self.region.0..=self.region.1
    }
}

/// Classify every monomial of `op` against the final `region_size` sites.
pub fn classify_arrival(op: &FermionOperator, region_size: usize) -> Result<ArrivalClassification> {
    let n = op.n_sites();
    if region_size == 0 || region_size > n {
        return Err(invalid(format!("region size {region_size} outside 1..={n}")));
    }
    let region = (n + 1 - region_size)..=n;
    let site_of = |m: usize| if m <= n { m } else { m - n };
    let mut terms = Vec::with_capacity(op.len());
    for (term, (_, pauli)) in op.terms().zip(op.to_pauli_terms()?) {
        let flip_sites = pauli.flip_sites();
        let z_sites = (1..=n).filter(|&s| pauli.op_at(s) == Pauli::Z).collect();
        terms.push(TermArrival {
            coefficient: term.coefficient,
            modes_in_region: term.modes.iter().copied().filter(|&m| region.contains(&site_of(m))).collect(),
            flips_in_region: flip_sites.iter().filter(|s| region.contains(s)).count(),
            flip_sites,
            z_sites,
            modes: term.modes,
        });
    }
    Ok(ArrivalClassification {
        region: (*region.start(), *region.end()),
        max_modes: terms.iter().map(|t| t.modes.len()).max().unwrap_or(0),
        max_flips_in_region: terms.iter().map(|t| t.flips_in_region).max().unwrap_or(0),
        terms,
    })
}
