use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_complex::Complex64;

use super::pauli::PauliString;
use crate::error::{invalid, Error, Result};

/// Largest register a state vector may hold.
pub const MAX_STATE_QUBITS: usize = 26;

/// Pure state of `N` qubits.
///
/// Amplitude ordering: qubit 1 is the most significant bit of the basis
/// index, so site `n` lives at bit `N - n`. Bit value 1 means an excitation.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n_sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_sites > MAX_STATE_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "{n_sites} qubits exceeds the state-vector limit of {MAX_STATE_QUBITS}"
            )));
        }
        if amps.len() != 1usize << n_sites {
            return Err(invalid(format!(
                "{} amplitudes do not describe {n_sites} qubits",
                amps.len()
            )));
        }
        Ok(StateVector { n_sites, amps })
    }

    pub fn zeros(n_sites: usize) -> Result<Self> {
        if n_sites > MAX_STATE_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "{n_sites} qubits exceeds the state-vector limit of {MAX_STATE_QUBITS}"
            )));
        }
        Self::new(n_sites, vec![Complex64::new(0.0, 0.0); 1usize << n_sites])
    }

    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        let mut s = Self::zeros(n_sites)?;
        if index >= s.amps.len() {
            return Err(invalid(format!("basis index {index} out of range")));
        }
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Computational basis state with the given 1-based sites excited.
    pub fn excited(n_sites: usize, sites: &[usize]) -> Result<Self> {
        let mut index = 0usize;
        for &s in sites {
            if s == 0 || s > n_sites {
                return Err(invalid(format!("site {s} outside 1..={n_sites}")));
            }
            index |= 1 << (n_sites - s);
        }
        Self::basis(n_sites, index)
    }

    /// Product state from per-qubit amplitudes `[a0, a1]`, qubit 1 first.
    pub fn product(qubits: &[[Complex64; 2]]) -> Result<Self> {
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for q in qubits {
            amps = amps.iter().flat_map(|&a| [a * q[0], a * q[1]]).collect();
        }
        Self::new(qubits.len(), amps)
    }

    /// `self` on the first sites, `other` on the remaining ones.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let amps = self
            .amps
            .iter()
            .flat_map(|&a| other.amps.iter().map(move |&b| a * b))
            .collect();
        Self::new(self.n_sites + other.n_sites, amps)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> f64 {
        let norm = self.norm();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
        norm
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= factor);
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub(crate) fn check_same(&self, other: &StateVector) -> Result<()> {
        if self.n_sites != other.n_sites {
            return Err(invalid(format!(
                "states on {} and {} qubits",
                self.n_sites, other.n_sites
            )));
        }
        Ok(())
    }

    pub fn apply_pauli_in_place(&mut self, p: &PauliString) -> Result<()> {
        if p.n_qubits() != self.n_sites {
            return Err(invalid(format!(
                "Pauli string on {} qubits applied to {} qubits",
                p.n_qubits(),
                self.n_sites
            )));
        }
        let (ix, iz) = p.index_masks();
        let yp = p.y_phase();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            let (c, target) = PauliString::act_on_index(ix, iz, yp, b as u64);
            out[target as usize] = c * a;
        }
        self.amps = out;
        Ok(())
    }

    pub fn expectation(&self, p: &PauliString) -> Result<Complex64> {
        let mut image = self.clone();
        image.apply_pauli_in_place(p)?;
        self.inner(&image)
    }

    /// Probability weight in each excitation-number sector.
    pub fn sector_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n_sites + 1];
        for (b, a) in self.amps.iter().enumerate() {
            w[b.count_ones() as usize] += a.norm_sqr();
        }
        w
    }

    /// Index-order mask covering 1-based `sites`.
    pub fn site_mask(&self, sites: &RangeInclusive<usize>) -> Result<u64> {
        if *sites.start() == 0 || *sites.end() > self.n_sites || sites.start() > sites.end() {
            return Err(invalid(format!("site range {sites:?} outside 1..={}", self.n_sites)));
        }
        Ok(sites.clone().fold(0u64, |m, s| m | 1 << (self.n_sites - s)))
    }

    /// `<reference| rho_region |reference>` where `rho_region` is the reduced
    /// state on the contiguous `region` and `reference` is a pure state of
    /// the region (its qubit 1 sits at the region's first site).
    pub fn region_fidelity(&self, reference: &StateVector, region: RangeInclusive<usize>) -> Result<f64> {
        let m = region.end() + 1 - region.start();
        if reference.n_sites != m {
            return Err(invalid("reference does not match the region size"));
        }
        let mask = self.site_mask(&region)?;
        let shift = self.n_sites - region.end();
        // For each assignment of the complement, project onto the reference.
        let mut overlaps = std::collections::HashMap::<u64, Complex64>::new();
        for (b, &a) in self.amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let b = b as u64;
            let r = ((b & mask) >> shift) as usize;
            *overlaps.entry(b & !mask).or_default() += reference.amps[r].conj() * a;
        }
        Ok(overlaps.values().map(|z| z.norm_sqr()).sum())
    }

    /// Golden-file text: one `index real imag` line per amplitude.
    pub fn to_golden(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            let _ = writeln!(out, "{i} {:.16e} {:.16e}", a.re, a.im);
        }
        out
    }

    pub fn from_golden(n_sites: usize, text: &str) -> Result<Self> {
        let mut s = Self::zeros(n_sites)?;
        for line in text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
            let mut fields = line.split_whitespace();
            let mut next = || fields.next().ok_or_else(|| Error::Parse(format!("short line {line:?}")));
            let index: usize = next()?.parse().map_err(|e| Error::Parse(format!("{e}")))?;
            let re: f64 = next()?.parse().map_err(|e| Error::Parse(format!("{e}")))?;
            let im: f64 = next()?.parse().map_err(|e| Error::Parse(format!("{e}")))?;
            if index >= s.amps.len() {
                return Err(Error::Parse(format!("index {index} out of range")));
            }
            s.amps[index] = Complex64::new(re, im);
        }
        Ok(s)
    }
}

pub fn apply_pauli(state: &StateVector, p: &PauliString) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_pauli_in_place(p)?;
    Ok(out)
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Controlled-phase between every pair of qubits in `region`: each basis
/// amplitude picks up `(-1)^{w(w-1)/2}` with `w` the excitations inside.
pub fn cz_network(state: &StateVector, region: RangeInclusive<usize>) -> Result<StateVector> {
    let mut out = state.clone();
    cz_network_in_place(&mut out, region)?;
    Ok(out)
}

pub fn cz_network_in_place(state: &mut StateVector, region: RangeInclusive<usize>) -> Result<()> {
    let mask = state.site_mask(&region)?;
    for (b, a) in state.amps.iter_mut().enumerate() {
        let w = (b as u64 & mask).count_ones();
        if (w * w.saturating_sub(1) / 2) % 2 == 1 {
            *a = -*a;
        }
    }
    Ok(())
}
