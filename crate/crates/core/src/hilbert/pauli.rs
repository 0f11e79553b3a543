//! Pauli strings in binary symplectic form.
//!
//! Site `n` (1-based) occupies bit `n - 1` of both masks. The operator is
//! `i^k * prod_n sigma(x_n, z_n)` with `sigma(1, 1) = Y`, so Hermitian strings
//! have `k` even.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    phase: u8,
    x_mask: u64,
    z_mask: u64,
}

fn low_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits supported");
        PauliString { n_qubits, phase: 0, x_mask: 0, z_mask: 0 }
    }

    /// Build from site-ordered masks and a power of `i`.
    pub fn from_masks(n_qubits: usize, x_mask: u64, z_mask: u64, phase: u8) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(invalid(format!("at most {MAX_QUBITS} qubits supported")));
        }
        if (x_mask | z_mask) & !low_mask(n_qubits) != 0 {
            return Err(invalid("mask has bits beyond n_qubits"));
        }
        Ok(PauliString { n_qubits, phase: phase % 4, x_mask, z_mask })
    }

    /// Single-site operator; `site` is 1-based.
    pub fn single(n_qubits: usize, site: usize, op: Pauli) -> Result<Self> {
        Self::from_ops(n_qubits, &[(site, op)])
    }

    /// Product of single-site operators on distinct 1-based sites.
    pub fn from_ops(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut p = Self::identity(n_qubits.min(MAX_QUBITS));
        if n_qubits > MAX_QUBITS {
            return Err(invalid(format!("at most {MAX_QUBITS} qubits supported")));
        }
        for &(site, op) in ops {
            if site == 0 || site > n_qubits {
                return Err(invalid(format!("site {site} outside 1..={n_qubits}")));
            }
            let bit = 1u64 << (site - 1);
            if (p.x_mask | p.z_mask) & bit != 0 {
                return Err(invalid(format!("site {site} given twice")));
            }
            let (x, z) = op.bits();
            if x {
                p.x_mask |= bit;
            }
            if z {
                p.z_mask |= bit;
            }
        }
        Ok(p)
    }

    /// `op` on every site in `sites` (1-based).
    pub fn uniform(n_qubits: usize, sites: impl IntoIterator<Item = usize>, op: Pauli) -> Result<Self> {
        let ops: Vec<(usize, Pauli)> = sites.into_iter().map(|s| (s, op)).collect();
        Self::from_ops(n_qubits, &ops)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    /// Power of `i` in front of the tensor product of `I, X, Y, Z`.
    pub fn phase_exponent(&self) -> u8 {
        self.phase
    }

    pub fn phase(&self) -> Complex64 {
        i_pow(self.phase)
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn negated(self) -> Self {
        let phase = self.phase + 2;
        self.with_phase(phase)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn op_at(&self, site: usize) -> Pauli {
        let bit = 1u64 << (site - 1);
        Pauli::from_bits(self.x_mask & bit != 0, self.z_mask & bit != 0)
    }

    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x_mask == 0
    }

    /// Sites (1-based, ascending) carrying X or Y.
    pub fn flip_sites(&self) -> Vec<usize> {
        bits_to_sites(self.x_mask)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones()) % 2 == 0
    }

    /// Masks in basis-index order: site `n` at bit `N - n`.
    pub fn index_masks(&self) -> (u64, u64) {
        (reverse_bits(self.x_mask, self.n_qubits), reverse_bits(self.z_mask, self.n_qubits))
    }

    /// Image of basis index `b` as `(coefficient, index)`.
    #[inline]
    pub(crate) fn act_on_index(index_x: u64, index_z: u64, y_phase: u8, b: u64) -> (Complex64, u64) {
        let sign = (b & index_z).count_ones() % 2;
        (i_pow(y_phase + 2 * sign as u8), b ^ index_x)
    }

    /// Phase factor (as a power of `i`) picked up on top of the basis sign:
    /// the overall phase plus one `i` per `Y`.
    pub(crate) fn y_phase(&self) -> u8 {
        ((self.phase as u32 + (self.x_mask & self.z_mask).count_ones()) % 4) as u8
    }

    /// Same operator on a larger register, shifted so that qubit 1 sits at
    /// site `offset + 1`.
    pub fn embed(&self, n_total: usize, offset: usize) -> Result<Self> {
        if offset + self.n_qubits > n_total || n_total > MAX_QUBITS {
            return Err(invalid("embedding does not fit"));
        }
        Ok(PauliString {
            n_qubits: n_total,
            phase: self.phase,
            x_mask: self.x_mask << offset,
            z_mask: self.z_mask << offset,
        })
    }

    /// Qubit order reversed (qubit `j` moves to `N + 1 - j`).
    pub fn reversed(&self) -> Self {
        PauliString {
            n_qubits: self.n_qubits,
            phase: self.phase,
            x_mask: reverse_bits(self.x_mask, self.n_qubits),
            z_mask: reverse_bits(self.z_mask, self.n_qubits),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let (ix, iz) = self.index_masks();
        let yp = self.y_phase();
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim as u64 {
            let (c, out) = Self::act_on_index(ix, iz, yp, b);
            m[(out as usize, b as usize)] = c;
        }
        m
    }

    /// Letters only, site 1 first.
    pub fn letters(&self) -> String {
        (1..=self.n_qubits).map(|s| self.op_at(s).letter()).collect()
    }
}

pub(crate) fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

pub(crate) fn reverse_bits(mask: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        mask.reverse_bits() >> (64 - n)
    }
}

pub(crate) fn bits_to_sites(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask & (1u64 << b) != 0).map(|b| b + 1).collect()
}

impl Mul for PauliString {
    type Output = PauliString;

    fn mul(self, rhs: PauliString) -> PauliString {
        &self * &rhs
    }
}

impl Mul<&PauliString> for &PauliString {
    type Output = PauliString;

    fn mul(self, rhs: &PauliString) -> PauliString {
        assert_eq!(self.n_qubits, rhs.n_qubits, "Pauli strings act on different registers");
        // Work in X^x Z^z form, where sigma(x, z) = i^{|x & z|} X^x Z^z.
        let ones = |m: u64| m.count_ones();
        let total = self.phase as u32
            + rhs.phase as u32
            + ones(self.x_mask & self.z_mask)
            + ones(rhs.x_mask & rhs.z_mask)
            + 2 * ones(self.z_mask & rhs.x_mask);
        let x = self.x_mask ^ rhs.x_mask;
        let z = self.z_mask ^ rhs.z_mask;
        let phase = (total + 4 * 64 - ones(x & z)) % 4;
        PauliString { n_qubits: self.n_qubits, phase: phase as u8, x_mask: x, z_mask: z }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.letters())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts labels like `XIZ`, `+XIZ`, `-iYY`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else {
            (0, s)
        };
        let mut ops = Vec::new();
        for (k, ch) in rest.chars().enumerate() {
            let op = match ch {
                'I' | '_' => continue,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::Parse(format!("bad Pauli letter {other:?}"))),
            };
            ops.push((k + 1, op));
        }
        Ok(Self::from_ops(rest.chars().count(), &ops)?.with_phase(phase))
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
