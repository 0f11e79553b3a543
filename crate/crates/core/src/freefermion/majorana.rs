//! Majorana operators and polynomials in them.
//!
//! Modes are 1-based: `c_n = Z_1 .. Z_{n-1} X_n` for `n <= N` and
//! `c_{N+n} = Z_1 .. Z_{n-1} Y_n`. Monomials are stored normal ordered
//! (strictly increasing modes), using `c_a c_b = -c_b c_a` and `c_a^2 = 1`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::hilbert::pauli::{Pauli, PauliString};

/// Coefficients below this magnitude are dropped when simplifying.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Default cap on the number of terms an operator may grow to.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// A Majorana mode index in `1..=2N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MajoranaIndex(usize);

impl MajoranaIndex {
    pub fn new(index: usize, n_sites: usize) -> Result<Self> {
        if index == 0 || index > 2 * n_sites {
            return Err(invalid(format!("Majorana index {index} outside 1..={}", 2 * n_sites)));
        }
        Ok(MajoranaIndex(index))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// 1-based site the mode's X or Y sits on.
    pub fn site(self, n_sites: usize) -> usize {
        if self.0 <= n_sites {
            self.0
        } else {
            self.0 - n_sites
        }
    }

    pub fn is_x_type(self, n_sites: usize) -> bool {
        self.0 <= n_sites
    }
}

/// Pauli string of a single Majorana mode.
pub fn jordan_wigner(mode: usize, n_sites: usize) -> Result<PauliString> {
    let m = MajoranaIndex::new(mode, n_sites)?;
    let site = m.site(n_sites);
    let top = if m.is_x_type(n_sites) { Pauli::X } else { Pauli::Y };
    let mut ops: Vec<(usize, Pauli)> = (1..site).map(|s| (s, Pauli::Z)).collect();
    ops.push((site, top));
    PauliString::from_ops(n_sites, &ops)
}

/// One normal-ordered product `coefficient * c_{m_1} c_{m_2} ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaMonomial {
    pub coefficient: Complex64,
    pub modes: Vec<usize>,
}

/// Sign and mode list of the product of two normal-ordered monomials.
pub(crate) fn multiply_modes(a: &[usize], b: &[usize]) -> (bool, Vec<usize>) {
    // Each element of `b` moves left past every larger element of `a`;
    // equal pairs then meet and square to one.
    let mut negative = false;
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            if (a.len() - i) % 2 == 1 {
                negative = !negative;
            }
            out.push(b[j]);
            j += 1;
        } else {
            // a[i] == b[j]: b[j] passes the a.len() - i - 1 larger elements.
            if (a.len() - i - 1) % 2 == 1 {
                negative = !negative;
            }
            i += 1;
            j += 1;
        }
    }
    (negative, out)
}

/// Sort an arbitrary mode sequence into normal order, returning the sign.
pub(crate) fn normal_order(modes: &[usize]) -> (bool, Vec<usize>) {
    let mut negative = false;
    let mut acc: Vec<usize> = Vec::new();
    for &m in modes {
        let (neg, next) = multiply_modes(&acc, &[m]);
        negative ^= neg;
        acc = next;
    }
    (negative, acc)
}

/// Polynomial in Majorana modes with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionOperator {
    n_sites: usize,
    terms: BTreeMap<Vec<usize>, Complex64>,
}

impl FermionOperator {
    pub fn zero(n_sites: usize) -> Self {
        FermionOperator { n_sites, terms: BTreeMap::new() }
    }

    pub fn identity(n_sites: usize) -> Self {
        Self::monomial(n_sites, Complex64::new(1.0, 0.0), &[]).expect("empty monomial is valid")
    }

    /// `coefficient * c_{modes[0]} c_{modes[1]} ...` in any order.
    pub fn monomial(n_sites: usize, coefficient: Complex64, modes: &[usize]) -> Result<Self> {
        for &m in modes {
            MajoranaIndex::new(m, n_sites)?;
        }
        let (negative, ordered) = normal_order(modes);
        let mut op = Self::zero(n_sites);
        op.add_term(ordered, if negative { -coefficient } else { coefficient });
        op.prune();
        Ok(op)
    }

    /// Single-mode linear form `sum_m weights[m-1] c_m`.
    pub fn linear(n_sites: usize, weights: &[f64]) -> Result<Self> {
        if weights.len() != 2 * n_sites {
            return Err(invalid("linear form needs 2N weights"));
        }
        let mut op = Self::zero(n_sites);
        for (k, &w) in weights.iter().enumerate() {
            op.add_term(vec![k + 1], Complex64::new(w, 0.0));
        }
        op.prune();
        Ok(op)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = MajoranaMonomial> + '_ {
        self.terms.iter().map(|(m, &c)| MajoranaMonomial { coefficient: c, modes: m.clone() })
    }

    pub fn coefficient(&self, modes: &[usize]) -> Complex64 {
        self.terms.get(modes).copied().unwrap_or_default()
    }

    /// Largest number of modes in any term.
    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(Vec::len).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    fn add_term(&mut self, modes: Vec<usize>, coefficient: Complex64) {
        *self.terms.entry(modes).or_default() += coefficient;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c *= factor);
        out.prune();
        out
    }

    pub fn plus(&self, other: &FermionOperator) -> Result<Self> {
        self.check_sites(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out.prune();
        Ok(out)
    }

    fn check_sites(&self, other: &FermionOperator) -> Result<()> {
        if self.n_sites != other.n_sites {
            return Err(invalid("operators on different chains"));
        }
        Ok(())
    }

    /// Operator product with normal ordering, failing if the result would
    /// exceed `cap` terms.
    pub fn mul_capped(&self, other: &FermionOperator, cap: usize) -> Result<Self> {
        self.check_sites(other)?;
        let mut out = Self::zero(self.n_sites);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let (negative, modes) = multiply_modes(ma, mb);
                let c = ca * cb;
                out.add_term(modes, if negative { -c } else { c });
                if out.terms.len() > cap {
                    return Err(Error::ResourceLimit(format!("operator grew beyond {cap} terms")));
                }
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn mul(&self, other: &FermionOperator) -> Result<Self> {
        self.mul_capped(other, DEFAULT_TERM_CAP)
    }

    /// Expand every monomial into a Pauli string via the Jordan-Wigner map.
    pub fn to_pauli_terms(&self) -> Result<Vec<(Complex64, PauliString)>> {
        self.terms
            .iter()
            .map(|(modes, &c)| {
                let mut p = PauliString::identity(self.n_sites);
                for &m in modes {
                    p = p * jordan_wigner(m, self.n_sites)?;
                }
                Ok((c, p))
            })
            .collect()
    }

    /// Dense matrix in the basis-index order of [`crate::hilbert::StateVector`].
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        let dim = 1usize << self.n_sites;
        let mut m = DMatrix::zeros(dim, dim);
        for (c, p) in self.to_pauli_terms()? {
            m += p.to_dense() * c;
        }
        Ok(m)
    }

    /// Largest coefficient difference to `other`.
    pub fn distance(&self, other: &FermionOperator) -> f64 {
        let keys: std::collections::BTreeSet<&Vec<usize>> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .map(|k| (self.coefficient(k) - other.coefficient(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Canonical text: a header line `sites N`, then one term per line,
    /// `real imag m_1 m_2 ...`, terms in lexicographic mode order.
    pub fn to_text(&self) -> String {
        let mut out = format!("sites {}\n", self.n_sites);
        for (modes, c) in &self.terms {
            let _ = write!(out, "{:.16e} {:.16e}", c.re, c.im);
            for m in modes {
                let _ = write!(out, " {m}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let parse_err = |line: &str| Error::Parse(format!("bad fermion operator line {line:?}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty operator text".into()))?;
        let n_sites: usize = header
            .strip_prefix("sites ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| parse_err(header))?;
        let mut op = Self::zero(n_sites);
        for line in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 2 {
                return Err(parse_err(line));
            }
            let re: f64 = fields[0].parse().map_err(|_| parse_err(line))?;
            let im: f64 = fields[1].parse().map_err(|_| parse_err(line))?;
            let modes: Vec<usize> = fields[2..]
                .iter()
                .map(|f| f.parse().map_err(|_| parse_err(line)))
                .collect::<Result<_>>()?;
            let term = Self::monomial(n_sites, Complex64::new(re, im), &modes)?;
            op = op.plus(&term)?;
        }
        Ok(op)
    }
}

/// Express a Pauli string in Majorana modes.
pub fn pauli_to_fermion(p: &PauliString) -> Result<FermionOperator> {
    let n = p.n_qubits();
    let minus_i = Complex64::new(0.0, -1.0);
    let mut acc = FermionOperator::identity(n).scaled(p.phase());
    for site in 1..=n {
        let factor = match p.op_at(site) {
            Pauli::I => continue,
            Pauli::Z => FermionOperator::monomial(n, minus_i, &[site, n + site])?,
            top => {
                // Z string on the sites below, then c_site or c_{N+site}.
                let mut modes: Vec<usize> = (1..site).flat_map(|s| [s, n + s]).collect();
                modes.push(if top == Pauli::X { site } else { n + site });
                let phase = minus_i.powu((site - 1) as u32);
                FermionOperator::monomial(n, phase, &modes)?
            }
        };
        acc = acc.mul(&factor)?;
    }
    Ok(acc)
}
