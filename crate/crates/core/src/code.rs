//! Stabilizer codes used for transfer: the 15-qubit example, the
//! `[[d^2, 1, d]]` Shor family and concatenated repetition codes.
//!
//! Generators are split by what they detect. `x_detecting` generators are
//! Z-type checks that flag bit flips; `z_detecting` generators are X-type
//! checks that flag phase flips. Qubit `k` of block `b` (both 1-based) is
//! site `(b - 1) * block_len + k`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::state::MAX_STATE_QUBITS;
use crate::hilbert::{apply_pauli, Pauli, PauliString, StateVector};

/// Tolerance used when deciding that a state lies in the code space.
pub const CODESPACE_TOLERANCE: f64 = 1e-10;

/// Which basis the inner (block) repetition code lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Blocks repeat in the computational basis and locate bit flips; the
    /// outer code over blocks corrects phase flips.
    Computational,
    /// Blocks repeat in the `|+>/|->` basis and correct phase flips; the
    /// outer code over blocks corrects bit flips.
    Hadamard,
}

impl Orientation {
    fn as_str(self) -> &'static str {
        match self {
            Orientation::Computational => "computational",
            Orientation::Hadamard => "hadamard",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizerCode {
    pub name: String,
    pub n_qubits: usize,
    pub x_detecting_generators: Vec<PauliString>,
    pub z_detecting_generators: Vec<PauliString>,
    pub logical_x: PauliString,
    pub logical_z: PauliString,
    pub blocks: Vec<Vec<usize>>,
    pub dx: usize,
    pub dz: usize,
    pub orientation: Orientation,
}

/// Logical content of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogicalReadout {
    pub alpha: Complex64,
    pub beta: Complex64,
    /// Squared norm of the projection onto the code space.
    pub codespace_weight: f64,
    pub in_codespace: bool,
}

fn block_sites(block_len: usize, b: usize) -> std::ops::RangeInclusive<usize> {
    (b - 1) * block_len + 1..=b * block_len
}

/// Repetition checks `P_i P_{i+1}` inside every block.
fn inner_checks(block_len: usize, n_blocks: usize, op: Pauli) -> Result<Vec<PauliString>> {
    let n = block_len * n_blocks;
    let mut out = Vec::new();
    for b in 1..=n_blocks {
        let first = (b - 1) * block_len + 1;
        for i in first..first + block_len - 1 {
            out.push(PauliString::uniform(n, [i, i + 1], op)?);
        }
    }
    Ok(out)
}

/// Checks `P^{(x)L}` on block `b` times the same on block `b + 1`.
fn outer_checks(block_len: usize, n_blocks: usize, op: Pauli) -> Result<Vec<PauliString>> {
    let n = block_len * n_blocks;
    (1..n_blocks)
        .map(|b| PauliString::uniform(n, block_sites(block_len, b).chain(block_sites(block_len, b + 1)), op))
        .collect()
}

fn first_of_each_block(block_len: usize, n_blocks: usize) -> impl Iterator<Item = usize> {
    (0..n_blocks).map(move |b| b * block_len + 1)
}

/// `n_blocks` blocks of `block_len` qubits: computational-basis repetition
/// inside each block, phase repetition across blocks.
///
/// `|0_L> = GHZ+^{(x)n_blocks}`, `|1_L> = GHZ-^{(x)n_blocks}` with
/// `GHZ± = (|0..0> ± |1..1>)/sqrt 2`.
pub fn concatenated_repetition(block_len: usize, n_blocks: usize) -> Result<StabilizerCode> {
    if block_len < 2 || n_blocks < 2 {
        return Err(invalid("need at least 2 blocks of at least 2 qubits"));
    }
    let n = block_len * n_blocks;
    if n > crate::hilbert::pauli::MAX_QUBITS {
        return Err(invalid("code does not fit in a Pauli string"));
    }
    Ok(StabilizerCode {
        name: format!("repetition-{block_len}x{n_blocks}"),
        n_qubits: n,
        x_detecting_generators: inner_checks(block_len, n_blocks, Pauli::Z)?,
        z_detecting_generators: outer_checks(block_len, n_blocks, Pauli::X)?,
        logical_x: PauliString::uniform(n, first_of_each_block(block_len, n_blocks), Pauli::Z)?,
        logical_z: PauliString::uniform(n, block_sites(block_len, 1), Pauli::X)?,
        blocks: (1..=n_blocks).map(|b| block_sites(block_len, b).collect()).collect(),
        dx: block_len,
        dz: n_blocks,
        orientation: Orientation::Computational,
    })
}

/// The 15-qubit example: three blocks of five.
pub fn minimal15() -> StabilizerCode {
    let mut code = concatenated_repetition(5, 3).expect("fixed parameters are valid");
    code.name = "minimal15".into();
    code
}

/// `[[d^2, 1, d]]` Shor code with phase-flip blocks nested inside a
/// bit-flip code: `|0_L> = ((|+..+> + |-..->)/sqrt 2)^{(x)d}` and
/// `|1_L>` with the minus sign.
pub fn shor_code(d: usize) -> Result<StabilizerCode> {
    if d < 2 {
        return Err(invalid("Shor code needs d >= 2"));
    }
    let n = d * d;
    if n > crate::hilbert::pauli::MAX_QUBITS {
        return Err(invalid("code does not fit in a Pauli string"));
    }
    Ok(StabilizerCode {
        name: format!("shor-{d}"),
        n_qubits: n,
        x_detecting_generators: outer_checks(d, d, Pauli::Z)?,
        z_detecting_generators: inner_checks(d, d, Pauli::X)?,
        logical_x: PauliString::uniform(n, first_of_each_block(d, d), Pauli::X)?,
        logical_z: PauliString::uniform(n, block_sites(d, 1), Pauli::Z)?,
        blocks: (1..=d).map(|b| block_sites(d, b).collect()).collect(),
        dx: d,
        dz: d,
        orientation: Orientation::Hadamard,
    })
}

/// Every generator and both logicals commute with `Z^{(x)n}`.
pub fn parity_condition(code: &StabilizerCode) -> bool {
    let parity = PauliString::uniform(code.n_qubits, 1..=code.n_qubits, Pauli::Z).expect("valid sites");
    code.generators().chain([&code.logical_x, &code.logical_z]).all(|p| p.commutes_with(&parity))
}

/// Rank over GF(2) of the symplectic vectors of `ops`.
pub fn symplectic_rank(ops: &[PauliString]) -> usize {
    let mut rows: Vec<u128> = ops.iter().map(|p| (p.x_mask() as u128) << 64 | p.z_mask() as u128).collect();
    let mut rank = 0;
    for bit in (0..128).rev() {
        let pivot = 1u128 << bit;
        let Some(k) = (rank..rows.len()).find(|&k| rows[k] & pivot != 0) else { continue };
        rows.swap(rank, k);
        let r = rows[rank];
        for (j, row) in rows.iter_mut().enumerate() {
            if j != rank && *row & pivot != 0 {
                *row ^= r;
            }
        }
        rank += 1;
    }
    rank
}

impl StabilizerCode {
    pub fn generators(&self) -> impl Iterator<Item = &PauliString> {
        self.x_detecting_generators.iter().chain(&self.z_detecting_generators)
    }

    pub fn generator_count(&self) -> usize {
        self.x_detecting_generators.len() + self.z_detecting_generators.len()
    }

    /// `n - rank`, the number of encoded qubits.
    pub fn logical_qubits(&self) -> usize {
        let gens: Vec<PauliString> = self.generators().copied().collect();
        self.n_qubits - symplectic_rank(&gens)
    }

    /// Check commutation, independence and the logical algebra.
    pub fn validate(&self) -> Result<()> {
        let gens: Vec<&PauliString> = self.generators().collect();
        for p in gens.iter().chain([&&self.logical_x, &&self.logical_z]) {
            if p.n_qubits() != self.n_qubits || !p.is_hermitian() {
                return Err(invalid("operator is not a Hermitian string on the code's qubits"));
            }
        }
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(invalid(format!("generators {a} and {b} anticommute")));
                }
            }
            if !a.commutes_with(&self.logical_x) || !a.commutes_with(&self.logical_z) {
                return Err(invalid(format!("generator {a} anticommutes with a logical")));
            }
        }
        if self.logical_x.commutes_with(&self.logical_z) {
            return Err(invalid("logical X and Z commute"));
        }
        let owned: Vec<PauliString> = gens.iter().map(|p| **p).collect();
        if symplectic_rank(&owned) != owned.len() {
            return Err(invalid("generators are not independent"));
        }
        if self.x_detecting_generators.iter().any(|p| p.x_mask() != 0)
            || self.z_detecting_generators.iter().any(|p| p.z_mask() != 0)
        {
            return Err(invalid("generators are not of CSS form"));
        }
        Ok(())
    }

    /// Outcome bits (true = -1) of the bit-flip checks for an error `e`.
    pub fn x_syndrome(&self, e: &PauliString) -> Vec<bool> {
        self.x_detecting_generators.iter().map(|g| !g.commutes_with(e)).collect()
    }

    /// Outcome bits of the phase-flip checks for an error `e`.
    pub fn z_syndrome(&self, e: &PauliString) -> Vec<bool> {
        self.z_detecting_generators.iter().map(|g| !g.commutes_with(e)).collect()
    }

    /// 0-based block index containing 1-based `site`.
    pub fn block_of(&self, site: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&site))
    }

    /// The same code with qubit `j` relabelled `n + 1 - j`.
    pub fn reversed(&self) -> StabilizerCode {
        let n = self.n_qubits;
        let mut blocks: Vec<Vec<usize>> =
            self.blocks.iter().rev().map(|b| b.iter().rev().map(|&s| n + 1 - s).collect()).collect();
        blocks.iter_mut().for_each(|b| b.sort_unstable());
        StabilizerCode {
            name: format!("{}-reversed", self.name),
            n_qubits: n,
            x_detecting_generators: self.x_detecting_generators.iter().map(PauliString::reversed).collect(),
            z_detecting_generators: self.z_detecting_generators.iter().map(PauliString::reversed).collect(),
            logical_x: self.logical_x.reversed(),
            logical_z: self.logical_z.reversed(),
            blocks,
            dx: self.dx,
            dz: self.dz,
            orientation: self.orientation,
        }
    }

    /// Apply `prod (I + g)/2` over all generators.
    pub fn project(&self, state: &StateVector) -> Result<StateVector> {
        let mut psi = state.clone();
        for g in self.generators() {
            psi = half_sum(&psi, g)?;
        }
        Ok(psi)
    }

    /// The codewords `(|0_L>, |1_L>)`, with `|1_L> = X_L |0_L>`.
    pub fn codewords(&self) -> Result<(StateVector, StateVector)> {
        if self.n_qubits > MAX_STATE_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "{} qubits exceed the state-vector limit of {MAX_STATE_QUBITS}",
                self.n_qubits
            )));
        }
        let n = self.n_qubits;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [Complex64::new(h, 0.0), Complex64::new(h, 0.0)];
        let seeds = [StateVector::basis(n, 0)?, StateVector::product(&vec![plus; n])?];
        for seed in seeds {
            let mut zero = half_sum(&self.project(&seed)?, &self.logical_z)?;
            if zero.norm_sqr() > 1e-12 {
                zero.normalize();
                let one = apply_pauli(&zero, &self.logical_x)?;
                return Ok((zero, one));
            }
        }
        Err(invalid("could not construct codewords"))
    }

    /// `alpha |0_L> + beta |1_L>`.
    pub fn encode(&self, alpha: Complex64, beta: Complex64) -> Result<StateVector> {
        if ((alpha.norm_sqr() + beta.norm_sqr()) - 1.0).abs() > 1e-12 {
            return Err(invalid("logical amplitudes are not normalized"));
        }
        let (zero, one) = self.codewords()?;
        let amps =
            zero.amplitudes().iter().zip(one.amplitudes()).map(|(&a, &b)| alpha * a + beta * b).collect();
        StateVector::new(self.n_qubits, amps)
    }

    pub fn logical_readout(&self, state: &StateVector) -> Result<LogicalReadout> {
        if state.n_sites() != self.n_qubits {
            return Err(invalid("state size does not match the code"));
        }
        let (zero, one) = self.codewords()?;
        let alpha = zero.inner(state)?;
        let beta = one.inner(state)?;
        let weight = alpha.norm_sqr() + beta.norm_sqr();
        Ok(LogicalReadout {
            alpha,
            beta,
            codespace_weight: weight,
            in_codespace: weight >= 1.0 - CODESPACE_TOLERANCE,
        })
    }

    /// Tableau text. Pauli lines read `<role> <sign> <x-mask hex> <z-mask hex>`
    /// where site `n` is bit `n - 1`.
    pub fn to_tableau(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "code {}", self.name);
        let _ = writeln!(out, "qubits {}", self.n_qubits);
        let _ = writeln!(out, "orientation {}", self.orientation.as_str());
        let _ = writeln!(out, "distance {} {}", self.dx, self.dz);
        for b in &self.blocks {
            let sites: Vec<String> = b.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "block {}", sites.join(" "));
        }
        let mut line = |role: &str, p: &PauliString| {
            let sign = if p.phase_exponent() == 2 { '-' } else { '+' };
            let _ = writeln!(out, "{role} {sign} {:x} {:x}", p.x_mask(), p.z_mask());
        };
        self.x_detecting_generators.iter().for_each(|p| line("xdet", p));
        self.z_detecting_generators.iter().for_each(|p| line("zdet", p));
        line("logical_x", &self.logical_x);
        line("logical_z", &self.logical_z);
        out
    }

    pub fn from_tableau(text: &str) -> Result<StabilizerCode> {
        let bad = |l: &str| Error::Parse(format!("bad tableau line {l:?}"));
        let mut name = None;
        let mut n = None;
        let mut orientation = None;
        let mut dist = None;
        let mut blocks = Vec::new();
        let mut xdet = Vec::new();
        let mut zdet = Vec::new();
        let mut lx = None;
        let mut lz = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| bad(line));
            match f[0] {
                "code" if f.len() == 2 => name = Some(f[1].to_string()),
                "qubits" if f.len() == 2 => n = Some(num(f[1])?),
                "orientation" if f.len() == 2 => {
                    orientation = Some(match f[1] {
                        "computational" => Orientation::Computational,
                        "hadamard" => Orientation::Hadamard,
                        _ => return Err(bad(line)),
                    })
                }
                "distance" if f.len() == 3 => dist = Some((num(f[1])?, num(f[2])?)),
                "block" => blocks.push(f[1..].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?),
                role if f.len() == 4 => {
                    let n = n.ok_or_else(|| bad(line))?;
                    let x = u64::from_str_radix(f[2], 16).map_err(|_| bad(line))?;
                    let z = u64::from_str_radix(f[3], 16).map_err(|_| bad(line))?;
                    let phase = match f[1] {
                        "+" => 0,
                        "-" => 2,
                        _ => return Err(bad(line)),
                    };
                    let p = PauliString::from_masks(n, x, z, phase)?;
                    match role {
                        "xdet" => xdet.push(p),
                        "zdet" => zdet.push(p),
                        "logical_x" => lx = Some(p),
                        "logical_z" => lz = Some(p),
                        _ => return Err(bad(line)),
                    }
                }
                _ => return Err(bad(line)),
            }
        }
        let missing = || Error::Parse("incomplete tableau".into());
        let (dx, dz) = dist.ok_or_else(missing)?;
        let code = StabilizerCode {
            name: name.ok_or_else(missing)?,
            n_qubits: n.ok_or_else(missing)?,
            x_detecting_generators: xdet,
            z_detecting_generators: zdet,
            logical_x: lx.ok_or_else(missing)?,
            logical_z: lz.ok_or_else(missing)?,
            blocks,
            dx,
            dz,
            orientation: orientation.ok_or_else(missing)?,
        };
        code.validate()?;
        Ok(code)
    }
}

/// `(psi + g psi) / 2`.
fn half_sum(psi: &StateVector, g: &PauliString) -> Result<StateVector> {
    let image = apply_pauli(psi, g)?;
    let amps = psi.amplitudes().iter().zip(image.amplitudes()).map(|(a, b)| (a + b) * 0.5).collect();
    StateVector::new(psi.n_sites(), amps)
}
