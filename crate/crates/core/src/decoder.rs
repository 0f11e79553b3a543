//! Syndrome decoding adapted to errors that arrive as Majorana modes.
//!
//! Bit flips are located with the code's Z-type checks and undone together
//! with the Jordan-Wigner string they drag along ("trailing Z"). Remaining
//! phase errors sit on the detected flip sites or on a single site, and are
//! removed with the X-type checks.
//!
//! Branches are tracked exactly: every syndrome outcome with nonzero
//! probability is followed. Internally a branch is a sparse, unnormalized
//! vector whose squared norm is the branch probability.

use std::collections::HashMap;
use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{analyze_transfer, ChainSpec, DEFAULT_TRANSFER_TOLERANCE};
use crate::code::StabilizerCode;
use crate::error::{invalid, Result};
use crate::hilbert::{cz_network, Pauli, PauliString, StateVector};
use crate::noise::{run_scenario, ErrorScenario};

/// Branches lighter than this are treated as exact zeros (rounding dust).
const NEGLIGIBLE: f64 = 1e-28;

/// Default fidelity threshold for the counting variant of success.
pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 1e-9;

/// Side of a detected flip that carries the trailing Z string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrailingOrientation {
    /// Z on sites below each flip: the raw Jordan-Wigner string, seen after a
    /// revival or before any mirroring.
    Revival,
    /// Z on sites above each flip, as left by the controlled-phase network
    /// after a mirrored transfer.
    PostCz,
}

/// One leaf of a syndrome measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SyndromeBranch {
    /// Outcome per generator, `true` for eigenvalue -1.
    pub outcomes: Vec<bool>,
    pub probability: f64,
    pub post_state: StateVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub branches: Vec<SyndromeBranch>,
    pub pruned_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XStageOutcome {
    pub flip_sites: Vec<usize>,
    pub correction: PauliString,
    pub uncorrectable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZStageOutcome {
    pub correction: PauliString,
    /// The phase correction was placed on detected flip sites.
    pub cross_referenced: bool,
    pub uncorrectable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchRecord {
    pub x_syndrome: String,
    pub z_syndrome: String,
    pub probability: f64,
    pub correction: PauliString,
    pub fidelity: f64,
    pub uncorrectable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionReport {
    pub branches: Vec<BranchRecord>,
    /// `sum probability * fidelity`.
    pub success_probability: f64,
    /// Probability of branches whose fidelity exceeds `1 - threshold`.
    pub threshold_success: f64,
    pub threshold: f64,
    /// Total probability of the tracked leaves.
    pub total_probability: f64,
    pub pruned_mass: f64,
    pub uncorrectable_mass: f64,
    pub x_branch_count: usize,
    pub leaf_count: usize,
}

impl CorrectionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// How the arriving state relates to the code.
#[derive(Debug, Clone, PartialEq)]
pub enum DecodeMode {
    /// The state lives on exactly the code's qubits in their original order.
    Revival,
    /// The state lives on a longer chain; the code arrived mirrored on the
    /// final `n_qubits` sites. `mirror_phases[n-1]` is the phase picked up by
    /// an excitation moving from site `n` to its mirror image.
    General { mirror_phases: Vec<Complex64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOptions {
    pub mode: DecodeMode,
    /// Logical amplitudes the decoded state is compared against.
    pub logical: (Complex64, Complex64),
    /// Branches with smaller probability are dropped and their mass reported.
    pub prune_below: f64,
    /// Trailing-Z side; defaults by mode when `None`.
    pub orientation: Option<TrailingOrientation>,
    pub success_threshold: f64,
    pub record_branches: bool,
}

impl DecodeOptions {
    pub fn revival(alpha: Complex64, beta: Complex64) -> Self {
        DecodeOptions {
            mode: DecodeMode::Revival,
            logical: (alpha, beta),
            prune_below: 0.0,
            orientation: None,
            success_threshold: DEFAULT_SUCCESS_THRESHOLD,
            record_branches: false,
        }
    }

    pub fn general(alpha: Complex64, beta: Complex64, mirror_phases: Vec<Complex64>) -> Self {
        DecodeOptions { mode: DecodeMode::General { mirror_phases }, ..Self::revival(alpha, beta) }
    }

    fn orientation(&self) -> TrailingOrientation {
        self.orientation.unwrap_or(match self.mode {
            DecodeMode::Revival => TrailingOrientation::Revival,
            DecodeMode::General { .. } => TrailingOrientation::PostCz,
        })
    }
}

/// Unnormalized sparse state; the squared norm is the branch weight.
#[derive(Debug, Clone, Default)]
struct Sparse {
    entries: Vec<(u64, Complex64)>,
}

impl Sparse {
    fn from_dense(state: &StateVector) -> Self {
        let entries = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(b, &a)| (b as u64, a))
            .collect();
        Sparse { entries }
    }

    fn weight(&self) -> f64 {
        self.entries.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    fn apply(&mut self, p: &PauliString) {
        let (ix, iz) = p.index_masks();
        let yp = p.y_phase();
        for (b, a) in self.entries.iter_mut() {
            let (c, target) = PauliString::act_on_index(ix, iz, yp, *b);
            *b = target;
            *a *= c;
        }
    }

    /// Split into the `+1` and `-1` eigenspaces of `g`.
    fn split(&self, g: &PauliString) -> (Sparse, Sparse) {
        let (ix, iz) = g.index_masks();
        let yp = g.y_phase();
        let mut image: HashMap<u64, Complex64> = HashMap::with_capacity(self.entries.len());
        for &(b, a) in &self.entries {
            let (c, target) = PauliString::act_on_index(ix, iz, yp, b);
            *image.entry(target).or_default() += c * a;
        }
        let mut plus: HashMap<u64, Complex64> = HashMap::with_capacity(self.entries.len());
        let mut minus: HashMap<u64, Complex64> = HashMap::with_capacity(self.entries.len());
        for &(b, a) in &self.entries {
            *plus.entry(b).or_default() += a * 0.5;
            *minus.entry(b).or_default() += a * 0.5;
        }
        for (b, ga) in image {
            *plus.entry(b).or_default() += ga * 0.5;
            *minus.entry(b).or_default() -= ga * 0.5;
        }
        let finish = |m: HashMap<u64, Complex64>| {
            let mut entries: Vec<(u64, Complex64)> = m.into_iter().filter(|(_, a)| a.norm_sqr() > 0.0).collect();
            entries.sort_unstable_by_key(|e| e.0);
            Sparse { entries }
        };
        (finish(plus), finish(minus))
    }

    fn to_dense(&self, n_sites: usize) -> Result<StateVector> {
        let mut v = StateVector::zeros(n_sites)?;
        let amps = v.amplitudes_mut();
        for &(b, a) in &self.entries {
            amps[b as usize] += a;
        }
        v.normalize();
        Ok(v)
    }
}

fn bits_string(bits: u64, len: usize) -> String {
    (0..len).map(|i| if bits >> i & 1 == 1 { '1' } else { '0' }).collect()
}

fn bits_vec(bits: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| bits >> i & 1 == 1).collect()
}

fn bits_from(outcomes: &[bool]) -> u64 {
    outcomes.iter().enumerate().fold(0, |m, (i, &o)| if o { m | 1 << i } else { m })
}

fn check_commuting(generators: &[PauliString]) -> Result<()> {
    for (i, a) in generators.iter().enumerate() {
        for b in &generators[i + 1..] {
            if !a.commutes_with(b) {
                return Err(invalid(format!("generators {a} and {b} do not commute")));
            }
        }
    }
    Ok(())
}

/// Sequential projective measurement of every generator, following all
/// outcomes with nonzero probability.
fn split_all(root: Sparse, generators: &[PauliString], prune_below: f64) -> (Vec<(u64, Sparse)>, f64) {
    let mut leaves = vec![(0u64, root)];
    let mut pruned = 0.0;
    for (i, g) in generators.iter().enumerate() {
        let mut next = Vec::with_capacity(leaves.len() * 2);
        for (bits, s) in leaves {
            let (plus, minus) = s.split(g);
            for (outcome, part) in [(0u64, plus), (1u64, minus)] {
                let w = part.weight();
                if w < prune_below || w < NEGLIGIBLE {
                    pruned += w;
                } else {
                    next.push((bits | outcome << i, part));
                }
            }
        }
        leaves = next;
    }
    (leaves, pruned)
}

/// Projective measurement of commuting `generators` on `state`.
pub fn measure_generators(state: &StateVector, generators: &[PauliString], prune_below: f64) -> Result<Measurement> {
    check_commuting(generators)?;
    if let Some(g) = generators.iter().find(|g| g.n_qubits() != state.n_sites()) {
        return Err(invalid(format!("generator {g} does not match the state size")));
    }
    let (leaves, pruned_mass) = split_all(Sparse::from_dense(state), generators, prune_below);
    let branches = leaves
        .into_iter()
        .map(|(bits, s)| {
            Ok(SyndromeBranch {
                outcomes: bits_vec(bits, generators.len()),
                probability: s.weight(),
                post_state: s.to_dense(state.n_sites())?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Measurement { branches, pruned_mass })
}

/// Cached lookup tables for one code.
#[derive(Debug, Clone)]
pub struct SyndromeDecoder {
    code: StabilizerCode,
    /// Bit-flip syndrome -> minimum-weight flip sites (weight <= 2).
    x_table: HashMap<u64, Vec<usize>>,
    /// Phase-flip syndrome -> a single site carrying Z.
    z_table: HashMap<u64, usize>,
}

/// Flips a single bit-flip stage can locate; observation (I) bounds
/// single-error arrivals by two.
const MAX_LOCATED_FLIPS: usize = 2;

impl SyndromeDecoder {
    pub fn new(code: &StabilizerCode) -> Self {
        let n = code.n_qubits;
        let mut x_table = HashMap::new();
        x_table.insert(0u64, Vec::new());
        let xsyn = |sites: &[usize]| {
            let e = PauliString::uniform(n, sites.iter().copied(), Pauli::X).expect("valid sites");
            bits_from(&code.x_syndrome(&e))
        };
        for a in 1..=n {
            x_table.entry(xsyn(&[a])).or_insert_with(|| vec![a]);
        }
        if MAX_LOCATED_FLIPS >= 2 {
            for a in 1..=n {
                for b in a + 1..=n {
                    x_table.entry(xsyn(&[a, b])).or_insert_with(|| vec![a, b]);
                }
            }
        }
        let mut z_table = HashMap::new();
        for a in 1..=n {
            let e = PauliString::single(n, a, Pauli::Z).expect("valid site");
            let s = bits_from(&code.z_syndrome(&e));
            if s != 0 {
                z_table.entry(s).or_insert(a);
            }
        }
        SyndromeDecoder { code: code.clone(), x_table, z_table }
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    /// X at each located flip plus the trailing Z string.
    pub fn x_stage(&self, syndrome: &[bool], orientation: TrailingOrientation) -> XStageOutcome {
        let n = self.code.n_qubits;
        let Some(flips) = self.x_table.get(&bits_from(syndrome)) else {
            return XStageOutcome { flip_sites: Vec::new(), correction: PauliString::identity(n), uncorrectable: true };
        };
        let mut ops: Vec<(usize, Pauli)> = flips.iter().map(|&s| (s, Pauli::X)).collect();
        for p in 1..=n {
            if flips.contains(&p) {
                continue;
            }
            let count = match orientation {
                TrailingOrientation::Revival => flips.iter().filter(|&&s| s > p).count(),
                TrailingOrientation::PostCz => flips.iter().filter(|&&s| s < p).count(),
            };
            if count % 2 == 1 {
                ops.push((p, Pauli::Z));
            }
        }
        XStageOutcome {
            flip_sites: flips.clone(),
            correction: PauliString::from_ops(n, &ops).expect("distinct sites"),
            uncorrectable: false,
        }
    }

    /// Phase correction given the phase-flip syndrome and the flip sites the
    /// bit-flip stage found.
    ///
    /// Residual phase errors sit on a subset of the flip sites (the X/Y
    /// ambiguity) or on one site when no flip was seen. A subset of flip
    /// sites reproducing the syndrome is preferred; this is the rule "a Z
    /// detected on a block without flips means Z on the two other blocks".
    pub fn z_stage(&self, syndrome: &[bool], flip_sites: &[usize]) -> ZStageOutcome {
        let n = self.code.n_qubits;
        let target = bits_from(syndrome);
        if target == 0 {
            return ZStageOutcome { correction: PauliString::identity(n), cross_referenced: false, uncorrectable: false };
        }
        let k = flip_sites.len().min(16);
        let mut subsets: Vec<u32> = (1..1u32 << k).collect();
        subsets.sort_by_key(|s| s.count_ones());
        for s in subsets {
            let sites: Vec<usize> = (0..k).filter(|i| s >> i & 1 == 1).map(|i| flip_sites[i]).collect();
            let e = PauliString::uniform(n, sites, Pauli::Z).expect("valid sites");
            if bits_from(&self.code.z_syndrome(&e)) == target {
                return ZStageOutcome { correction: e, cross_referenced: true, uncorrectable: false };
            }
        }
        match self.z_table.get(&target) {
            Some(&site) => ZStageOutcome {
                correction: PauliString::single(n, site, Pauli::Z).expect("valid site"),
                cross_referenced: false,
                uncorrectable: false,
            },
            None => ZStageOutcome { correction: PauliString::identity(n), cross_referenced: false, uncorrectable: true },
        }
    }
}

/// Bit-flip stage for a branch measured with `code.x_detecting_generators`.
pub fn x_stage(branch: &SyndromeBranch, code: &StabilizerCode, orientation: TrailingOrientation) -> Result<XStageOutcome> {
    if branch.outcomes.len() != code.x_detecting_generators.len() {
        return Err(invalid("branch outcomes do not match the bit-flip checks"));
    }
    Ok(SyndromeDecoder::new(code).x_stage(&branch.outcomes, orientation))
}

/// Phase-flip stage for a branch measured with `code.z_detecting_generators`.
pub fn z_stage(branch: &SyndromeBranch, code: &StabilizerCode, flip_sites: &[usize]) -> Result<ZStageOutcome> {
    if branch.outcomes.len() != code.z_detecting_generators.len() {
        return Err(invalid("branch outcomes do not match the phase-flip checks"));
    }
    Ok(SyndromeDecoder::new(code).z_stage(&branch.outcomes, flip_sites))
}

/// Run the full correction procedure on `state`.
pub fn decode_pipeline(state: &StateVector, code: &StabilizerCode, options: &DecodeOptions) -> Result<CorrectionReport> {
    let decoder = match options.mode {
        DecodeMode::Revival => SyndromeDecoder::new(code),
        DecodeMode::General { .. } => SyndromeDecoder::new(&code.reversed()),
    };
    decode_with(state, &decoder, options)
}

/// As [`decode_pipeline`] with a prepared decoder. In general mode the
/// decoder must be built from the reversed code.
pub fn decode_with(state: &StateVector, decoder: &SyndromeDecoder, options: &DecodeOptions) -> Result<CorrectionReport> {
    let code = decoder.code();
    let m = code.n_qubits;
    let n = state.n_sites();
    let (alpha, beta) = options.logical;
    let orientation = options.orientation();

    let (prepared, region) = match &options.mode {
        DecodeMode::Revival => {
            if n != m {
                return Err(invalid("revival decoding needs the state on exactly the code's qubits"));
            }
            (state.clone(), 1..=n)
        }
        DecodeMode::General { mirror_phases } => {
            if n < m {
                return Err(invalid("chain shorter than the code"));
            }
            if mirror_phases.len() != n {
                return Err(invalid("need one mirror phase per site"));
            }
            let region = n + 1 - m..=n;
            let mut s = cz_network(state, region.clone())?;
            undo_mirror_phases(&mut s, mirror_phases, &region);
            (s, region)
        }
    };
    let offset = region.start() - 1;
    let embed = |p: &PauliString| p.embed(n, offset);
    let x_gens: Vec<PauliString> = code.x_detecting_generators.iter().map(embed).collect::<Result<_>>()?;
    let z_gens: Vec<PauliString> = code.z_detecting_generators.iter().map(embed).collect::<Result<_>>()?;
    let reference = code.encode(alpha, beta)?;

    let x_groups = group_by_diagonal(&prepared, &x_gens);
    let mut report = CorrectionReport {
        branches: Vec::new(),
        success_probability: 0.0,
        threshold_success: 0.0,
        threshold: options.success_threshold,
        total_probability: 0.0,
        pruned_mass: 0.0,
        uncorrectable_mass: 0.0,
        x_branch_count: 0,
        leaf_count: 0,
    };
    for (x_bits, mut branch) in x_groups {
        let w = branch.weight();
        if w < options.prune_below || w < NEGLIGIBLE {
            report.pruned_mass += w;
            continue;
        }
        report.x_branch_count += 1;
        let xs = decoder.x_stage(&bits_vec(x_bits, x_gens.len()), orientation);
        branch.apply(&embed(&xs.correction)?);
        let (leaves, pruned) = split_all(branch, &z_gens, options.prune_below);
        report.pruned_mass += pruned;
        for (z_bits, mut leaf) in leaves {
            let zs = decoder.z_stage(&bits_vec(z_bits, z_gens.len()), &xs.flip_sites);
            leaf.apply(&embed(&zs.correction)?);
            let probability = leaf.weight();
            let overlap = region_overlap(&leaf, &reference, n, &region);
            let fidelity = (overlap / probability).clamp(0.0, 1.0);
            let uncorrectable = xs.uncorrectable || zs.uncorrectable;
            report.leaf_count += 1;
            report.total_probability += probability;
            report.success_probability += probability * fidelity;
            if fidelity > 1.0 - options.success_threshold {
                report.threshold_success += probability;
            }
            if uncorrectable {
                report.uncorrectable_mass += probability;
            }
            if options.record_branches {
                report.branches.push(BranchRecord {
                    x_syndrome: bits_string(x_bits, x_gens.len()),
                    z_syndrome: bits_string(z_bits, z_gens.len()),
                    probability,
                    correction: &zs.correction * &xs.correction,
                    fidelity,
                    uncorrectable,
                });
            }
        }
    }
    Ok(report)
}

/// Multiply each region site's `|1>` amplitude by the conjugate of the
/// mirror phase of the site it came from.
fn undo_mirror_phases(state: &mut StateVector, mirror_phases: &[Complex64], region: &RangeInclusive<usize>) {
    let n = state.n_sites();
    let factors: Vec<(u64, Complex64)> =
        region.clone().map(|s| (1u64 << (n - s), mirror_phases[n - s].conj())).collect();
    for (b, a) in state.amplitudes_mut().iter_mut().enumerate() {
        for &(bit, f) in &factors {
            if b as u64 & bit != 0 {
                *a *= f;
            }
        }
    }
}

/// Partition amplitudes by the outcomes of diagonal generators.
fn group_by_diagonal(state: &StateVector, generators: &[PauliString]) -> Vec<(u64, Sparse)> {
    let masks: Vec<(u64, u64, u8)> = generators
        .iter()
        .map(|g| {
            let (ix, iz) = g.index_masks();
            (ix, iz, g.y_phase())
        })
        .collect();
    let mut groups: HashMap<u64, Sparse> = HashMap::new();
    for (b, &a) in state.amplitudes().iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let bits = masks.iter().enumerate().fold(0u64, |acc, (i, &(ix, iz, yp))| {
            let (c, _) = PauliString::act_on_index(ix, iz, yp, b as u64);
            if c.re < 0.0 {
                acc | 1 << i
            } else {
                acc
            }
        });
        groups.entry(bits).or_default().entries.push((b as u64, a));
    }
    let mut out: Vec<(u64, Sparse)> = groups.into_iter().collect();
    out.sort_unstable_by_key(|g| g.0);
    out
}

/// `<ref| rho_region |ref>` for the unnormalized sparse state.
fn region_overlap(state: &Sparse, reference: &StateVector, n: usize, region: &RangeInclusive<usize>) -> f64 {
    let shift = n - region.end();
    let width = region.end() + 1 - region.start();
    let mask = ((1u64 << width) - 1) << shift;
    let refs = reference.amplitudes();
    let mut by_rest: HashMap<u64, Complex64> = HashMap::new();
    for &(b, a) in &state.entries {
        let r = ((b & mask) >> shift) as usize;
        *by_rest.entry(b & !mask).or_default() += refs[r].conj() * a;
    }
    by_rest.values().map(|z| z.norm_sqr()).sum()
}

/// Where the code starts and where it is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetupKind {
    /// Chain of exactly the code's length, read out after `2 t0` on the
    /// original sites.
    Revival,
    /// Code on sites `1..=M` of a chain of length `N >= M`, read out after
    /// `t0` on the final `M` sites.
    General,
}

/// Everything needed to run one encoded transfer on a chain.
#[derive(Debug, Clone)]
pub struct TransferSetup {
    pub kind: SetupKind,
    pub spec: ChainSpec,
    pub code: StabilizerCode,
    pub transfer_time: f64,
    pub mirror_phases: Vec<Complex64>,
    decoder: Arc<SyndromeDecoder>,
}

impl TransferSetup {
    pub fn new(kind: SetupKind, spec: &ChainSpec, code: &StabilizerCode) -> Result<Self> {
        code.validate()?;
        let n = spec.n_sites;
        let m = code.n_qubits;
        match kind {
            SetupKind::Revival if n != m => {
                return Err(invalid(format!("revival setup needs {m} sites, chain has {n}")));
            }
            SetupKind::General if n < m => return Err(invalid("chain shorter than the code")),
            _ => {}
        }
        let report = analyze_transfer(spec, DEFAULT_TRANSFER_TOLERANCE)?;
        if !report.perfect {
            return Err(invalid("chain does not transfer perfectly"));
        }
        let decoder = match kind {
            SetupKind::Revival => SyndromeDecoder::new(code),
            SetupKind::General => SyndromeDecoder::new(&code.reversed()),
        };
        Ok(TransferSetup {
            kind,
            spec: spec.clone(),
            code: code.clone(),
            transfer_time: report.transfer_time,
            mirror_phases: report.mirror_phases,
            decoder: Arc::new(decoder),
        })
    }

    pub fn revival(spec: &ChainSpec, code: &StabilizerCode) -> Result<Self> {
        Self::new(SetupKind::Revival, spec, code)
    }

    pub fn general(spec: &ChainSpec, code: &StabilizerCode) -> Result<Self> {
        Self::new(SetupKind::General, spec, code)
    }

    /// Nominal readout time: `2 t0` for revival, `t0` otherwise.
    pub fn total_time(&self) -> f64 {
        match self.kind {
            SetupKind::Revival => 2.0 * self.transfer_time,
            SetupKind::General => self.transfer_time,
        }
    }

    pub fn decoder(&self) -> &SyndromeDecoder {
        &self.decoder
    }

    /// Encoded logical state on the first `M` sites, `|0>` elsewhere.
    pub fn initial_state(&self, alpha: Complex64, beta: Complex64) -> Result<StateVector> {
        let encoded = self.code.encode(alpha, beta)?;
        let rest = self.spec.n_sites - self.code.n_qubits;
        if rest == 0 {
            Ok(encoded)
        } else {
            encoded.tensor(&StateVector::basis(rest, 0)?)
        }
    }

    pub fn options(&self, alpha: Complex64, beta: Complex64) -> DecodeOptions {
        match self.kind {
            SetupKind::Revival => DecodeOptions::revival(alpha, beta),
            SetupKind::General => DecodeOptions::general(alpha, beta, self.mirror_phases.clone()),
        }
    }

    /// Run `scenario` on the encoded input and decode the arriving state.
    pub fn run(&self, logical: (Complex64, Complex64), scenario: &ErrorScenario, prune_below: f64) -> Result<CorrectionReport> {
        Ok(self.run_with_diagnostic(logical, scenario, prune_below)?.0)
    }

    /// As [`TransferSetup::run`], also returning the scenario's diagnostic
    /// (see [`crate::noise::ScenarioOutcome`]).
    pub fn run_with_diagnostic(
        &self,
        logical: (Complex64, Complex64),
        scenario: &ErrorScenario,
        prune_below: f64,
    ) -> Result<(CorrectionReport, f64)> {
        let (alpha, beta) = logical;
        let input = self.initial_state(alpha, beta)?;
        let arrived = run_scenario(&input, &self.spec, self.total_time(), scenario)?;
        let mut options = self.options(alpha, beta);
        options.prune_below = prune_below;
        Ok((decode_with(&arrived.state, &self.decoder, &options)?, arrived.diagnostic))
    }
}

/// Probability that the encoded logical state arrives perfectly under
/// `scenario`. Uses the revival setup when the chain matches the code length
/// and the general setup otherwise.
pub fn success_probability(
    logical: (Complex64, Complex64),
    scenario: &ErrorScenario,
    code: &StabilizerCode,
    spec: &ChainSpec,
) -> Result<f64> {
    let kind = if spec.n_sites == code.n_qubits { SetupKind::Revival } else { SetupKind::General };
    let setup = TransferSetup::new(kind, spec, code)?;
    Ok(setup.run(logical, scenario, 0.0)?.success_probability)
}
