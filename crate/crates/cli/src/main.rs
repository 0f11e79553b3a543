//! `chainqec`: run the transfer, decoding and noise experiments from the
//! command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chainqec::chain::{analyze_transfer, pst_couplings, ChainSpec, DEFAULT_TRANSFER_TOLERANCE};
use chainqec::code::{parity_condition, symplectic_rank, StabilizerCode};
use chainqec::decoder::{SetupKind, TransferSetup};
use chainqec::harness::{self, CsvRow, Experiment, ExperimentManifest};
use chainqec::hilbert::{evolve, fidelity, StateVector};
use chainqec::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "chainqec", version, about = "Error-corrected state transfer on spin chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transfer time, mirror fidelity and phases of a chain.
    TransferCheck(Common),
    /// Single Z error at a random site and time.
    SingleZ(Common),
    /// Success probability against readout-time offsets.
    TimingSweep(Common),
    /// Success probability against static coupling disorder.
    CouplingSweep(Common),
    /// Master-equation check of the mode decay law.
    Dephasing(DephasingArgs),
    /// Generators, distances and parity of a code.
    CodeInfo(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Chain file (TOML or JSON); defaults to the perfect-transfer chain
    /// matching the code length.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = harness::DEFAULT_SEED)]
    seed: u64,
    /// Samples (single-z) or disorder instances per point (coupling-sweep).
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Drop syndrome branches lighter than this (0 keeps all).
    #[arg(long, default_value_t = 0.0)]
    prune: f64,
    /// `minimal15`, `repetition-LxB`, `shor-d` or a tableau file.
    #[arg(long, default_value = "minimal15")]
    code: String,
    /// Readout scheme; defaults to revival when the chain matches the code.
    #[arg(long, value_enum)]
    setup: Option<SetupArg>,
    #[arg(long, value_enum, default_value_t = LogicalArg::Plus)]
    logical: LogicalArg,
    /// Comma-separated sweep values; defaults to the documented grids.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone)]
struct DephasingArgs {
    #[arg(long, default_value_t = 5)]
    sites: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.01, 0.1])]
    gamma: Vec<f64>,
    #[arg(long, default_value_t = 21)]
    time_points: usize,
    /// Runge-Kutta step; defaults to the integrator's choice.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SetupArg {
    Revival,
    General,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum LogicalArg {
    Zero,
    One,
    Plus,
    PlusI,
}

impl LogicalArg {
    fn amplitudes(self) -> (Complex64, Complex64) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            LogicalArg::Zero => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            LogicalArg::One => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
            LogicalArg::Plus => (Complex64::new(h, 0.0), Complex64::new(h, 0.0)),
            LogicalArg::PlusI => (Complex64::new(h, 0.0), Complex64::new(0.0, h)),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let body = json!({ "error": { "kind": "usage", "message": e.to_string().trim_end() } });
            eprintln!("{body}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(value) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("JSON values serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": { "kind": e.kind(), "message": e.to_string() } }));
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<Value> {
    match command {
        Command::TransferCheck(c) => transfer_check(&c),
        Command::CodeInfo(c) => code_info(&c),
        Command::SingleZ(c) => single_z(&c),
        Command::TimingSweep(c) => timing_sweep(&c),
        Command::CouplingSweep(c) => coupling_sweep(&c),
        Command::Dephasing(d) => dephasing(&d),
    }
}

fn load_chain(c: &Common, default_sites: usize) -> Result<ChainSpec> {
    match &c.config {
        Some(path) => ChainSpec::load(path),
        None => pst_couplings(default_sites, 1.0),
    }
}

fn prepare(c: &Common) -> Result<(TransferSetup, StabilizerCode)> {
    let code = harness::code_from_id(&c.code)?;
    let spec = load_chain(c, code.n_qubits)?;
    let kind = match c.setup {
        Some(SetupArg::Revival) => SetupKind::Revival,
        Some(SetupArg::General) => SetupKind::General,
        None if spec.n_sites == code.n_qubits => SetupKind::Revival,
        None => SetupKind::General,
    };
    Ok((TransferSetup::new(kind, &spec, &code)?, code))
}

fn manifest(c: &Common, setup: &TransferSetup, experiment: Experiment, grid: Vec<f64>, samples: u64, outputs: Vec<PathBuf>) -> ExperimentManifest {
    ExperimentManifest {
        version: harness::SOFTWARE_VERSION.into(),
        format: harness::MANIFEST_FORMAT,
        experiment,
        chain: setup.spec.clone(),
        code: Some(c.code.clone()),
        setup: Some(setup.kind),
        logical: Some(c.logical.amplitudes()),
        grid,
        samples,
        seed: c.seed,
        prune: c.prune,
        outputs,
    }
}

/// Write `rows` (or resume them) in the requested format and the manifest
/// next to them; returns the manifest as JSON.
fn persist<R, F>(out: &Path, name: &str, format: Format, total: usize, compute: F, m: impl FnOnce(Vec<PathBuf>) -> ExperimentManifest) -> Result<(Vec<R>, Value)>
where
    R: CsvRow + Send + serde::Serialize,
    F: Fn(usize) -> Result<R> + Sync,
{
    std::fs::create_dir_all(out)?;
    let (rows, data_path) = match format {
        Format::Csv => {
            let path = out.join(format!("{name}.csv"));
            (harness::run_resumable(&path, total, compute)?, path)
        }
        Format::Json => {
            let rows = (0..total).map(&compute).collect::<Result<Vec<R>>>()?;
            let path = out.join(format!("{name}.json"));
            std::fs::write(&path, serde_json::to_string_pretty(&rows)? + "\n")?;
            (rows, path)
        }
    };
    let manifest_path = out.join(format!("{name}.manifest.json"));
    let manifest = m(vec![data_path, manifest_path.clone()]);
    manifest.write(&manifest_path)?;
    Ok((rows, serde_json::to_value(&manifest)?))
}

fn transfer_check(c: &Common) -> Result<Value> {
    let code = harness::code_from_id(&c.code)?;
    let spec = load_chain(c, code.n_qubits)?;
    let report = analyze_transfer(&spec, DEFAULT_TRANSFER_TOLERANCE)?;
    let n = spec.n_sites;
    let excitation_fidelity = if n <= 20 {
        let out = evolve(&StateVector::excited(n, &[1])?, &spec, report.transfer_time, 1e-13)?;
        Some(fidelity(&out, &StateVector::excited(n, &[n])?)?)
    } else {
        None
    };
    Ok(json!({
        "version": harness::SOFTWARE_VERSION,
        "chain": spec,
        "transfer": report,
        "excitation_fidelity": excitation_fidelity,
    }))
}

fn code_info(c: &Common) -> Result<Value> {
    let code = harness::code_from_id(&c.code)?;
    code.validate()?;
    let gens: Vec<_> = code.generators().cloned().collect();
    Ok(json!({
        "version": harness::SOFTWARE_VERSION,
        "name": code.name,
        "n_qubits": code.n_qubits,
        "generators": code.generator_count(),
        "independent_generators": symplectic_rank(&gens),
        "logical_qubits": code.logical_qubits(),
        "dx": code.dx,
        "dz": code.dz,
        "parity_condition": parity_condition(&code),
        "tableau": code.to_tableau(),
    }))
}

fn single_z(c: &Common) -> Result<Value> {
    let (setup, _) = prepare(c)?;
    let samples = c.samples.unwrap_or(harness::DEFAULT_SINGLE_Z_SAMPLES);
    let logical = c.logical.amplitudes();
    let compute = |i: usize| harness::single_z_sample(&setup, logical, c.seed, i as u64, c.prune);
    let (rows, m) = persist(&c.out, "single_z", c.format, samples as usize, compute, |outs| {
        manifest(c, &setup, Experiment::SingleZ, Vec::new(), samples, outs)
    })?;
    let summary = harness::SingleZSummary::from_records(rows);
    Ok(json!({
        "manifest": m,
        "samples": summary.samples,
        "min_success": summary.min_success,
        "mean_success": summary.mean_success,
    }))
}

fn timing_sweep(c: &Common) -> Result<Value> {
    let (setup, _) = prepare(c)?;
    let grid = c.grid.clone().unwrap_or_else(|| harness::default_timing_grid(setup.transfer_time));
    let logical = c.logical.amplitudes();
    let compute = |i: usize| harness::timing_point(&setup, grid[i], logical, c.prune);
    let (rows, m) = persist(&c.out, "timing", c.format, grid.len(), compute, |outs| {
        manifest(c, &setup, Experiment::TimingSweep, grid.clone(), 0, outs)
    })?;
    Ok(json!({ "manifest": m, "points": rows }))
}

fn coupling_sweep(c: &Common) -> Result<Value> {
    let (setup, _) = prepare(c)?;
    let grid = c.grid.clone().unwrap_or_else(harness::default_coupling_grid);
    let instances = c.samples.unwrap_or(harness::DEFAULT_COUPLING_INSTANCES);
    let logical = c.logical.amplitudes();
    let compute = |i: usize| harness::coupling_point(&setup, grid[i], instances, c.seed, logical, c.prune);
    let (rows, m) = persist(&c.out, "coupling", c.format, grid.len(), compute, |outs| {
        manifest(c, &setup, Experiment::CouplingSweep, grid.clone(), instances, outs)
    })?;
    Ok(json!({ "manifest": m, "points": rows }))
}

fn dephasing(d: &DephasingArgs) -> Result<Value> {
    let config = harness::DephasingConfig { duration: None, time_points: d.time_points, step: d.step };
    let report = harness::exp_dephasing(d.sites, &d.gamma, &config)?;
    std::fs::create_dir_all(&d.out)?;
    let data_path = match d.format {
        Format::Csv => {
            let path = d.out.join("dephasing.csv");
            harness::write_rows(&path, &report.points)?;
            path
        }
        Format::Json => {
            let path = d.out.join("dephasing.json");
            std::fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
            path
        }
    };
    let spec = pst_couplings(d.sites, 1.0)?;
    let manifest_path = d.out.join("dephasing.manifest.json");
    let manifest = ExperimentManifest {
        version: harness::SOFTWARE_VERSION.into(),
        format: harness::MANIFEST_FORMAT,
        experiment: Experiment::Dephasing,
        chain: spec,
        code: None,
        setup: None,
        logical: None,
        grid: d.gamma.clone(),
        samples: d.time_points as u64,
        seed: 0,
        prune: 0.0,
        outputs: vec![data_path, manifest_path.clone()],
    };
    manifest.write(&manifest_path)?;
    Ok(json!({ "manifest": manifest, "duration": report.duration, "points": report.points }))
}
