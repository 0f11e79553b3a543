//! Seeded, resumable experiment drivers and dense oracles.
//!
//! Every experiment is a pure function of its parameters: samples and
//! disorder instances draw from independent RNG streams keyed by
//! `(seed, index)`, so results do not depend on thread scheduling.

mod csvio;
mod experiments;
mod manifest;
mod oracle;

pub use csvio::{format_float, read_rows, run_resumable, write_rows, CsvRow};
pub use experiments::{
    coupling_point, default_coupling_grid, default_timing_grid, dephasing_order_check, exp_coupling,
    exp_dephasing, exp_single_z, exp_timing, single_z_sample, timing_point, CouplingPoint, DephasingConfig,
    DephasingPoint, DephasingReport, OrderCheck, SingleZRecord, SingleZSummary, TimingPoint,
};
pub use manifest::{code_from_id, Experiment, ExperimentManifest, MANIFEST_FORMAT, SOFTWARE_VERSION};
pub use oracle::{brute_force_conjugate, BRUTE_FORCE_LIMIT};

/// Samples in the single-Z experiment unless overridden.
pub const DEFAULT_SINGLE_Z_SAMPLES: u64 = 1024;
/// Disorder instances per grid point unless overridden.
pub const DEFAULT_COUPLING_INSTANCES: u64 = 1000;
pub const DEFAULT_SEED: u64 = 1;
