use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::ChainSpec;
use crate::code::{concatenated_repetition, minimal15, shor_code, StabilizerCode};
use crate::decoder::SetupKind;
use crate::error::{Error, Result};

pub const SOFTWARE_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Bumped whenever the manifest layout changes.
pub const MANIFEST_FORMAT: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SingleZ,
    TimingSweep,
    CouplingSweep,
    Dephasing,
}

/// Complete description of one run. Identical manifests give identical
/// output files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub version: String,
    pub format: u32,
    pub experiment: Experiment,
    pub chain: ChainSpec,
    /// Absent for experiments without a code.
    pub code: Option<String>,
    pub setup: Option<SetupKind>,
    /// `(alpha, beta)` of the encoded logical state.
    pub logical: Option<(Complex64, Complex64)>,
    /// Swept parameter values: `delta t`, `f` or `gamma`.
    pub grid: Vec<f64>,
    /// Samples, instances per grid point, or time points.
    pub samples: u64,
    pub seed: u64,
    pub prune: f64,
    pub outputs: Vec<PathBuf>,
}

impl ExperimentManifest {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: ExperimentManifest = serde_json::from_str(text)?;
        if m.format != MANIFEST_FORMAT {
            return Err(Error::Parse(format!("manifest format {} is not {MANIFEST_FORMAT}", m.format)));
        }
        m.chain.validate()?;
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

/// Resolve a code identifier: `minimal15`, `repetition-LxB`, `shor-d`, or a
/// path to a tableau file.
pub fn code_from_id(id: &str) -> Result<StabilizerCode> {
    if id == "minimal15" {
        return Ok(minimal15());
    }
    if let Some(rest) = id.strip_prefix("repetition-") {
        let parsed = rest.split_once('x').and_then(|(l, b)| Some((l.parse().ok()?, b.parse().ok()?)));
        let (l, b) = parsed.ok_or_else(|| Error::Parse(format!("bad repetition code id {id:?}")))?;
        return concatenated_repetition(l, b);
    }
    if let Some(d) = id.strip_prefix("shor-") {
        let d = d.parse().map_err(|_| Error::Parse(format!("bad Shor code id {id:?}")))?;
        return shor_code(d);
    }
    let path = Path::new(id);
    if path.exists() {
        return StabilizerCode::from_tableau(&std::fs::read_to_string(path)?);
    }
    Err(Error::Parse(format!("unknown code {id:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::pst_couplings;

    #[test]
    fn manifest_round_trips() {
        let m = ExperimentManifest {
            version: SOFTWARE_VERSION.into(),
            format: MANIFEST_FORMAT,
            experiment: Experiment::TimingSweep,
            chain: pst_couplings(15, 1.0).unwrap(),
            code: Some("minimal15".into()),
            setup: Some(SetupKind::Revival),
            logical: Some((Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8))),
            grid: vec![0.0, 0.1],
            samples: 0,
            seed: 3,
            prune: 0.0,
            outputs: vec!["timing.csv".into()],
        };
        let back = ExperimentManifest::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        let bumped = m.to_json().unwrap().replace("\"format\": 1", "\"format\": 99");
        assert!(ExperimentManifest::from_json(&bumped).is_err());
    }

    #[test]
    fn code_ids_resolve() {
        assert_eq!(code_from_id("minimal15").unwrap().n_qubits, 15);
        assert_eq!(code_from_id("repetition-4x3").unwrap().n_qubits, 12);
        assert_eq!(code_from_id("shor-3").unwrap().n_qubits, 9);
        assert!(code_from_id("repetition-4").is_err());
        assert!(code_from_id("nonsense").is_err());
        let path = std::env::temp_dir().join(format!("chainqec-code-{}.txt", std::process::id()));
        std::fs::write(&path, minimal15().to_tableau()).unwrap();
        assert_eq!(code_from_id(path.to_str().unwrap()).unwrap(), minimal15());
    }
}
