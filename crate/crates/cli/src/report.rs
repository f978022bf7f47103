use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::spec::ExperimentSpec;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a command hands back before it is wrapped into a report.
pub struct Outcome {
    pub payload: Value,
    /// `None` for commands that do not verify anything.
    pub pass: Option<bool>,
    /// Plot tables as `(file stem, CSV text)`.
    pub tables: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub version: String,
    pub spec: ExperimentSpec,
    pub seed: u64,
    /// SHA-256 over the canonical spec JSON followed by every input file.
    pub input_digest: String,
    pub payload: Value,
    pub pass: Option<bool>,
    pub wall_clock_seconds: f64,
}

pub fn input_digest(spec: &ExperimentSpec) -> CliResult<String> {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(spec).map_err(|e| CliError::input(e.to_string()))?);
    for path in spec.input_files() {
        let bytes = fs::read(&path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        h.update(&bytes);
    }
    Ok(hex::encode(h.finalize()))
}

/// Write `contents` next to `path` and rename it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// `report.json` plus one CSV per table under `dir`.
    pub fn write(&self, dir: &Path, tables: &[(String, String)]) -> CliResult<()> {
        write_atomic(&dir.join("report.json"), self.to_json().as_bytes())?;
        for (stem, csv) in tables {
            write_atomic(&dir.join(format!("{stem}.csv")), csv.as_bytes())?;
        }
        Ok(())
    }
}
