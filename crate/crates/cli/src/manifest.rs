//! Run manifests: enough to reproduce every artifact of a command.

use fanav::config::Config;
use fanav::Error;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command_line: Vec<String>,
    pub tool_version: String,
    pub seed: u64,
    pub config_digest: String,
    /// Fully resolved configuration (TOML).
    pub config: String,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<PathBuf>,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
    pub status: String,
    #[serde(skip)]
    path: PathBuf,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn file_digest(path: &Path) -> Result<String, Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

impl Manifest {
    /// Digests the inputs and writes the manifest before any work starts.
    pub fn begin(argv: &[String], cfg: &Config, inputs: &[PathBuf], outputs: &[PathBuf], path: &Path) -> Result<Self, Error> {
        let inputs = inputs
            .iter()
            .filter(|p| p.is_file())
            .map(|p| Ok(InputDigest { path: p.clone(), sha256: file_digest(p)? }))
            .collect::<Result<Vec<_>, Error>>()?;
        let m = Self {
            command_line: argv.to_vec(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            config_digest: cfg.digest(),
            config: cfg.to_toml(),
            inputs,
            outputs: outputs.to_vec(),
            started_unix: now(),
            finished_unix: None,
            status: "running".into(),
            path: path.to_path_buf(),
        };
        m.write()?;
        Ok(m)
    }

    pub fn finish(&mut self) -> Result<(), Error> {
        self.finished_unix = Some(now());
        self.status = "complete".into();
        self.write()
    }

    /// Temp file plus rename, so readers never see a partial manifest.
    fn write(&self) -> Result<(), Error> {
        let tmp = self.path.with_extension("json.tmp");
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&tmp, text).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
        std::fs::rename(&tmp, &self.path).map_err(|e| Error::Io(format!("{}: {e}", self.path.display())))
    }
}
