//! Run metadata written next to every output.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Default, Serialize)]
pub struct RunMetadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    pub timestamp: String,
    /// Resolved settings after merging flags and the config file.
    pub config: BTreeMap<String, serde_json::Value>,
    pub seeds: BTreeMap<String, u64>,
    /// SHA-256 of every input file, by path.
    pub inputs: BTreeMap<String, String>,
    pub degraded_features: Vec<String>,
    pub notes: Vec<String>,
    pub outputs: Vec<String>,
}

impl RunMetadata {
    pub fn new(command: &str) -> Self {
        RunMetadata {
            tool: "argmine",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            argv: std::env::args().collect(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            ..Default::default()
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.config.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(serde_json::Value::Null),
        );
    }

    pub fn input(&mut self, path: &Path) -> io::Result<()> {
        self.inputs.insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Writes the record to `path`, or to stderr when there is no output
    /// location.
    pub fn emit(&self, path: Option<PathBuf>) -> anyhow::Result<()> {
        let json = serde_json::to_string_pretty(self)? + "\n";
        match path {
            Some(p) => std::fs::write(&p, json).map_err(|e| anyhow::anyhow!("writing {}: {e}", p.display())),
            None => {
                eprint!("{json}");
                Ok(())
            }
        }
    }
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let mut f = File::open(path)?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

/// Metadata location for a file output: `<out>.run_metadata.json`.
pub fn beside(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".run_metadata.json");
    PathBuf::from(s)
}
