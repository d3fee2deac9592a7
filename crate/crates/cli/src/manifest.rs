//! Run manifests: every output file is accompanied by a JSON record of the
//! command, its full parameter set (seeds included), input digests and tool
//! version — enough to re-run the command and reproduce the output.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::fsutil::write_atomic;

#[derive(Serialize, Debug)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Serialize, Debug)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub duration_ms: u128,
    #[serde(skip)]
    started: Instant,
}

impl RunManifest {
    pub fn start(command: &str) -> Self {
        RunManifest {
            tool: "depnet",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_owned(),
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            duration_ms: 0,
            started: Instant::now(),
        }
    }

    pub fn parameter(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn optional_parameter(&mut self, key: &str, value: Option<impl ToString>) -> &mut Self {
        if let Some(v) = value {
            self.parameter(key, v);
        }
        self
    }

    /// Records an input file along with its SHA-256 digest.
    pub fn input(&mut self, path: &Path) -> Result<&mut Self> {
        let mut file =
            File::open(path).with_context(|| format!("digesting input {}", path.display()))?;
        let mut hasher = Sha256::new();
        let mut buf = [0u8; 64 * 1024];
        let mut bytes = 0u64;
        loop {
            let read = file.read(&mut buf)?;
            if read == 0 {
                break;
            }
            bytes += read as u64;
            hasher.update(&buf[..read]);
        }
        let digest = hasher.finalize();
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256,
            bytes,
        });
        Ok(self)
    }

    pub fn output(&mut self, path: &Path) -> &mut Self {
        self.outputs.push(path.display().to_string());
        self
    }

    /// Writes the manifest next to the primary output as
    /// `<output>.manifest.json`.
    pub fn write_for(&mut self, primary_output: &Path) -> Result<PathBuf> {
        self.duration_ms = self.started.elapsed().as_millis();
        let mut name = primary_output.file_name().unwrap_or_default().to_owned();
        name.push(".manifest.json");
        let path = primary_output.with_file_name(name);
        let body = serde_json::to_vec_pretty(self)?;
        write_atomic(&path, |w| {
            w.write_all(&body)?;
            w.write_all(b"\n")?;
            Ok(())
        })?;
        Ok(path)
    }
}
