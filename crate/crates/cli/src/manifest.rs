//! Run manifest: written as `running` before any data and finalized with
//! SHA-256 digests of every output afterwards.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use eigencond::models::ModelSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Running,
    Complete,
    Interrupted,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub model: Option<ModelSpec>,
    pub parameters: serde_json::Value,
    pub seeds: Vec<u64>,
    pub started_unix: f64,
    pub finished_unix: Option<f64>,
    pub outputs: Vec<OutputDigest>,
}

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

pub fn sha256_file(path: &Path) -> CliResult<(u64, String)> {
    let mut f = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut total = 0u64;
    loop {
        let n = f.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        total += n as u64;
    }
    Ok((total, format!("{:x}", hasher.finalize())))
}

/// An open run in `dir`; outputs are registered as they are written.
pub struct Run {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Run {
    pub fn begin(
        dir: &Path,
        command: &str,
        model: Option<ModelSpec>,
        parameters: serde_json::Value,
        seeds: Vec<u64>,
    ) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let run = Self {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                command: command.to_string(),
                status: RunStatus::Running,
                error: None,
                model,
                parameters,
                seeds,
                started_unix: now(),
                finished_unix: None,
                outputs: Vec::new(),
            },
        };
        run.save()?;
        Ok(run)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Creates `name` in the run directory and records it as an output.
    pub fn create(&mut self, name: &str) -> CliResult<std::io::BufWriter<std::fs::File>> {
        let path = self.path(name);
        let f = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        if !self.manifest.outputs.iter().any(|o| o.file == name) {
            self.manifest.outputs.push(OutputDigest {
                file: name.to_string(),
                bytes: 0,
                sha256: String::new(),
            });
        }
        Ok(std::io::BufWriter::new(f))
    }

    fn save(&self) -> CliResult<()> {
        let tmp = self.dir.join(format!("{MANIFEST_NAME}.tmp"));
        let text = serde_json::to_string_pretty(&self.manifest).map_err(eigencond::Error::from)?;
        std::fs::write(&tmp, text + "\n").map_err(|e| CliError::io(&tmp, e))?;
        let dest = self.dir.join(MANIFEST_NAME);
        std::fs::rename(&tmp, &dest).map_err(|e| CliError::io(&dest, e))
    }

    /// Digests every registered output and writes the final manifest.
    pub fn finish(mut self, status: RunStatus, error: Option<String>) -> CliResult<RunManifest> {
        for o in &mut self.manifest.outputs {
            let (bytes, sha) = sha256_file(&self.dir.join(&o.file))?;
            o.bytes = bytes;
            o.sha256 = sha;
        }
        self.manifest.status = status;
        self.manifest.error = error;
        self.manifest.finished_unix = Some(now());
        self.save()?;
        Ok(self.manifest)
    }
}

/// Checks that every output listed in the manifest in `dir` exists and
/// matches its digest.
pub fn verify(dir: &Path) -> CliResult<RunManifest> {
    let path = dir.join(MANIFEST_NAME);
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let m: RunManifest = serde_json::from_str(&text).map_err(eigencond::Error::from)?;
    for o in &m.outputs {
        let (bytes, sha) = sha256_file(&dir.join(&o.file))?;
        if bytes != o.bytes || sha != o.sha256 {
            return Err(CliError::Numerical(eigencond::Error::Invariant(format!(
                "digest mismatch for {}",
                o.file
            ))));
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn digests_are_recorded_and_verified() {
        let dir = tempfile::tempdir().unwrap();
        let mut run = Run::begin(dir.path(), "test", None, serde_json::json!({}), vec![1]).unwrap();
        let first: RunManifest =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(MANIFEST_NAME)).unwrap()).unwrap();
        assert_eq!(first.status, RunStatus::Running);
        {
            let mut w = run.create("a.txt").unwrap();
            w.write_all(b"abc").unwrap();
        }
        let m = run.finish(RunStatus::Complete, None).unwrap();
        assert_eq!(
            m.outputs[0].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        verify(dir.path()).unwrap();
        std::fs::write(dir.path().join("a.txt"), b"abd").unwrap();
        assert!(verify(dir.path()).is_err());
    }
}
