//! Run directories: `<runs>/<timestamp>-<command>/` with the command's
//! artifacts and a `manifest.json` describing the invocation.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArtifactDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name, without recording flags.
    pub args: Vec<String>,
    pub started_at: String,
    pub elapsed_ms: f64,
    pub exit_code: i32,
    pub stdout_sha256: String,
    pub artifacts: Vec<ArtifactDigest>,
    pub details: Value,
}

fn unique_dir(root: &Path, stem: &str) -> PathBuf {
    let first = root.join(stem);
    if !first.exists() {
        return first;
    }
    (1..)
        .map(|i| root.join(format!("{stem}-{i}")))
        .find(|p| !p.exists())
        .expect("unbounded suffixes")
}

/// Creates the run directory and writes artifacts followed by the manifest.
pub fn write_run(
    root: &Path,
    manifest: &Manifest,
    artifacts: &[(String, Vec<u8>)],
) -> Result<PathBuf, CliError> {
    let io = |e: std::io::Error| {
        CliError::io(format!(
            "cannot write run directory under {}: {e}",
            root.display()
        ))
    };
    fs::create_dir_all(root).map_err(io)?;
    let stamp = manifest.started_at.replace([':', '-'], "");
    let dir = unique_dir(root, &format!("{stamp}-{}", manifest.command));
    fs::create_dir(&dir).map_err(io)?;
    for (name, bytes) in artifacts {
        fs::write(dir.join(name), bytes).map_err(io)?;
    }
    let json = serde_json::to_vec_pretty(manifest).expect("manifest serializes");
    fs::write(dir.join("manifest.json"), json).map_err(io)?;
    Ok(dir)
}

pub fn read_manifest(path: &Path) -> Result<Manifest, CliError> {
    let path = if path.is_dir() {
        path.join("manifest.json")
    } else {
        path.to_path_buf()
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::ingest(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::ingest(format!("{} is not a manifest: {e}", path.display())))
}

/// Drops the recording flags so a replay writes wherever it is told to.
pub fn replayable_args(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip_value = false;
    for a in args {
        if skip_value {
            skip_value = false;
            continue;
        }
        if a == "--runs-dir" {
            skip_value = true;
        } else if a == "--no-record" || a.starts_with("--runs-dir=") {
            continue;
        } else {
            out.push(a.clone());
        }
    }
    out
}
