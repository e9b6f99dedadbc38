//! Run manifests: what was run, with which seed, and digests of what it wrote.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use clap::Parser;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::commands::{execute, Failure, Output};
use crate::{Cli, Command};

#[derive(Debug, Serialize, Deserialize)]
pub struct OutputDigest {
    pub target: String,
    pub sha256: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    /// Command line with any generated seed appended.
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub started: String,
    pub finished: String,
    pub wall_seconds: f64,
    pub version: String,
    pub outputs: Vec<OutputDigest>,
}

pub fn default_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn digests(outputs: &[Output]) -> Vec<OutputDigest> {
    outputs
        .iter()
        .filter(|o| o.recorded)
        .map(|o| OutputDigest {
            target: o.label(),
            sha256: digest(&o.bytes),
        })
        .collect()
}

pub fn write(
    path: &Path,
    argv: &[String],
    command: &Command,
    started: DateTime<Utc>,
    outputs: &[Output],
) -> Result<(), Failure> {
    let finished = Utc::now();
    let config = serde_json::to_value(command).expect("arguments serialize");
    let seed = find_seed(&config);
    let m = RunManifest {
        argv: argv.to_vec(),
        config,
        seed,
        started: started.to_rfc3339(),
        finished: finished.to_rfc3339(),
        wall_seconds: (finished - started).num_microseconds().unwrap_or(0) as f64 * 1e-6,
        version: env!("CARGO_PKG_VERSION").to_string(),
        outputs: digests(outputs),
    };
    let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
    fs::write(path, text + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn find_seed(v: &serde_json::Value) -> Option<u64> {
    match v {
        serde_json::Value::Object(map) => map
            .get("seed")
            .and_then(|s| s.as_u64())
            .or_else(|| map.values().find_map(find_seed)),
        _ => None,
    }
}

/// Re-executes the recorded command without writing anything and compares
/// output digests. Exit status 3 on any mismatch.
pub fn replay(path: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let m: RunManifest = serde_json::from_str(&text).map_err(|e| {
        Failure::Usage(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    let cli = Cli::try_parse_from(&m.argv).map_err(|e| Failure::Usage(format!("recorded argv: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(Failure::Usage("cannot replay a replay".into()));
    }
    let outputs = execute(&cli.command)?;
    let fresh = digests(&outputs);
    let mut ok = fresh.len() == m.outputs.len();
    let rows: Vec<serde_json::Value> = fresh
        .iter()
        .zip(&m.outputs)
        .map(|(f, r)| {
            let same = f.sha256 == r.sha256;
            ok &= same;
            serde_json::json!({ "target": r.target, "recorded": r.sha256, "replayed": f.sha256, "match": same })
        })
        .collect();
    let report = serde_json::json!({ "manifest": path.display().to_string(), "match": ok, "outputs": rows });
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if ok {
        Ok(())
    } else {
        Err(Failure::Numeric("replayed outputs differ from the manifest".into()))
    }
}
