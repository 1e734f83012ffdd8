//! Run manifests and checksummed, atomically-written output files.
//!
//! Every run writes its data files first (temp file + rename), then a JSON
//! manifest listing each output with a SHA-256 content checksum. Each CSV
//! carries a comment line with the run checksum (a digest of the config echo
//! and derived clock), so data files and manifests cross-reference.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use aah_floquet::ModelParams;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

pub const TOOL: &str = "aahf";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Sign and branch conventions recorded with every run.
pub const EIGENPHASE_CONVENTION: &str =
    "U|psi> = exp(+i*eps)|psi>, eps in (-pi, pi]; static limit eps = -E*T";

#[derive(Debug, Clone, Serialize)]
pub struct ClockEcho {
    pub omega: f64,
    pub omega_f: f64,
    pub t1: f64,
    pub t2: Option<f64>,
    pub common_period: f64,
}

impl ClockEcho {
    pub fn from_params(p: &ModelParams) -> Self {
        ClockEcho {
            omega: p.omega(),
            omega_f: p.omega_f(),
            t1: p.drive_period,
            t2: p.bloch_period(),
            common_period: p.common_period(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub run_checksum: String,
    pub config: ExperimentConfig,
    pub clock: ClockEcho,
    pub eigenphase_convention: &'static str,
    pub slices_per_period: usize,
    pub wall_seconds: f64,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub results: serde_json::Value,
    pub outputs: Vec<OutputEntry>,
}

pub struct RunWriter {
    dir: PathBuf,
    run_checksum: String,
    outputs: Vec<OutputEntry>,
    started: Instant,
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

impl RunWriter {
    pub fn new(dir: &Path, config: &ExperimentConfig, clock: &ClockEcho) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        let identity = serde_json::json!({
            "tool": TOOL,
            "version": VERSION,
            "config": config,
            "clock": clock,
        });
        let run_checksum = hex_digest(identity.to_string().as_bytes());
        Ok(RunWriter {
            dir: dir.to_path_buf(),
            run_checksum,
            outputs: Vec::new(),
            started: Instant::now(),
        })
    }

    #[allow(dead_code)]
    pub fn run_checksum(&self) -> &str {
        &self.run_checksum
    }

    /// Atomic write: temp file in the same directory, then rename.
    fn write_atomic(&mut self, name: &str, contents: &[u8]) -> std::io::Result<()> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp-{}", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(contents)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        self.outputs.push(OutputEntry {
            path: name.to_string(),
            sha256: hex_digest(contents),
        });
        Ok(())
    }

    /// CSV with `#` metadata lines and a header row.
    pub fn write_csv(
        &mut self,
        name: &str,
        header: &str,
        rows: impl Iterator<Item = String>,
    ) -> std::io::Result<()> {
        let mut text = String::new();
        text.push_str(&format!("# {TOOL} {VERSION}\n"));
        text.push_str(&format!("# run_checksum {}\n", self.run_checksum));
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(&row);
            text.push('\n');
        }
        self.write_atomic(name, text.as_bytes())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(value).expect("serializable value");
        self.write_atomic(name, text.as_bytes())
    }

    /// Write the manifest last, listing every file written so far.
    pub fn finish(
        self,
        config: &ExperimentConfig,
        clock: &ClockEcho,
        slices_per_period: usize,
        warnings: Vec<String>,
        notes: Vec<String>,
        results: serde_json::Value,
    ) -> std::io::Result<RunManifest> {
        let manifest = RunManifest {
            tool: TOOL,
            version: VERSION,
            run_checksum: self.run_checksum.clone(),
            config: config.clone(),
            clock: clock.clone(),
            eigenphase_convention: EIGENPHASE_CONVENTION,
            slices_per_period,
            wall_seconds: self.started.elapsed().as_secs_f64(),
            warnings,
            notes,
            results,
            outputs: self.outputs.clone(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        let path = self.dir.join("manifest.json");
        let tmp = self.dir.join(format!(".manifest.json.tmp-{}", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(manifest)
    }
}
