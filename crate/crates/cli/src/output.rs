use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use sparsezeros::solver::ZeroSet;

use crate::config::SCHEMA_VERSION;
use crate::CliResult;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Identifies the random stream of one trial.
#[derive(Clone, Debug, Serialize)]
pub struct StreamId {
    pub label: String,
    pub seed: u64,
    pub experiment: u64,
    pub trial: u64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub artifact_version: String,
    pub command: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub streams: Vec<StreamId>,
    pub files: Vec<FileEntry>,
    /// Wall-clock seconds per phase; the only non-reproducible field.
    pub timings: Vec<(String, f64)>,
}

/// Output directory named after the config hash. Data files are written
/// whole, so a rerun with the same config rewrites identical bytes.
pub struct RunDir {
    pub path: PathBuf,
    command: String,
    hash: String,
    config: serde_json::Value,
    files: Vec<FileEntry>,
    streams: Vec<StreamId>,
    timings: Vec<(String, f64)>,
    phase: Option<(String, Instant)>,
}

impl RunDir {
    pub fn create(root: &Path, command: &str, canonical: &str) -> CliResult<Self> {
        let hash = sha256_hex(canonical.as_bytes());
        let path = root.join(format!("{command}-{}", &hash[..16]));
        std::fs::create_dir_all(&path)?;
        let config = serde_json::from_str(canonical)?;
        Ok(RunDir {
            path,
            command: command.to_string(),
            hash,
            config,
            files: Vec::new(),
            streams: Vec::new(),
            timings: Vec::new(),
            phase: None,
        })
    }

    pub fn config_hash(&self) -> &str {
        &self.hash
    }

    pub fn phase(&mut self, name: &str) {
        self.end_phase();
        self.phase = Some((name.to_string(), Instant::now()));
    }

    fn end_phase(&mut self) {
        if let Some((n, t)) = self.phase.take() {
            self.timings.push((n, t.elapsed().as_secs_f64()));
        }
    }

    pub fn add_streams(&mut self, s: impl IntoIterator<Item = StreamId>) {
        self.streams.extend(s);
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        let p = self.path.join(name);
        std::fs::write(&p, bytes)?;
        self.files.push(FileEntry {
            name: name.to_string(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
        Ok(p)
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<PathBuf> {
        let bytes = csv_bytes(header, rows)?;
        self.write_bytes(name, &bytes)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<PathBuf> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    pub fn finish(mut self) -> CliResult<PathBuf> {
        self.end_phase();
        let manifest = RunManifest {
            schema_version: SCHEMA_VERSION,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            command: self.command.clone(),
            config_hash: self.hash.clone(),
            config: self.config.clone(),
            streams: std::mem::take(&mut self.streams),
            files: std::mem::take(&mut self.files),
            timings: std::mem::take(&mut self.timings),
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        std::fs::write(self.path.join("manifest.json"), bytes)?;
        Ok(self.path)
    }
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| std::io::Error::other(e.to_string()).into())
}

pub const COEFF_HEADER: [&str; 5] = ["trial", "component", "index", "re", "im"];

pub fn coefficient_rows(trial: u64, component: usize, a: &[Complex64]) -> Vec<Vec<String>> {
    a.iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                trial.to_string(),
                component.to_string(),
                i.to_string(),
                c.re.to_string(),
                c.im.to_string(),
            ]
        })
        .collect()
}

/// `trial, re1, im1, …, residual, cluster`.
pub fn zero_header(m: usize) -> Vec<String> {
    let mut h = vec!["trial".to_string()];
    for i in 1..=m {
        h.push(format!("re{i}"));
        h.push(format!("im{i}"));
    }
    h.push("residual".into());
    h.push("cluster".into());
    h
}

pub fn zero_rows(trial: u64, z: &ZeroSet) -> Vec<Vec<String>> {
    z.points
        .iter()
        .zip(&z.residuals)
        .zip(&z.flags)
        .map(|((p, r), f)| {
            let mut row = vec![trial.to_string()];
            for c in p {
                row.push(c.re.to_string());
                row.push(c.im.to_string());
            }
            row.push(r.to_string());
            row.push(f.cluster.to_string());
            row
        })
        .collect()
}
