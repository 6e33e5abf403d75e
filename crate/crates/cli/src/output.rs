//! Output files, the run manifest and its verification.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

/// Environment variable that relocates relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "RND_OUTPUT_ROOT";

/// Column-oriented CSV table. Floats are written in shortest round-trip
/// scientific notation, missing values as empty fields.
#[derive(Debug, Clone, Default)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| num(v)).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Sidecar describing a raw little-endian f64 array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArraySidecar {
    pub data: String,
    pub dtype: String,
    /// Outermost dimension first; the last axis varies fastest.
    pub shape: Vec<usize>,
    pub axes: Vec<String>,
    /// Coordinate of each entry along the first axis.
    pub labels: Vec<f64>,
    pub extent: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub version: String,
    pub threads: usize,
    pub started_unix: u64,
    pub wall_seconds: f64,
    pub files: Vec<FileDigest>,
}

/// Output directory that records every file written through it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Applies the output-root override to a relative path.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if path.is_relative() => PathBuf::from(root).join(path),
        _ => path.to_path_buf(),
    }
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn join(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn record(&mut self, name: &str) {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        // Write to a temporary name first so a crash never leaves a torn file.
        let tmp = self.root.join(format!(".{name}.tmp"));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(bytes)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.root.join(name))?;
        self.record(name);
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&table.headers)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.write_bytes(name, &bytes)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        self.write_bytes(name, text.as_bytes())
    }

    /// Raw array plus a `<name>.json` sidecar.
    pub fn write_array(&mut self, name: &str, data: &[f64], sidecar: ArraySidecar) -> Result<(), CliError> {
        let expected: usize = sidecar.shape.iter().product();
        if expected != data.len() {
            return Err(CliError::Io(format!("{name}: shape {:?} does not match {} values", sidecar.shape, data.len())));
        }
        let bytes: Vec<u8> = data.iter().flat_map(|v| v.to_le_bytes()).collect();
        self.write_bytes(name, &bytes)?;
        self.write_json(&format!("{name}.json"), &sidecar)
    }

    /// Digests every recorded file and writes the manifest.
    pub fn finish(self, mut manifest: RunManifest) -> Result<RunManifest, CliError> {
        manifest.files = self
            .files
            .iter()
            .map(|name| {
                let bytes = fs::read(self.root.join(name))?;
                Ok(FileDigest { path: name.clone(), bytes: bytes.len() as u64, sha256: sha256_hex(&bytes) })
            })
            .collect::<Result<_, CliError>>()?;
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        fs::write(self.root.join(MANIFEST), bytes)?;
        Ok(manifest)
    }
}

/// Re-hashes every file listed in the manifest of `dir`.
pub fn verify(dir: &Path) -> Result<RunManifest, CliError> {
    let text = fs::read_to_string(dir.join(MANIFEST))
        .map_err(|e| CliError::Verify(format!("cannot read {}: {e}", dir.join(MANIFEST).display())))?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| CliError::Verify(format!("bad manifest: {e}")))?;
    let mut problems = Vec::new();
    for f in &manifest.files {
        match fs::read(dir.join(&f.path)) {
            Ok(bytes) if sha256_hex(&bytes) == f.sha256 => {}
            Ok(_) => problems.push(format!("{}: digest mismatch", f.path)),
            Err(e) => problems.push(format!("{}: {e}", f.path)),
        }
    }
    if problems.is_empty() {
        Ok(manifest)
    } else {
        Err(CliError::Verify(problems.join("; ")))
    }
}
