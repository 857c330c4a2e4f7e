//! Output files: CSV with a fixed dialect, JSON documents, and the run
//! manifest listing both.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// A float with 17 significant digits, enough to round-trip every `f64`.
pub fn real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    /// Data rows, without the header; absent for JSON.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config_sha256: String,
    pub seed: u64,
    pub workers: Option<usize>,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub files: Vec<FileEntry>,
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Writes files under one directory and remembers what it wrote.
#[derive(Debug)]
pub struct OutDir {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl OutDir {
    pub fn create(root: &Path) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(OutDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    fn record(&mut self, name: &str, bytes: &[u8], rows: Option<usize>) -> io::Result<()> {
        fs::write(self.root.join(name), bytes)?;
        self.files.push(FileEntry {
            path: name.to_string(),
            sha256: format!("{:x}", Sha256::digest(bytes)),
            rows,
        });
        Ok(())
    }

    /// Comma-separated, LF line endings, header first.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            debug_assert_eq!(r.len(), header.len());
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        self.record(name, &bytes, Some(rows.len()))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> io::Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.record(name, &bytes, None)
    }

    /// Write `manifest.json`; it is not listed in itself.
    pub fn manifest(&self, manifest: &RunManifest) -> io::Result<()> {
        let mut bytes = serde_json::to_vec_pretty(manifest)?;
        bytes.push(b'\n');
        fs::write(self.root.join("manifest.json"), bytes)
    }
}
