//! Output directory handling: CSV files written through a temporary name and
//! renamed into place, and the JSON run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Text of one CSV cell. Floats use the shortest round-trip form, switching to
/// exponent notation for very small or large magnitudes.
pub trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        format!("{self:?}")
    }
}

impl Cell for String {
    fn cell(&self) -> String {
        self.clone()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub columns: Vec<String>,
    pub rows: usize,
}

/// A directory being filled by one run. Records every file for the manifest.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<FileEntry>,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".part");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self, CliError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(OutputDir { root, files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    /// Writes a CSV with `header` and numeric `rows` to `rel` under the root.
    pub fn write_csv<R, I>(&mut self, rel: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator,
        R::Item: Cell,
    {
        let path = self.root.join(rel);
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::io(&path, std::io::Error::other(e));
        w.write_record(header).map_err(csv_err)?;
        let mut count = 0;
        for row in rows {
            w.write_record(row.into_iter().map(|v| v.cell())).map_err(csv_err)?;
            count += 1;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io(&path, std::io::Error::other(e.to_string())))?;
        write_atomic(&path, &bytes)?;
        self.files.push(FileEntry {
            path: rel.to_string(),
            columns: header.iter().map(|s| s.to_string()).collect(),
            rows: count,
        });
        Ok(())
    }

    /// Adds a file written elsewhere (e.g. by a per-seed sub-directory) to the manifest.
    pub fn record(&mut self, entry: FileEntry) {
        self.files.push(entry);
    }

    pub fn write_text(&self, rel: &str, text: &str) -> Result<(), CliError> {
        write_atomic(&self.root.join(rel), text.as_bytes())
    }

    pub fn write_manifest(&self, manifest: &impl Serialize) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Schema(e.to_string()))?;
        self.write_text("manifest.json", &(text + "\n"))
    }
}
