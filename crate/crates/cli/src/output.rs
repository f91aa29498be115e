//! Output files are fully rendered before anything touches the disk, then
//! each is written to a temporary file in the target directory and renamed
//! into place, so a reader never sees a truncated table.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

/// A rendered file waiting to be written.
pub struct Staged {
    pub path: PathBuf,
    pub contents: String,
}

impl Staged {
    pub fn new(path: PathBuf, contents: String) -> Self {
        Self { path, contents }
    }
}

pub fn write_atomic(dir: &Path, files: Vec<Staged>) -> Result<Vec<PathBuf>, CliError> {
    let io = |what: &str, p: &Path, e: std::io::Error| CliError::Io(format!("{what} {}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io("cannot create", dir, e))?;
    let mut temps = Vec::with_capacity(files.len());
    for f in &files {
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io("cannot stage", &f.path, e))?;
        tmp.write_all(f.contents.as_bytes()).map_err(|e| io("cannot write", &f.path, e))?;
        tmp.as_file().sync_all().map_err(|e| io("cannot sync", &f.path, e))?;
        temps.push(tmp);
    }
    // Renames happen only once every file is staged.
    let mut written = Vec::with_capacity(files.len());
    for (tmp, f) in temps.into_iter().zip(files) {
        tmp.persist(&f.path).map_err(|e| io("cannot rename into", &f.path, e.error))?;
        written.push(f.path);
    }
    Ok(written)
}
