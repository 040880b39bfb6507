//! Artifact writing: every file is written to a temporary sibling and
//! renamed into place, and a failed command removes what it wrote.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub struct Artifacts {
    written: Mutex<Vec<PathBuf>>,
}

impl Artifacts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Writes `bytes` to `path` atomically, creating parent directories.
    pub fn write(&self, path: &Path, bytes: &[u8]) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
        }
        let name = path
            .file_name()
            .ok_or_else(|| Error::invalid(format!("not a file path: {}", path.display())))?;
        let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
        fs::write(&tmp, bytes).map_err(|e| Error::file(&tmp, e))?;
        if let Err(e) = fs::rename(&tmp, path) {
            let _ = fs::remove_file(&tmp);
            return Err(Error::file(path, e));
        }
        self.written.lock().expect("artifact list poisoned").push(path.to_path_buf());
        Ok(())
    }

    pub fn write_str(&self, path: &Path, text: &str) -> Result<()> {
        self.write(path, text.as_bytes())
    }

    pub fn write_json<T: serde::Serialize>(&self, path: &Path, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_str(path, &text)
    }

    /// Paths written so far, sorted.
    pub fn paths(&self) -> Vec<PathBuf> {
        let mut v = self.written.lock().expect("artifact list poisoned").clone();
        v.sort();
        v
    }

    /// Deletes everything written through this set.
    pub fn remove_all(&self) {
        for p in self.written.lock().expect("artifact list poisoned").drain(..) {
            let _ = fs::remove_file(&p);
        }
    }
}

/// Two-column whitespace-separated data file for plotting tools.
pub fn two_column<X: std::fmt::Display, Y: std::fmt::Display>(header: (&str, &str), rows: impl IntoIterator<Item = (X, Y)>) -> String {
    let mut s = format!("# {} {}\n", header.0, header.1);
    for (x, y) in rows {
        s.push_str(&format!("{x} {y}\n"));
    }
    s
}
