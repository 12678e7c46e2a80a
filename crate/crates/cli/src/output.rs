use crate::CliError;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

/// Report directory with a `traces/` subdirectory.
#[derive(Debug, Clone)]
pub struct Output {
    root: PathBuf,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl Output {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root.join("traces")).map_err(|e| io_err(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn trace_path(&self, name: &str) -> PathBuf {
        self.root.join("traces").join(name)
    }

    pub fn write_rows<T: Serialize>(&self, path: &Path, rows: &[T]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
        for r in rows {
            w.serialize(r).map_err(|e| io_err(path, e))?;
        }
        w.flush().map_err(|e| io_err(path, e))
    }

    pub fn write_json<T: Serialize>(&self, path: &Path, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
        text.push('\n');
        fs::write(path, text).map_err(|e| io_err(path, e))
    }

    pub fn create_file(&self, path: &Path) -> Result<std::io::BufWriter<fs::File>, CliError> {
        Ok(std::io::BufWriter::new(
            fs::File::create(path).map_err(|e| io_err(path, e))?,
        ))
    }
}
