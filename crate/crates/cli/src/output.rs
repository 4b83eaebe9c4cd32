use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use newtonflow::io::{to_tagged_json, write_csv};
use serde::Serialize;

use crate::Format;

/// Writes the artifacts of one run into a directory, honouring `--format`.
pub struct Output {
    dir: PathBuf,
    format: Format,
}

impl Output {
    pub fn new(dir: &Path, format: Format) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
        })
    }

    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        if !self.format.csv() {
            return Ok(());
        }
        let path = self.dir.join(format!("{name}.csv"));
        let mut buf = Vec::new();
        write_csv(&mut buf, header, rows)?;
        fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))
    }

    pub fn json<T: Serialize>(&self, name: &str, body: &T) -> Result<()> {
        if !self.format.json() {
            return Ok(());
        }
        self.json_always(name, body)
    }

    /// JSON regardless of `--format`, for witnesses that must not be lost.
    pub fn json_always<T: Serialize>(&self, name: &str, body: &T) -> Result<()> {
        let path = self.dir.join(format!("{name}.json"));
        let mut text = to_tagged_json(body)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}
