//! Outputs are collected in memory and only written once a command has
//! succeeded, each file through a temporary sibling and a rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::CliError;

pub struct Staged {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Staged {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    /// Buffers whatever `write` produces under `name`.
    pub fn render(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        write(&mut buf).map_err(|e| CliError::Internal(format!("rendering {name}: {e}")))?;
        self.add(name, buf);
        Ok(())
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in self.files {
            let target = self.dir.join(&name);
            let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)
                .map_err(|e| CliError::io(&self.dir, e))?;
            tmp.write_all(&bytes)
                .map_err(|e| CliError::io(&target, e))?;
            tmp.persist(&target)
                .map_err(|e| CliError::io(&target, e.error))?;
            written.push(target);
        }
        Ok(written)
    }
}

#[derive(Serialize)]
pub struct Manifest<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub threads: usize,
    pub created_unix: u64,
    pub outputs: Vec<String>,
    pub config: C,
}

impl<C: Serialize> Manifest<C> {
    pub fn new(
        command: &'static str,
        seed: u64,
        threads: usize,
        outputs: Vec<String>,
        config: C,
    ) -> Self {
        Self {
            tool: env!("CARGO_BIN_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            threads,
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            outputs,
            config,
        }
    }

    /// Adds `<command>.manifest.toml` to the staged outputs.
    pub fn stage(self, staged: &mut Staged) -> Result<(), CliError> {
        let text = toml::to_string(&self).map_err(|e| CliError::Internal(e.to_string()))?;
        staged.add(
            &format!("{}.manifest.toml", self.command),
            text.into_bytes(),
        );
        Ok(())
    }
}
