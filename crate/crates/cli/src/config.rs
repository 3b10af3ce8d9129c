use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Layout of the `--config` file. Sections mirror the subcommands; `model`
/// is shared by `generate` and `embed`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub model: Option<toml::Table>,
    pub generate: Option<toml::Table>,
    pub embed: Option<toml::Table>,
    pub eval: Option<toml::Table>,
    pub predict: Option<toml::Table>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Values set on the command line replace those of the config section.
pub fn overlay<T: Serialize + DeserializeOwned>(
    flags: &T,
    section: Option<&toml::Table>,
    name: &str,
) -> Result<T, CliError> {
    let mut merged = section.cloned().unwrap_or_default();
    let set = toml::Table::try_from(flags).map_err(|e| CliError::Internal(e.to_string()))?;
    merged.extend(set);
    merged
        .try_into()
        .map_err(|e| CliError::Usage(format!("config section [{name}]: {e}")))
}
