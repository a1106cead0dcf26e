//! Optional `reqsmell.toml`. Keys mirror the long flag names.

use crate::args::ReportFormat;
use crate::UsageError;
use serde::Deserialize;
use std::path::{Path, PathBuf};

pub const DEFAULT_CONFIG: &str = "reqsmell.toml";

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub inputs: Option<Vec<PathBuf>>,
    pub format: Option<String>,
    pub csv_id: Option<String>,
    pub csv_text: Option<String>,
    pub dictionary_dir: Option<PathBuf>,
    pub lexicon_dir: Option<PathBuf>,
    pub smells: Option<Vec<String>>,
    pub condition_suppression: Option<bool>,
    pub numeric_suppression: Option<bool>,
    pub jobs: Option<usize>,
    pub include_suppressed: Option<bool>,
    pub report: Option<ReportFormat>,
    pub out: Option<PathBuf>,
    pub fail_on_density: Option<f64>,
    pub store: Option<PathBuf>,
    pub sample: Option<usize>,
    pub seed: Option<u64>,
    pub predictions: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub policy: Option<String>,
    pub group_ambiguity: Option<bool>,
    pub json: Option<bool>,
    pub port: Option<i64>,
    pub bind: Option<String>,
    pub analyze: Option<Vec<PathBuf>>,
    pub static_dir: Option<PathBuf>,
    pub dev: Option<bool>,
}

impl FileConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<FileConfig, UsageError> {
        toml::from_str(text).map_err(|e| UsageError(format!("{}: {e}", origin.display())))
    }

    /// Reads the explicit config, or the default one if it exists.
    pub fn load(explicit: Option<&Path>) -> anyhow::Result<FileConfig> {
        let path = match explicit {
            Some(p) => p.to_path_buf(),
            None => {
                let p = PathBuf::from(DEFAULT_CONFIG);
                if !p.is_file() {
                    return Ok(FileConfig::default());
                }
                p
            }
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        log::debug!("using config {}", path.display());
        Ok(FileConfig::parse(&text, &path)?)
    }
}
