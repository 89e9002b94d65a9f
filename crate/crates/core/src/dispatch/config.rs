use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Dispatcher configuration, read from a JSON file. Missing keys take defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DispatchConfig {
    pub lease_minutes: u64,
    /// Chance of injecting a probe before each director slot that follows a designer turn.
    pub probe_probability: f64,
    pub probe_max_per_session: u32,
    pub port: u16,
    /// Event log and snapshot directory; `None` keeps everything in memory.
    pub data_dir: Option<PathBuf>,
    pub seed: u64,
    /// Write a state snapshot after this many events.
    pub snapshot_every: u64,
}

impl Default for DispatchConfig {
    fn default() -> Self {
        DispatchConfig {
            lease_minutes: 10,
            probe_probability: 0.15,
            probe_max_per_session: 2,
            port: 8080,
            data_dir: None,
            seed: 0,
            snapshot_every: 500,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parsing {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl DispatchConfig {
    pub fn lease_ms(&self) -> u64 {
        self.lease_minutes * 60_000
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.probe_probability) {
            return Err(ConfigError::Invalid(format!("probe_probability {} not in [0, 1]", self.probe_probability)));
        }
        if self.lease_minutes == 0 {
            return Err(ConfigError::Invalid("lease_minutes must be positive".into()));
        }
        if self.snapshot_every == 0 {
            return Err(ConfigError::Invalid("snapshot_every must be positive".into()));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let config: DispatchConfig =
            serde_json::from_str(&text).map_err(|source| ConfigError::Json { path: path.into(), source })?;
        config.validate()?;
        Ok(config)
    }
}
