//! Optional TOML configuration file. Precedence: command-line flags beat
//! file values beat built-in defaults.

use std::path::Path;

use serde::Deserialize;

use betatree::{Config, RootMode};

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub stop_factor: Option<f64>,
    /// Per-tail trim fraction per coordinate (maps to a count via ceil).
    pub box_trim: Option<f64>,
    pub no_box: Option<bool>,
    pub jitter: Option<bool>,
    pub seed: Option<u64>,
    pub max_path_len: Option<usize>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| CliError::InvalidArgument(format!("config file: {e}")))
}

/// Flag-level settings shared by the build-like subcommands.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct BuildFlags {
    /// Simultaneous confidence level is 1 - alpha
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Per-tail trim fraction per coordinate for the bounding box
    #[arg(long, conflicts_with = "no_box")]
    pub box_trim: Option<f64>,

    /// Partition all of space instead of a bounding box
    #[arg(long)]
    pub no_box: bool,

    /// Stop splitting below stop_factor * ln(n) points
    #[arg(long)]
    pub stop_factor: Option<f64>,

    /// Break tied coordinates with seeded noise
    #[arg(long)]
    pub jitter: bool,

    /// Seed for jitter and simulations
    #[arg(long)]
    pub seed: Option<u64>,

    /// Path-length cap for the mode search
    #[arg(long)]
    pub max_path_len: Option<usize>,

    /// TOML config file (flags take precedence)
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

impl BuildFlags {
    /// Resolve flags against the file and defaults; `n` fixes the trim count.
    pub fn resolve(&self, n: usize) -> Result<Config, CliError> {
        let file = load(self.config.as_deref())?;
        let defaults = Config::default();
        let no_box = self.no_box || file.no_box.unwrap_or(false);
        let trim_fraction = self.box_trim.or(file.box_trim);
        if let Some(f) = trim_fraction {
            if !(f > 0.0 && f < 0.5) {
                return Err(CliError::InvalidArgument(format!(
                    "--box-trim must be in (0, 0.5), got {f}"
                )));
            }
        }
        let cfg = Config {
            alpha: self.alpha.or(file.alpha).unwrap_or(defaults.alpha),
            stop_factor: self
                .stop_factor
                .or(file.stop_factor)
                .unwrap_or(defaults.stop_factor),
            trim_count: trim_fraction
                .map(|f| betatree::config::trim_count_for_fraction(f, n))
                .unwrap_or(defaults.trim_count),
            root_mode: if no_box { RootMode::FullSpace } else { RootMode::BoundingBox },
            max_path_length: self
                .max_path_len
                .or(file.max_path_len)
                .unwrap_or(defaults.max_path_length),
            jitter: self.jitter || file.jitter.unwrap_or(false),
            seed: self.seed.or(file.seed).unwrap_or(defaults.seed),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
