//! The on-disk histogram document: a self-describing JSON file carrying the
//! effective configuration, every bin with its bounds and confidence bounds,
//! and an optional mode report. Floats rely on serde_json's shortest
//! round-trip encoding, so parse(serialize(doc)) reproduces every real
//! exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use betatree::modes::{ModeReport, RejectionCause};
use betatree::{BetaTree, Bin, Config, Rect};

use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "betatree-histogram/1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HistogramDocument {
    pub schema_version: String,
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub root_mode: String,
    pub config: ConfigEcho,
    pub bins: Vec<BinRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<ModeSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConfigEcho {
    pub alpha: f64,
    pub stop_factor: f64,
    pub trim_count: usize,
    pub root_mode: String,
    pub max_path_length: usize,
    pub jitter: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BinRecord {
    /// One [lower, upper] pair per coordinate.
    pub bounds: Vec<[f64; 2]>,
    pub depth: u32,
    pub count: usize,
    pub density: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModeSection {
    pub max_path_length: usize,
    /// Bin positions in `bins`, in descending density order.
    pub modes: Vec<usize>,
    pub rejections: Vec<RejectionRecord>,
    pub budget_exhausted: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RejectionRecord {
    pub bin: usize,
    pub cause: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<usize>>,
}

impl ConfigEcho {
    pub fn from_config(cfg: &Config) -> Self {
        ConfigEcho {
            alpha: cfg.alpha,
            stop_factor: cfg.stop_factor,
            trim_count: cfg.trim_count,
            root_mode: cfg.root_mode.as_str().to_string(),
            max_path_length: cfg.max_path_length,
            jitter: cfg.jitter,
            seed: cfg.seed,
        }
    }
}

pub fn from_beta_tree(bt: &BetaTree, cfg: &Config) -> HistogramDocument {
    let bins = bt
        .bins
        .iter()
        .map(|b| BinRecord {
            bounds: b
                .rect
                .lower()
                .iter()
                .zip(b.rect.upper())
                .map(|(&l, &u)| [l, u])
                .collect(),
            depth: b.depth,
            count: b.count,
            density: b.density,
            lower: b.lower,
            upper: b.upper,
        })
        .collect();
    HistogramDocument {
        schema_version: SCHEMA_VERSION.to_string(),
        n: bt.n,
        d: bt.d,
        alpha: bt.alpha,
        root_mode: cfg.root_mode.as_str().to_string(),
        config: ConfigEcho::from_config(cfg),
        bins,
        modes: None,
    }
}

/// Rebuild the in-memory histogram; bins keep their document order, which is
/// the canonical ascending-node order the writer emits.
pub fn to_beta_tree(doc: &HistogramDocument) -> Result<BetaTree, CliError> {
    let bins = doc
        .bins
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let lower: Vec<f64> = b.bounds.iter().map(|p| p[0]).collect();
            let upper: Vec<f64> = b.bounds.iter().map(|p| p[1]).collect();
            Ok(Bin {
                node_index: i as u64,
                depth: b.depth,
                count: b.count,
                rect: Rect::new(lower, upper)?,
                density: b.density,
                lower: b.lower,
                upper: b.upper,
            })
        })
        .collect::<Result<Vec<_>, betatree::Error>>()?;
    Ok(BetaTree::from_bins(bins, doc.alpha, doc.n, doc.d)?)
}

pub fn mode_section(report: &ModeReport) -> ModeSection {
    ModeSection {
        max_path_length: report.max_path_length,
        modes: report.modes.clone(),
        rejections: report
            .rejections
            .iter()
            .map(|r| match &r.cause {
                RejectionCause::OpenPath { mode, threshold, path } => RejectionRecord {
                    bin: r.bin,
                    cause: "open_path".into(),
                    mode: Some(*mode),
                    threshold: Some(*threshold),
                    path: Some(path.clone()),
                },
                RejectionCause::BudgetExhausted => RejectionRecord {
                    bin: r.bin,
                    cause: "budget_exhausted".into(),
                    mode: None,
                    threshold: None,
                    path: None,
                },
            })
            .collect(),
        budget_exhausted: report.budget_exhausted,
    }
}

pub fn render(doc: &HistogramDocument) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::Document(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn read_document(path: &Path) -> Result<HistogramDocument, CliError> {
    let text = std::fs::read_to_string(path)?;
    let doc: HistogramDocument =
        serde_json::from_str(&text).map_err(|e| CliError::Document(e.to_string()))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(CliError::Document(format!(
            "unsupported schema version '{}', expected '{SCHEMA_VERSION}'",
            doc.schema_version
        )));
    }
    Ok(doc)
}
