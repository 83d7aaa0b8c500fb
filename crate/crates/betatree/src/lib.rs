//! Data-adaptive multivariate histograms with simultaneous finite-sample
//! confidence statements.
//!
//! The pipeline: a median-split k-d tree partitions space by empirical
//! measure, so the probability content of every rectangle is an exact
//! Beta-distributed pivot. A harmonically weighted Bonferroni plan turns the
//! per-node Beta intervals into simultaneous confidence bounds, a recursive
//! goodness-of-fit test prunes the tree to its maximal uniform-looking
//! rectangles (the beta tree), and the surviving bins support density
//! inference and multivariate mode hunting at a guaranteed confidence level.
//!
//! ```
//! use betatree::{Config, PointMatrix, RootMode};
//!
//! let cfg = Config { root_mode: RootMode::BoundingBox, ..Config::default() };
//! let data = betatree::harness::sample_uniform_cube(1000, 2, 7);
//! let fit = betatree::fit(data, &cfg).unwrap();
//! assert!(!fit.beta_tree.bins.is_empty());
//! ```

pub mod beta;
pub mod config;
pub mod error;
pub mod gauss;
pub mod harness;
pub mod inference;
pub mod modes;
pub mod partition;
pub mod points;
pub mod rect;
pub mod special;

pub use config::{Config, RootMode};
pub use error::Error;
pub use inference::{BetaTree, Bin, DepthPlan, NodeInference, TreeInference};
pub use modes::{AdjacencyGraph, ModeReport};
pub use partition::{KdNode, KdTree};
pub use points::PointMatrix;
pub use rect::Rect;

/// Everything the pipeline produces for one dataset.
pub struct Fit {
    pub tree: KdTree,
    pub inference: TreeInference,
    pub beta_tree: BetaTree,
}

/// Run the full pipeline: validate, partition, attach confidence bounds,
/// prune to the beta tree.
pub fn fit(data: PointMatrix, cfg: &Config) -> Result<Fit, Error> {
    cfg.validate()?;
    let data = points::validate_and_prepare(data, cfg)?;
    let tree = partition::build_kdtree(data, cfg)?;
    let inference = inference::infer(&tree, cfg.alpha)?;
    let beta_tree = inference::extract_betatree(&tree, &inference)?;
    Ok(Fit { tree, inference, beta_tree })
}
