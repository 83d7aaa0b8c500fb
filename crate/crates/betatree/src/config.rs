//! Pipeline configuration.

use crate::error::Error;

/// Shape of the root rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMode {
    /// Trim extreme order statistics per coordinate and partition the
    /// resulting bounded box. Every tree rectangle is bounded.
    BoundingBox,
    /// Partition all of R^d; shallow rectangles are unbounded and only
    /// enter the histogram through their bounded descendants.
    FullSpace,
}

impl RootMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RootMode::BoundingBox => "bounding_box",
            RootMode::FullSpace => "full_space",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Simultaneous confidence level is 1 - alpha.
    pub alpha: f64,
    /// A node splits while it holds at least `stop_factor * ln(n)` points.
    pub stop_factor: f64,
    /// Order statistics removed at each tail of each coordinate when
    /// building the bounding box.
    pub trim_count: usize,
    pub root_mode: RootMode,
    /// Path-length cap (in edges) for the mode search.
    pub max_path_length: usize,
    /// Break ties by seeded uniform noise instead of erroring.
    pub jitter: bool,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            alpha: 0.1,
            stop_factor: 4.0,
            trim_count: 1,
            root_mode: RootMode::BoundingBox,
            max_path_length: 6,
            jitter: false,
            seed: 0,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be in (0,1), got {}",
                self.alpha
            )));
        }
        if !(self.stop_factor > 0.0 && self.stop_factor.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "stop_factor must be positive, got {}",
                self.stop_factor
            )));
        }
        if self.trim_count == 0 {
            return Err(Error::InvalidConfig(
                "trim_count must be at least 1".into(),
            ));
        }
        if self.max_path_length == 0 {
            return Err(Error::InvalidConfig(
                "max_path_length must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Splitting stops once a node holds fewer than this many points.
    pub fn stop_threshold(&self, n: usize) -> f64 {
        self.stop_factor * (n as f64).ln()
    }
}

/// Map a per-tail trim fraction to a per-tail order-statistic count,
/// rounding up (a 0.5% tail of n=1000 removes 5 points per tail).
pub fn trim_count_for_fraction(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64).ceil() as usize).max(1)
}
