//! Simultaneous confidence bounds, the recursive goodness-of-fit test, and
//! extraction of the pruned histogram.
//!
//! Each tree depth D receives a harmonically weighted share of the overall
//! level: every bounded rectangle at depth D is tested at
//!
//!   alpha_D = alpha / (N_D * (D_max - D + 2) * sum_{B=2}^{D_max+1} 1/B)
//!
//! in bounding-box mode (the root gets alpha_0 = 0), and with the sum ending
//! at D_max - 2d + 2 and alpha_D = 0 for D < 2d in full-space mode, where no
//! rectangle shallower than 2d can be bounded. N_D is the traversal count of
//! bounded rectangles at depth D, so the weights adapt to the realized tree.
//! The per-depth levels sum to alpha, which is what makes the bounds
//! simultaneous.
//!
//! The goodness-of-fit interval of a node is the intersection of its own
//! density CI with the intersections of its children, computed bottom-up; a
//! node passes when its empirical density lies inside. The pruned histogram
//! keeps the maximal bounded nodes that pass.

use std::collections::HashMap;

use crate::beta::{beta_quantile, BetaParams};
use crate::error::Error;
use crate::partition::{KdNode, KdTree};
use crate::rect::Rect;

/// Per-depth significance allocation.
#[derive(Debug, Clone)]
pub struct DepthPlan {
    pub d_max: u32,
    /// Bounded rectangles per depth, indexed 0..=d_max.
    pub n_bounded: Vec<usize>,
    /// Per-node significance level per depth, indexed 0..=d_max.
    pub alpha_per_depth: Vec<f64>,
    pub alpha: f64,
}

impl DepthPlan {
    pub fn for_tree(tree: &KdTree, alpha: f64) -> Result<Self, Error> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be in (0,1), got {alpha}"
            )));
        }
        let d_max = tree.max_depth();
        let mut n_bounded = vec![0usize; d_max as usize + 1];
        for node in tree.nodes() {
            if node.rect.is_bounded() {
                n_bounded[node.depth as usize] += 1;
            }
        }

        let first_depth = match tree.root_mode {
            crate::config::RootMode::BoundingBox => 1u32,
            crate::config::RootMode::FullSpace => 2 * tree.d as u32,
        };
        let last_b = match tree.root_mode {
            crate::config::RootMode::BoundingBox => d_max as i64 + 1,
            crate::config::RootMode::FullSpace => d_max as i64 - 2 * tree.d as i64 + 2,
        };
        let harmonic: f64 = (2..=last_b).map(|b| 1.0 / b as f64).sum();

        let alpha_per_depth = (0..=d_max)
            .map(|depth| {
                let nd = n_bounded[depth as usize];
                if depth < first_depth || nd == 0 || harmonic <= 0.0 {
                    0.0
                } else {
                    alpha / (nd as f64 * (d_max - depth + 2) as f64 * harmonic)
                }
            })
            .collect();

        Ok(DepthPlan { d_max, n_bounded, alpha_per_depth, alpha })
    }

    pub fn alpha_at(&self, depth: u32) -> f64 {
        self.alpha_per_depth[depth as usize]
    }

    /// Realized Bonferroni budget sum_D N_D * alpha_D.
    pub fn budget(&self) -> f64 {
        self.n_bounded
            .iter()
            .zip(&self.alpha_per_depth)
            .map(|(&nd, &a)| nd as f64 * a)
            .sum()
    }
}

/// Count bounded rectangles per depth and assign per-depth levels.
pub fn plan_alphas(tree: &KdTree, alpha: f64) -> Result<DepthPlan, Error> {
    DepthPlan::for_tree(tree, alpha)
}

/// Confidence state of one node.
#[derive(Debug, Clone)]
pub struct NodeInference {
    /// (count + 1) / n.
    pub empirical_mass: f64,
    /// Empirical average density (count+1)/(n * volume); bounded nodes only.
    pub density: Option<f64>,
    /// CI for the probability content of the rectangle.
    pub prob_ci: Option<(f64, f64)>,
    /// CI for the average density: the probability CI over the volume.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Intersection of this node's density CI with all descendants' CIs.
    /// May be empty (lower > upper), which simply fails the GOF test.
    pub gof_lower: f64,
    pub gof_upper: f64,
}

impl NodeInference {
    /// Does the empirical density lie in the intersection interval?
    pub fn gof_passes(&self) -> bool {
        match self.density {
            Some(h) => self.gof_lower <= h && h <= self.gof_upper,
            None => false,
        }
    }
}

/// Per-node confidence bounds at level `alpha_d`.
///
/// `alpha_d = 0` yields the vacuous probability CI (0, 1), which is what the
/// depth plan assigns to the root box.
pub fn node_ci(node: &KdNode, alpha_d: f64, n: usize) -> Result<NodeInference, Error> {
    let volume = node.rect.volume().ok_or(Error::UnboundedRect)?;
    if !(0.0..1.0).contains(&alpha_d) {
        return Err(Error::InvalidConfig(format!(
            "per-node level must be in [0,1), got {alpha_d}"
        )));
    }
    if node.count >= n {
        return Err(Error::InvalidInput(format!(
            "node holds {} of {} points; no probability mass remains outside",
            node.count, n
        )));
    }
    let empirical_mass = (node.count as f64 + 1.0) / n as f64;
    let prob_ci = if alpha_d == 0.0 {
        (0.0, 1.0)
    } else {
        let p = BetaParams::pivot(node.count, n)?;
        (
            beta_quantile(alpha_d / 2.0, &p)?,
            beta_quantile(1.0 - alpha_d / 2.0, &p)?,
        )
    };
    let lower = prob_ci.0 / volume;
    let upper = prob_ci.1 / volume;
    Ok(NodeInference {
        empirical_mass,
        density: Some(empirical_mass / volume),
        prob_ci: Some(prob_ci),
        lower: Some(lower),
        upper: Some(upper),
        gof_lower: lower,
        gof_upper: upper,
    })
}

/// All per-node inference for a tree.
#[derive(Debug, Clone)]
pub struct TreeInference {
    pub plan: DepthPlan,
    /// Aligned with `tree.nodes()`.
    pub nodes: Vec<NodeInference>,
    pub alpha: f64,
}

/// Attach confidence bounds to every bounded node and propagate the
/// goodness-of-fit intervals bottom-up.
pub fn infer(tree: &KdTree, alpha: f64) -> Result<TreeInference, Error> {
    let plan = DepthPlan::for_tree(tree, alpha)?;
    // counts at a given depth take only a handful of values, so quantile
    // pairs are shared across most nodes
    let mut memo: HashMap<(u32, usize), NodeInference> = HashMap::new();
    let mut nodes = Vec::with_capacity(tree.len());
    for node in tree.nodes() {
        if node.rect.is_bounded() {
            let key = (node.depth, node.count);
            let cached = match memo.get(&key) {
                Some(ci) => ci.clone(),
                None => {
                    let ci = node_ci(node, plan.alpha_at(node.depth), tree.n)?;
                    memo.insert(key, ci.clone());
                    ci
                }
            };
            // densities divide by this node's own volume
            let volume = node.rect.volume().expect("bounded");
            let prob_ci = cached.prob_ci.expect("bounded node has a probability CI");
            let lower = prob_ci.0 / volume;
            let upper = prob_ci.1 / volume;
            nodes.push(NodeInference {
                empirical_mass: cached.empirical_mass,
                density: Some(cached.empirical_mass / volume),
                prob_ci: Some(prob_ci),
                lower: Some(lower),
                upper: Some(upper),
                gof_lower: lower,
                gof_upper: upper,
            });
        } else {
            nodes.push(NodeInference {
                empirical_mass: (node.count as f64 + 1.0) / tree.n as f64,
                density: None,
                prob_ci: None,
                lower: None,
                upper: None,
                gof_lower: f64::NEG_INFINITY,
                gof_upper: f64::INFINITY,
            });
        }
    }
    propagate_gof(tree, &mut nodes);
    Ok(TreeInference { plan, nodes, alpha })
}

/// Bottom-up intersection of density CIs.
///
/// Leaves keep their own bounds. An internal node intersects its own CI (if
/// bounded) with both children's intersections; an unbounded node has no own
/// CI and contributes only what its bounded descendants impose, with "no
/// bounded descendant" yielding the vacuous interval (-inf, +inf). An empty
/// intersection is legal and simply fails the test.
pub fn propagate_gof(tree: &KdTree, nodes: &mut [NodeInference]) {
    debug_assert_eq!(tree.len(), nodes.len());
    // nodes are sorted by heap index, so children always come after their
    // parent; a reverse scan is a post-order traversal
    for slot in (0..tree.len()).rev() {
        if let Some((l, r)) = tree.children(slot) {
            let gl = nodes[slot]
                .lower
                .unwrap_or(f64::NEG_INFINITY)
                .max(nodes[l].gof_lower)
                .max(nodes[r].gof_lower);
            let gu = nodes[slot]
                .upper
                .unwrap_or(f64::INFINITY)
                .min(nodes[l].gof_upper)
                .min(nodes[r].gof_upper);
            nodes[slot].gof_lower = gl;
            nodes[slot].gof_upper = gu;
        }
    }
}

/// One histogram bin: a maximal bounded rectangle that passed the test.
#[derive(Debug, Clone)]
pub struct Bin {
    pub node_index: u64,
    pub depth: u32,
    pub count: usize,
    pub rect: Rect,
    /// Empirical average density (count+1)/(n * volume).
    pub density: f64,
    /// Simultaneous density CI.
    pub lower: f64,
    pub upper: f64,
}

/// The pruned histogram: pairwise-disjoint maximal bounded rectangles with
/// simultaneous confidence bounds at level 1 - alpha.
#[derive(Debug, Clone)]
pub struct BetaTree {
    /// Sorted by node index (breadth-first order).
    pub bins: Vec<Bin>,
    pub alpha: f64,
    pub n: usize,
    pub d: usize,
}

impl BetaTree {
    /// Reassemble a histogram from stored bins (document ingestion, tests).
    pub fn from_bins(bins: Vec<Bin>, alpha: f64, n: usize, d: usize) -> Result<Self, Error> {
        if bins.is_empty() {
            return Err(Error::EmptyBetaTree);
        }
        for bin in &bins {
            if bin.rect.dim() != d {
                return Err(Error::InvalidInput(format!(
                    "bin at node {} has dimension {}, expected {d}",
                    bin.node_index,
                    bin.rect.dim()
                )));
            }
            if !bin.rect.is_bounded() {
                return Err(Error::UnboundedRect);
            }
        }
        let mut bins = bins;
        bins.sort_by_key(|b| b.node_index);
        Ok(BetaTree { bins, alpha, n, d })
    }
}

fn make_bin(node: &KdNode, ni: &NodeInference) -> Bin {
    Bin {
        node_index: node.index,
        depth: node.depth,
        count: node.count,
        rect: node.rect.clone(),
        density: ni.density.expect("accepted node is bounded"),
        lower: ni.lower.expect("accepted node is bounded"),
        upper: ni.upper.expect("accepted node is bounded"),
    }
}

/// Maximal bounded rectangles passing the GOF test, found recursively:
/// stop at the first passing node on each root-to-leaf path.
pub fn extract_betatree(tree: &KdTree, inference: &TreeInference) -> Result<BetaTree, Error> {
    let mut bins = Vec::new();
    let mut stack = vec![0usize];
    while let Some(slot) = stack.pop() {
        let node = tree.node(slot);
        let ni = &inference.nodes[slot];
        if node.rect.is_bounded() && ni.gof_passes() {
            bins.push(make_bin(node, ni));
            continue;
        }
        if let Some((l, r)) = tree.children(slot) {
            stack.push(r);
            stack.push(l);
        }
    }
    if bins.is_empty() {
        return Err(Error::EmptyBetaTree);
    }
    bins.sort_by_key(|b| b.node_index);
    Ok(BetaTree { bins, alpha: inference.alpha, n: tree.n, d: tree.d })
}

/// Same extraction, breadth-first by depth with explicit subtree deletion.
/// Must produce exactly the bins of [`extract_betatree`].
pub fn extract_betatree_iterative(
    tree: &KdTree,
    inference: &TreeInference,
) -> Result<BetaTree, Error> {
    let mut excluded = vec![false; tree.len()];
    let mut bins = Vec::new();
    // ascending slot order is ascending (depth, index)
    for slot in 0..tree.len() {
        let prune_below = if excluded[slot] {
            true
        } else {
            let node = tree.node(slot);
            let ni = &inference.nodes[slot];
            if node.rect.is_bounded() && ni.gof_passes() {
                bins.push(make_bin(node, ni));
                true
            } else {
                false
            }
        };
        if prune_below {
            if let Some((l, r)) = tree.children(slot) {
                excluded[l] = true;
                excluded[r] = true;
            }
        }
    }
    if bins.is_empty() {
        return Err(Error::EmptyBetaTree);
    }
    Ok(BetaTree { bins, alpha: inference.alpha, n: tree.n, d: tree.d })
}
