//! Median-split k-d tree over empirical measure.
//!
//! Node k splits its rectangle at the ceil(n_k/2)-th order statistic of the
//! cycling coordinate; points strictly below go to child 2k+1, points
//! strictly above to child 2k+2, and the splitting observation sits on the
//! boundary and belongs to neither. Because the split index depends only on
//! n_k, the whole count map {k -> n_k} is a function of (n, d, config) and
//! not of the data. Splitting stops once a node holds fewer than
//! `stop_factor * ln(n)` observations.
//!
//! Order statistics are found with `select_nth_unstable_by` on an index
//! array, so construction is O(n log n) without ever sorting whole
//! coordinates.

use crate::config::{Config, RootMode};
use crate::error::Error;
use crate::points::PointMatrix;
use crate::rect::Rect;

#[derive(Debug, Clone)]
pub struct KdNode {
    /// Heap index: children of k are 2k+1 and 2k+2.
    pub index: u64,
    pub depth: u32,
    pub rect: Rect,
    /// Observations strictly inside `rect`.
    pub count: usize,
    pub split_axis: Option<usize>,
    pub split_value: Option<f64>,
}

impl KdNode {
    pub fn is_leaf(&self) -> bool {
        self.split_axis.is_none()
    }
}

/// Product of side lengths of the node's rectangle; `None` when unbounded.
pub fn node_volume(node: &KdNode) -> Option<f64> {
    node.rect.volume()
}

#[derive(Debug, Clone)]
pub struct KdTree {
    /// Nodes sorted by heap index, which is also breadth-first order.
    nodes: Vec<KdNode>,
    /// Child slots per node slot, fixed up after construction.
    children: Vec<Option<(u32, u32)>>,
    /// Total sample size used for inference (before any trimming).
    pub n: usize,
    pub d: usize,
    pub root_mode: RootMode,
    pub stop_threshold: f64,
    /// Observations removed by the bounding box; empty in full-space mode.
    pub trimmed: PointMatrix,
}

impl KdTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[KdNode] {
        &self.nodes
    }

    pub fn node(&self, slot: usize) -> &KdNode {
        &self.nodes[slot]
    }

    pub fn root(&self) -> &KdNode {
        &self.nodes[0]
    }

    /// Slot of the node with heap index `index`, if it exists.
    pub fn slot_of(&self, index: u64) -> Option<usize> {
        self.nodes.binary_search_by_key(&index, |n| n.index).ok()
    }

    pub fn node_by_index(&self, index: u64) -> Option<&KdNode> {
        self.slot_of(index).map(|s| &self.nodes[s])
    }

    /// Child slots of a non-leaf node slot.
    pub fn children(&self, slot: usize) -> Option<(usize, usize)> {
        self.children[slot].map(|(l, r)| (l as usize, r as usize))
    }

    pub fn max_depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Count of observations inside the root rectangle (n in full-space
    /// mode, the in-box count in bounding-box mode).
    pub fn root_count(&self) -> usize {
        self.nodes[0].count
    }
}

/// Trim `trim_count` order statistics from each tail of each coordinate, in
/// coordinate order, each pass applied to the survivors of the previous one.
/// The bounds of the returned box are the innermost discarded order
/// statistics; observations on the bounds are excluded.
///
/// Returns (box, interior points, trimmed points).
pub fn bounding_box(
    data: &PointMatrix,
    trim_count: usize,
) -> Result<(Rect, PointMatrix, PointMatrix), Error> {
    let d = data.dim();
    let mut survivors: Vec<usize> = (0..data.n()).collect();
    let mut removed: Vec<usize> = Vec::new();
    let mut lower = vec![0.0; d];
    let mut upper = vec![0.0; d];

    for p in 0..d {
        let m = survivors.len();
        if m < 2 * trim_count + 1 {
            return Err(Error::TooFewPoints { coordinate: p, remaining: m });
        }
        survivors.sort_unstable_by(|&a, &b| data.get(a, p).total_cmp(&data.get(b, p)));
        lower[p] = data.get(survivors[trim_count - 1], p);
        upper[p] = data.get(survivors[m - trim_count], p);
        removed.extend_from_slice(&survivors[..trim_count]);
        removed.extend_from_slice(&survivors[m - trim_count..]);
        survivors.drain(m - trim_count..);
        survivors.drain(..trim_count);
    }

    survivors.sort_unstable();
    removed.sort_unstable();
    let rect = Rect::new(lower, upper)?;
    Ok((rect, data.select_rows(&survivors), data.select_rows(&removed)))
}

/// Build the k-d tree for prepared data (finite, distinct per coordinate).
pub fn build_kdtree(data: PointMatrix, cfg: &Config) -> Result<KdTree, Error> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::InvalidInput("dataset is empty".into()));
    }
    let n = data.n();
    let d = data.dim();
    let stop_threshold = cfg.stop_threshold(n);

    let (root_rect, interior, trimmed) = match cfg.root_mode {
        RootMode::BoundingBox => bounding_box(&data, cfg.trim_count)?,
        RootMode::FullSpace => (Rect::unbounded(d), data, PointMatrix::empty(d)),
    };

    let mut idx: Vec<usize> = (0..interior.n()).collect();
    let mut nodes = Vec::new();
    build_recursive(
        &interior,
        &mut idx,
        0,
        0,
        root_rect,
        stop_threshold,
        &mut nodes,
    );

    nodes.sort_unstable_by_key(|node| node.index);
    let children = link_children(&nodes);
    Ok(KdTree {
        nodes,
        children,
        n,
        d,
        root_mode: cfg.root_mode,
        stop_threshold,
        trimmed,
    })
}

fn build_recursive(
    data: &PointMatrix,
    idx: &mut [usize],
    index: u64,
    depth: u32,
    rect: Rect,
    stop: f64,
    out: &mut Vec<KdNode>,
) {
    let count = idx.len();
    if (count as f64) < stop || count == 0 {
        out.push(KdNode {
            index,
            depth,
            rect,
            count,
            split_axis: None,
            split_value: None,
        });
        return;
    }

    let axis = depth as usize % data.dim();
    // 0-based position of the ceil(count/2)-th order statistic
    let mid = count.div_ceil(2) - 1;
    let (left, pivot, right) =
        idx.select_nth_unstable_by(mid, |&a, &b| data.get(a, axis).total_cmp(&data.get(b, axis)));
    let value = data.get(*pivot, axis);

    let left_rect = rect.with_upper(axis, value);
    let right_rect = rect.with_lower(axis, value);
    out.push(KdNode {
        index,
        depth,
        rect,
        count,
        split_axis: Some(axis),
        split_value: Some(value),
    });
    build_recursive(data, left, 2 * index + 1, depth + 1, left_rect, stop, out);
    build_recursive(data, right, 2 * index + 2, depth + 1, right_rect, stop, out);
}

fn link_children(nodes: &[KdNode]) -> Vec<Option<(u32, u32)>> {
    let slot_of = |index: u64| nodes.binary_search_by_key(&index, |n| n.index).ok();
    nodes
        .iter()
        .map(|node| {
            if node.is_leaf() {
                None
            } else {
                let l = slot_of(2 * node.index + 1).expect("left child missing");
                let r = slot_of(2 * node.index + 2).expect("right child missing");
                Some((l as u32, r as u32))
            }
        })
        .collect()
}
