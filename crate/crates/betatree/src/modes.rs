//! Multivariate mode hunting over the histogram's adjacency graph.
//!
//! Two bins are adjacent when their closed coordinate intervals intersect in
//! every dimension, so shared faces, edges and corners all connect. Bins are
//! visited in descending density order; the densest is tagged a mode, and a
//! candidate is rejected as soon as some already-tagged mode can be reached
//! by a path (of at most `max_len` edges) on which no intermediate bin is
//! confidently less dense than both endpoints, i.e. no interior bin R has
//! upper bound f_U(R) < min(f_L(mode), f_L(candidate)). Because the
//! confidence bounds are simultaneous, every claimed separation inherits the
//! overall confidence level.
//!
//! The path test is a reachability question: delete the interior bins that
//! would block (f_U < threshold) and ask whether the candidate still reaches
//! the mode within `max_len` steps. A breadth-first search answers that
//! exactly and stops at the first open path found.

use std::collections::VecDeque;

use crate::error::Error;
use crate::inference::BetaTree;

/// Symmetric bin adjacency; indices refer to `BetaTree::bins`.
#[derive(Debug, Clone)]
pub struct AdjacencyGraph {
    pub n_bins: usize,
    neighbors: Vec<Vec<usize>>,
}

impl AdjacencyGraph {
    pub fn neighbors(&self, bin: usize) -> &[usize] {
        &self.neighbors[bin]
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Build from explicit neighbor lists (tests, synthetic graphs).
    pub fn from_edges(n_bins: usize, edges: &[(usize, usize)]) -> Self {
        let mut neighbors = vec![Vec::new(); n_bins];
        for &(i, j) in edges {
            if i != j {
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        AdjacencyGraph { n_bins, neighbors }
    }
}

/// Closed-interval overlap test on every pair of bins.
pub fn build_adjacency(bt: &BetaTree) -> AdjacencyGraph {
    let n = bt.bins.len();
    let mut neighbors = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if bt.bins[i].rect.closed_overlaps(&bt.bins[j].rect) {
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
    }
    for list in &mut neighbors {
        list.sort_unstable();
    }
    AdjacencyGraph { n_bins: n, neighbors }
}

/// Why a bin was not tagged as a mode.
#[derive(Debug, Clone, PartialEq)]
pub enum RejectionCause {
    /// A path to `mode` exists on which no interior bin has
    /// f_U < `threshold`; `path` runs from the bin to the mode.
    OpenPath { mode: usize, threshold: f64, path: Vec<usize> },
    /// The search budget ran out; the bin is rejected conservatively.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub bin: usize,
    pub cause: RejectionCause,
}

/// Output of the mode hunt.
#[derive(Debug, Clone)]
pub struct ModeReport {
    /// Tagged modes in tag order, which is descending density order.
    pub modes: Vec<usize>,
    /// One witness per rejected bin.
    pub rejections: Vec<Rejection>,
    pub max_path_length: usize,
    /// Bins rejected only because the expansion budget ran out.
    pub budget_exhausted: usize,
}

pub const DEFAULT_EXPANSION_BUDGET: usize = 10_000_000;

/// Mode hunt with the default search budget.
pub fn find_modes(bt: &BetaTree, graph: &AdjacencyGraph, max_len: usize) -> ModeReport {
    find_modes_with_budget(bt, graph, max_len, DEFAULT_EXPANSION_BUDGET)
}

/// Mode hunt with an explicit node-expansion budget per candidate.
pub fn find_modes_with_budget(
    bt: &BetaTree,
    graph: &AdjacencyGraph,
    max_len: usize,
    budget: usize,
) -> ModeReport {
    let n = bt.bins.len();
    assert_eq!(n, graph.n_bins, "graph was built for a different histogram");
    // descending density; ties by ascending node index, which is the bin order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        bt.bins[b]
            .density
            .partial_cmp(&bt.bins[a].density)
            .expect("densities are finite")
            .then(a.cmp(&b))
    });

    let mut modes: Vec<usize> = Vec::new();
    let mut rejections: Vec<Rejection> = Vec::new();
    let mut budget_exhausted = 0usize;
    let mut search = PathSearch::new(n);

    for (pos, &cand) in order.iter().enumerate() {
        if pos == 0 {
            modes.push(cand);
            continue;
        }
        let mut verdict = None;
        let mut expansions_left = budget;
        for &mode in &modes {
            let threshold = bt.bins[mode].lower.min(bt.bins[cand].lower);
            match search.open_path(bt, graph, cand, mode, threshold, max_len, &mut expansions_left)
            {
                SearchOutcome::Found(path) => {
                    verdict = Some(RejectionCause::OpenPath { mode, threshold, path });
                    break;
                }
                SearchOutcome::NotFound => {}
                SearchOutcome::BudgetExhausted => {
                    budget_exhausted += 1;
                    verdict = Some(RejectionCause::BudgetExhausted);
                    break;
                }
            }
        }
        match verdict {
            Some(cause) => rejections.push(Rejection { bin: cand, cause }),
            None => modes.push(cand),
        }
    }

    ModeReport { modes, rejections, max_path_length: max_len, budget_exhausted }
}

enum SearchOutcome {
    Found(Vec<usize>),
    NotFound,
    BudgetExhausted,
}

/// Reusable BFS scratch space.
struct PathSearch {
    dist: Vec<u32>,
    parent: Vec<usize>,
    stamp: Vec<u64>,
    epoch: u64,
    queue: VecDeque<usize>,
}

impl PathSearch {
    fn new(n: usize) -> Self {
        PathSearch {
            dist: vec![0; n],
            parent: vec![usize::MAX; n],
            stamp: vec![0; n],
            epoch: 0,
            queue: VecDeque::new(),
        }
    }

    /// Shortest open path (interior bins all with f_U >= threshold) of at
    /// most `max_len` edges from `from` to `to`, if one exists.
    #[allow(clippy::too_many_arguments)]
    fn open_path(
        &mut self,
        bt: &BetaTree,
        graph: &AdjacencyGraph,
        from: usize,
        to: usize,
        threshold: f64,
        max_len: usize,
        expansions_left: &mut usize,
    ) -> SearchOutcome {
        self.epoch += 1;
        self.queue.clear();
        self.stamp[from] = self.epoch;
        self.dist[from] = 0;
        self.queue.push_back(from);

        while let Some(u) = self.queue.pop_front() {
            let du = self.dist[u];
            if du as usize + 1 > max_len {
                // BFS distances are nondecreasing; nothing can still reach
                break;
            }
            if *expansions_left == 0 {
                return SearchOutcome::BudgetExhausted;
            }
            *expansions_left -= 1;
            for &v in graph.neighbors(u) {
                if v == to {
                    let mut path = vec![to, u];
                    let mut cur = u;
                    while cur != from {
                        cur = self.parent[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return SearchOutcome::Found(path);
                }
                if self.stamp[v] == self.epoch || v == from {
                    continue;
                }
                // interior bins must not be confident separators
                if bt.bins[v].upper < threshold {
                    continue;
                }
                // an interior bin is only useful if it can still reach `to`
                if du as usize + 1 >= max_len {
                    continue;
                }
                self.stamp[v] = self.epoch;
                self.dist[v] = du + 1;
                self.parent[v] = u;
                self.queue.push_back(v);
            }
        }
        SearchOutcome::NotFound
    }
}

/// A bin on a reported path with its density and confidence bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBin {
    pub bin: usize,
    pub density: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Shortest path between two bins with the per-bin confidence bounds and
/// the separation threshold min(f_L(i), f_L(j)).
#[derive(Debug, Clone)]
pub struct PathReport {
    pub path: Vec<usize>,
    pub bins: Vec<PathBin>,
    pub threshold: f64,
    /// True when some interior bin's upper bound lies below the threshold,
    /// confirming the two endpoints as separated modes.
    pub separated: bool,
}

/// Shortest path in edge count between bins i and j (no density filtering).
pub fn shortest_path_report(
    bt: &BetaTree,
    graph: &AdjacencyGraph,
    i: usize,
    j: usize,
) -> Result<PathReport, Error> {
    let n = bt.bins.len();
    if i >= n || j >= n || i == j {
        return Err(Error::InvalidInput(format!(
            "path endpoints must be distinct bins below {n}, got {i} and {j}"
        )));
    }
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[i] = true;
    queue.push_back(i);
    'bfs: while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                parent[v] = u;
                if v == j {
                    break 'bfs;
                }
                queue.push_back(v);
            }
        }
    }
    if !seen[j] {
        return Err(Error::Disconnected { from: i, to: j });
    }
    let mut path = vec![j];
    let mut cur = j;
    while cur != i {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();

    let threshold = bt.bins[i].lower.min(bt.bins[j].lower);
    let bins: Vec<PathBin> = path
        .iter()
        .map(|&b| PathBin {
            bin: b,
            density: bt.bins[b].density,
            lower: bt.bins[b].lower,
            upper: bt.bins[b].upper,
        })
        .collect();
    let separated = path[1..path.len().saturating_sub(1)]
        .iter()
        .any(|&b| bt.bins[b].upper < threshold);
    Ok(PathReport { path, bins, threshold, separated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{BetaTree, Bin};
    use crate::rect::Rect;

    /// 1-d bins [i, i+1) laid out on a line, with explicit CI triples.
    fn line_tree(rows: &[(f64, f64, f64)]) -> BetaTree {
        let bins: Vec<Bin> = rows
            .iter()
            .enumerate()
            .map(|(i, &(density, lower, upper))| Bin {
                node_index: i as u64,
                depth: 1,
                count: 10,
                rect: Rect::new(vec![i as f64], vec![i as f64 + 1.0]).unwrap(),
                density,
                lower,
                upper,
            })
            .collect();
        BetaTree::from_bins(bins, 0.1, 100, 1).unwrap()
    }

    #[test]
    fn adjacency_face_gap_corner() {
        let mk = |lo: [f64; 2], hi: [f64; 2]| Rect::new(lo.to_vec(), hi.to_vec()).unwrap();
        let a = mk([0.0, 0.0], [1.0, 1.0]);
        assert!(a.closed_overlaps(&mk([1.0, 0.0], [2.0, 1.0])));
        assert!(!a.closed_overlaps(&mk([2.0, 0.0], [3.0, 1.0])));
        assert!(a.closed_overlaps(&mk([1.0, 1.0], [2.0, 2.0])));
    }

    #[test]
    fn adjacency_from_bins() {
        let bt = line_tree(&[(3.0, 2.0, 4.0), (1.0, 0.5, 1.5), (2.0, 1.5, 2.5)]);
        let g = build_adjacency(&bt);
        assert!(g.adjacent(0, 1));
        assert!(g.adjacent(1, 2));
        assert!(!g.adjacent(0, 2));
    }

    #[test]
    fn single_bin_is_the_mode() {
        let bt = line_tree(&[(1.0, 0.5, 1.5)]);
        let g = build_adjacency(&bt);
        let report = find_modes(&bt, &g, 6);
        assert_eq!(report.modes, vec![0]);
        assert!(report.rejections.is_empty());
    }

    #[test]
    fn neighbor_of_the_peak_is_absorbed() {
        // two adjacent bins: the shorter one connects directly (path of
        // length 1 has no interior, so nothing can separate them)
        let bt = line_tree(&[(3.0, 2.0, 4.0), (2.0, 1.0, 3.0)]);
        let g = build_adjacency(&bt);
        let report = find_modes(&bt, &g, 6);
        assert_eq!(report.modes, vec![0]);
        assert_eq!(report.rejections.len(), 1);
        match &report.rejections[0].cause {
            RejectionCause::OpenPath { mode, path, .. } => {
                assert_eq!(*mode, 0);
                assert_eq!(path, &vec![1, 0]);
            }
            other => panic!("unexpected cause {other:?}"),
        }
    }

    #[test]
    fn deep_valley_separates_two_modes() {
        // peak, valley (confidently low), peak
        let bt = line_tree(&[(3.0, 2.5, 3.5), (0.2, 0.1, 0.4), (2.8, 2.2, 3.2)]);
        let g = build_adjacency(&bt);
        let report = find_modes(&bt, &g, 6);
        assert_eq!(report.modes, vec![0, 2]);
    }

    #[test]
    fn shallow_valley_does_not_separate() {
        // the middle bin's upper bound is above the threshold, so the path
        // 0-1-2 is open and the second peak is rejected
        let bt = line_tree(&[(3.0, 2.5, 3.5), (1.0, 0.5, 2.6), (2.8, 2.2, 3.2)]);
        let g = build_adjacency(&bt);
        let report = find_modes(&bt, &g, 6);
        assert_eq!(report.modes, vec![0]);
    }

    #[test]
    fn path_cap_limits_rejection_range() {
        // valley bins are not separators, but the open path needs 3 edges;
        // with max_len 2 the far peak survives as its own mode
        let bt = line_tree(&[
            (3.0, 2.5, 3.5),
            (1.0, 0.5, 2.6),
            (1.1, 0.6, 2.7),
            (2.8, 2.2, 3.2),
        ]);
        let g = build_adjacency(&bt);
        assert_eq!(find_modes(&bt, &g, 3).modes, vec![0]);
        assert_eq!(find_modes(&bt, &g, 2).modes, vec![0, 3]);
    }

    #[test]
    fn budget_exhaustion_rejects_conservatively() {
        let bt = line_tree(&[(3.0, 2.5, 3.5), (0.2, 0.1, 0.4), (2.8, 2.2, 3.2)]);
        let g = build_adjacency(&bt);
        let report = find_modes_with_budget(&bt, &g, 6, 0);
        assert_eq!(report.modes, vec![0]);
        assert_eq!(report.budget_exhausted, 2);
    }

    #[test]
    fn report_is_invariant_under_density_rescaling() {
        let rows = [
            (3.0, 2.5, 3.5),
            (0.2, 0.1, 0.4),
            (2.8, 2.2, 3.2),
            (1.5, 1.0, 2.0),
        ];
        let scaled: Vec<(f64, f64, f64)> =
            rows.iter().map(|&(h, l, u)| (7.0 * h, 7.0 * l, 7.0 * u)).collect();
        let a = line_tree(&rows);
        let b = line_tree(&scaled);
        let ga = build_adjacency(&a);
        let gb = build_adjacency(&b);
        let ra = find_modes(&a, &ga, 6);
        let rb = find_modes(&b, &gb, 6);
        assert_eq!(ra.modes, rb.modes);
        assert_eq!(ra.rejections, {
            // thresholds scale by 7, paths stay identical
            rb.rejections
                .iter()
                .cloned()
                .map(|mut r| {
                    if let RejectionCause::OpenPath { threshold, .. } = &mut r.cause {
                        *threshold /= 7.0;
                    }
                    r
                })
                .collect::<Vec<_>>()
        });
    }

    #[test]
    fn shortest_path_report_basics() {
        let bt = line_tree(&[(3.0, 2.5, 3.5), (0.2, 0.1, 0.4), (2.8, 2.2, 3.2)]);
        let g = build_adjacency(&bt);
        let r = shortest_path_report(&bt, &g, 0, 2).unwrap();
        assert_eq!(r.path, vec![0, 1, 2]);
        assert!((r.threshold - 2.2).abs() < 1e-15);
        assert!(r.separated, "interior upper 0.4 < 2.2");

        let adjacent = shortest_path_report(&bt, &g, 0, 1).unwrap();
        assert_eq!(adjacent.path, vec![0, 1]);
        assert!(!adjacent.separated, "no interior bin");
    }

    #[test]
    fn disconnected_bins_are_reported() {
        let bins = vec![
            Bin {
                node_index: 0,
                depth: 1,
                count: 5,
                rect: Rect::new(vec![0.0], vec![1.0]).unwrap(),
                density: 1.0,
                lower: 0.5,
                upper: 1.5,
            },
            Bin {
                node_index: 1,
                depth: 1,
                count: 5,
                rect: Rect::new(vec![5.0], vec![6.0]).unwrap(),
                density: 0.9,
                lower: 0.4,
                upper: 1.4,
            },
        ];
        let bt = BetaTree::from_bins(bins, 0.1, 100, 1).unwrap();
        let g = build_adjacency(&bt);
        assert!(matches!(
            shortest_path_report(&bt, &g, 0, 1),
            Err(Error::Disconnected { from: 0, to: 1 })
        ));
        // both isolated bins become modes
        assert_eq!(find_modes(&bt, &g, 6).modes, vec![0, 1]);
    }

    #[test]
    fn ties_break_by_ascending_bin_index() {
        let bt = line_tree(&[(2.0, 1.5, 2.5), (2.0, 1.5, 2.5), (2.0, 1.5, 2.5)]);
        let g = build_adjacency(&bt);
        let report = find_modes(&bt, &g, 6);
        assert_eq!(report.modes, vec![0]);
        assert_eq!(report.rejections[0].bin, 1);
        assert_eq!(report.rejections[1].bin, 2);
    }
}
