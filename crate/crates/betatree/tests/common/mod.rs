//! Shared test oracles, independent of the library's computation paths.
//!
//! - `oracle_beta_cdf`: the regularized incomplete beta as a ratio of two
//!   adaptive-Simpson integrals of the scaled density. No gamma functions,
//!   no continued fractions; nothing shared with `betatree::beta`.
//! - `oracle_modes`: a literal transcription of the mode-hunt loop that
//!   exhaustively enumerates all simple paths by depth-first search.
//! - `random_beta_tree`: synthetic disjoint-rectangle histograms for
//!   adversarial mode-search instances.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use betatree::{BetaTree, Bin, Rect};

/// c * ln(t) with the convention 0 * ln(0) = 0.
fn xlogy(c: f64, t: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * t.ln()
    }
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    noise_rel: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let refined = left + right;
    // stop once a panel has converged to the integrand's own noise level:
    // refining below it only chases roundoff
    let converged =
        (refined - whole).abs() <= 15.0 * tol.max(noise_rel * refined.abs());
    if depth == 0 || converged {
        return refined + (refined - whole) / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, noise_rel, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, noise_rel, depth - 1)
}

fn integrate(f: &impl Fn(f64) -> f64, cuts: &[f64], rel_tol: f64, noise_rel: f64) -> f64 {
    let simpson = |a: f64, b: f64| {
        let m = 0.5 * (a + b);
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    };
    let coarse: f64 = cuts.windows(2).map(|w| simpson(w[0], w[1])).sum();
    let tol = rel_tol * coarse.abs().max(1e-280) / (cuts.len() - 1) as f64;
    cuts.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let m = 0.5 * (a + b);
            let (fa, fm, fb) = (f(a), f(m), f(b));
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, noise_rel, 48)
        })
        .sum()
}

/// Segment endpoints packing the density peak with waypoints.
fn beta_cuts(lo: f64, hi: f64, a: f64, b: f64) -> Vec<f64> {
    let s = a + b;
    let p = a / s;
    let sigma = (p * (1.0 - p) / (s + 1.0)).sqrt();
    let peak = if s > 2.0 { (a - 1.0) / (s - 2.0) } else { 0.5 };
    let mut cuts = vec![lo, hi];
    for k in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
        for t in [peak - k * sigma, peak + k * sigma] {
            if t > lo && t < hi {
                cuts.push(t);
            }
        }
    }
    if peak > lo && peak < hi {
        cuts.push(peak);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

/// Beta(a, b) CDF by adaptive quadrature: the integral of the scaled density
/// over [0, x] divided by the integral over [0, 1].
pub fn oracle_beta_cdf(x: f64, a: f64, b: f64) -> f64 {
    assert!(a >= 1.0 && b >= 1.0, "oracle built for shapes >= 1");
    assert!((0.0..=1.0).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let logf = |t: f64| xlogy(a - 1.0, t) + xlogy(b - 1.0, 1.0 - t);
    let piece = |lo: f64, hi: f64| {
        let cuts = beta_cuts(lo, hi, a, b);
        let scale = cuts
            .iter()
            .map(|&t| logf(t))
            .fold(f64::NEG_INFINITY, f64::max);
        let f = |t: f64| (logf(t) - scale).exp();
        // exp(huge1 - huge2) carries ~eps*|exponent| relative noise
        let noise_rel = (4.0 * f64::EPSILON * scale.abs()).max(1e-15);
        (integrate(&f, &cuts, 1e-13, noise_rel), scale)
    };
    let (num, s_num) = piece(0.0, x);
    let (den, s_den) = piece(0.0, 1.0);
    (num / den * (s_num - s_den).exp()).clamp(0.0, 1.0)
}

/// Invert the oracle CDF by bisection.
pub fn oracle_beta_quantile(q: f64, a: f64, b: f64) -> f64 {
    assert!(q > 0.0 && q < 1.0);
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if oracle_beta_cdf(mid, a, b) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A bin's confidence state for the mode oracle.
#[derive(Debug, Clone, Copy)]
pub struct OracleBin {
    pub density: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Literal mode hunt: tag the densest bin, then for each bin in descending
/// density order enumerate every simple path (at most `max_len` edges) to
/// every tagged mode by DFS; a path with no interior bin satisfying
/// f_U < min(f_L(mode), f_L(candidate)) rejects the candidate.
pub fn oracle_modes(bins: &[OracleBin], neighbors: &[Vec<usize>], max_len: usize) -> Vec<usize> {
    let n = bins.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| bins[y].density.partial_cmp(&bins[x].density).unwrap().then(x.cmp(&y)));

    let mut modes: Vec<usize> = Vec::new();
    for (pos, &cand) in order.iter().enumerate() {
        if pos == 0 {
            modes.push(cand);
            continue;
        }
        let mut rejected = false;
        'mode_loop: for &m in &modes {
            let threshold = bins[m].lower.min(bins[cand].lower);
            let mut path = vec![cand];
            if dfs_open_path(bins, neighbors, m, threshold, max_len, &mut path) {
                rejected = true;
                break 'mode_loop;
            }
        }
        if !rejected {
            modes.push(cand);
        }
    }
    modes
}

/// Depth-first enumeration of simple paths extending `path` toward `goal`;
/// true as soon as some complete path has no blocking interior bin.
fn dfs_open_path(
    bins: &[OracleBin],
    neighbors: &[Vec<usize>],
    goal: usize,
    threshold: f64,
    max_len: usize,
    path: &mut Vec<usize>,
) -> bool {
    let last = *path.last().unwrap();
    if path.len() > max_len {
        return false;
    }
    for &next in &neighbors[last] {
        if next == goal {
            // interior bins are path[1..]; endpoints are excluded
            let open = path[1..].iter().all(|&v| !(bins[v].upper < threshold));
            if open {
                return true;
            }
            continue;
        }
        if path.contains(&next) {
            continue;
        }
        path.push(next);
        if dfs_open_path(bins, neighbors, goal, threshold, max_len, path) {
            path.pop();
            return true;
        }
        path.pop();
    }
    false
}

/// Random disjoint partition of [0,1]^d into `n_bins` rectangles by
/// recursive axis splits, with random density and CI fields.
pub fn random_beta_tree(seed: u64, d: usize, n_bins: usize) -> BetaTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rects: Vec<(Vec<f64>, Vec<f64>)> = vec![(vec![0.0; d], vec![1.0; d])];
    while rects.len() < n_bins {
        let i = rng.random_range(0..rects.len());
        let axis = rng.random_range(0..d);
        let (lo, hi) = rects[i].clone();
        let span = hi[axis] - lo[axis];
        if span < 1e-3 {
            continue;
        }
        let cut = lo[axis] + span * rng.random_range(0.3..0.7);
        let mut left_hi = hi.clone();
        left_hi[axis] = cut;
        let mut right_lo = lo.clone();
        right_lo[axis] = cut;
        rects[i] = (lo, left_hi);
        rects.push((right_lo, hi));
    }
    let bins: Vec<Bin> = rects
        .into_iter()
        .enumerate()
        .map(|(i, (lo, hi))| {
            let density: f64 = rng.random_range(0.1..4.0);
            let lower = density * rng.random_range(0.3..0.98);
            let upper = density * rng.random_range(1.02..2.5);
            Bin {
                node_index: i as u64,
                depth: 1,
                count: 10,
                rect: Rect::new(lo, hi).unwrap(),
                density,
                lower,
                upper,
            }
        })
        .collect();
    BetaTree::from_bins(bins, 0.1, 100, d).unwrap()
}

pub fn median_usize(values: &[usize]) -> usize {
    let mut v = values.to_vec();
    v.sort_unstable();
    v[v.len() / 2]
}
