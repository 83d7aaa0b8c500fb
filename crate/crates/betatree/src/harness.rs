//! Monte Carlo validation of the statistical guarantees and desk-scale
//! experiment drivers.
//!
//! Replications are seeded individually (a counter-based generator keyed by
//! the replication index), so any failing replication can be replayed in
//! isolation, and replication loops parallelize without changing results.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::beta::{beta_cdf, BetaParams};
use crate::config::{Config, RootMode};
use crate::error::Error;
use crate::gauss::{cholesky, diagonal_rect_mass, is_diagonal, mvn_rect_mass, DEFAULT_QMC_POINTS};
use crate::inference::{extract_betatree, infer, TreeInference};
use crate::partition::{build_kdtree, KdTree};
use crate::points::PointMatrix;
use crate::rect::Rect;
use crate::special::kolmogorov_q;

/// Independent per-replication seed (splitmix64 over the base seed).
pub fn rep_seed(base: u64, rep: usize) -> u64 {
    let mut z = base
        .wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(rep as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// n i.i.d. draws from the uniform distribution on [0,1]^d.
pub fn sample_uniform_cube(n: usize, d: usize, seed: u64) -> PointMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n * d).map(|_| rng.random::<f64>()).collect();
    PointMatrix::new(data, d).expect("n*d entries")
}

/// A Gaussian mixture: weights on the simplex, one mean and one symmetric
/// positive-definite covariance per component.
#[derive(Debug, Clone)]
pub struct MixtureSpec {
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    /// Row-major d x d covariance per component.
    pub covariances: Vec<Vec<f64>>,
    chols: Vec<Vec<f64>>,
    d: usize,
}

impl MixtureSpec {
    pub fn new(
        weights: Vec<f64>,
        means: Vec<Vec<f64>>,
        covariances: Vec<Vec<f64>>,
    ) -> Result<Self, Error> {
        if weights.is_empty() || weights.len() != means.len() || weights.len() != covariances.len()
        {
            return Err(Error::InvalidInput(
                "weights, means and covariances must have equal nonzero length".into(),
            ));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidInput("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "weights must sum to 1, got {total}"
            )));
        }
        let d = means[0].len();
        let mut chols = Vec::with_capacity(covariances.len());
        for (c, (mean, cov)) in means.iter().zip(&covariances).enumerate() {
            if mean.len() != d || cov.len() != d * d {
                return Err(Error::InvalidInput(format!(
                    "component {c} has inconsistent dimensions"
                )));
            }
            let chol = cholesky(cov, d).ok_or(Error::NotPositiveDefinite { component: c })?;
            chols.push(chol);
        }
        Ok(MixtureSpec { weights, means, covariances, chols, d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Two-dimensional two-component benchmark mixture:
    /// 2/5 N((-1.5, 0.6), [[1, .5], [.5, 1]]) + 3/5 N((2, -1.5), I).
    pub fn scenario_2d() -> Self {
        MixtureSpec::new(
            vec![0.4, 0.6],
            vec![vec![-1.5, 0.6], vec![2.0, -1.5]],
            vec![
                vec![1.0, 0.5, 0.5, 1.0],
                vec![1.0, 0.0, 0.0, 1.0],
            ],
        )
        .expect("valid built-in mixture")
    }

    /// Three-dimensional three-component benchmark mixture.
    pub fn scenario_3d() -> Self {
        MixtureSpec::new(
            vec![0.4, 0.4, 0.2],
            vec![
                vec![-1.5, 0.6, 1.0],
                vec![2.0, -1.5, 0.0],
                vec![-2.6, -3.0, -2.0],
            ],
            vec![
                vec![1.0, 0.5, 0.5, 0.5, 1.0, 0.5, 0.5, 0.5, 1.0],
                vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
                vec![1.0, -0.4, 0.6, -0.4, 1.0, 0.0, 0.6, 0.0, 1.0],
            ],
        )
        .expect("valid built-in mixture")
    }
}

/// i.i.d. draws: component by weight, then mean + L z with z standard normal.
pub fn sample_mixture(spec: &MixtureSpec, n: usize, seed: u64) -> PointMatrix {
    let d = spec.d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(n * d);
    let mut z = vec![0.0; d];
    for _ in 0..n {
        let mut u: f64 = rng.random();
        let mut comp = spec.weights.len() - 1;
        for (c, &w) in spec.weights.iter().enumerate() {
            if u < w {
                comp = c;
                break;
            }
            u -= w;
        }
        for zj in z.iter_mut() {
            *zj = rng.sample(StandardNormal);
        }
        let chol = &spec.chols[comp];
        let mean = &spec.means[comp];
        for i in 0..d {
            let mut x = mean[i];
            for j in 0..=i {
                x += chol[i * d + j] * z[j];
            }
            data.push(x);
        }
    }
    PointMatrix::new(data, d).expect("n*d entries")
}

/// A distribution with a computable rectangle-mass oracle.
#[derive(Debug, Clone)]
pub enum Target {
    /// Uniform on [0,1]^d; masses are exact (rectangles are clipped to the
    /// cube, so unbounded rectangles are fine here).
    UniformCube { dim: usize },
    /// Gaussian mixture; diagonal components are exact products of normal
    /// CDFs, correlated components integrate by randomized QMC and require
    /// a bounded rectangle.
    Mixture(MixtureSpec),
}

/// A mass value with its integration standard error (0 when exact).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEstimate {
    pub value: f64,
    pub std_error: f64,
}

impl Target {
    pub fn dim(&self) -> usize {
        match self {
            Target::UniformCube { dim } => *dim,
            Target::Mixture(spec) => spec.dim(),
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> PointMatrix {
        match self {
            Target::UniformCube { dim } => sample_uniform_cube(n, *dim, seed),
            Target::Mixture(spec) => sample_mixture(spec, n, seed),
        }
    }

    /// Probability mass of a rectangle under this distribution.
    pub fn mass(&self, rect: &Rect) -> Result<MassEstimate, Error> {
        self.mass_with(rect, DEFAULT_QMC_POINTS, 0x9d2c_5680)
    }

    pub fn mass_with(
        &self,
        rect: &Rect,
        qmc_points: usize,
        qmc_seed: u64,
    ) -> Result<MassEstimate, Error> {
        match self {
            Target::UniformCube { dim } => {
                debug_assert_eq!(*dim, rect.dim());
                let mut volume = 1.0;
                for (&l, &u) in rect.lower().iter().zip(rect.upper()) {
                    let span = u.min(1.0) - l.max(0.0);
                    if span <= 0.0 {
                        return Ok(MassEstimate { value: 0.0, std_error: 0.0 });
                    }
                    volume *= span;
                }
                Ok(MassEstimate { value: volume, std_error: 0.0 })
            }
            Target::Mixture(spec) => {
                if !rect.is_bounded() {
                    return Err(Error::UnboundedRect);
                }
                let d = spec.dim();
                let mut value = 0.0;
                let mut var = 0.0;
                for (c, &w) in spec.weights.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let cov = &spec.covariances[c];
                    if is_diagonal(cov, d) {
                        value += w
                            * diagonal_rect_mass(
                                &spec.means[c],
                                cov,
                                rect.lower(),
                                rect.upper(),
                            );
                    } else {
                        let (m, se) = mvn_rect_mass(
                            &spec.means[c],
                            &spec.chols[c],
                            rect.lower(),
                            rect.upper(),
                            qmc_points,
                            rep_seed(qmc_seed, c),
                        )?;
                        value += w * m;
                        var += (w * se) * (w * se);
                    }
                }
                Ok(MassEstimate { value, std_error: var.sqrt() })
            }
        }
    }
}

/// Two-sided KS distance of values already mapped through a hypothesized CDF.
pub fn ks_statistic(uniforms: &mut [f64]) -> f64 {
    uniforms.sort_unstable_by(f64::total_cmp);
    let m = uniforms.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &u) in uniforms.iter().enumerate() {
        sup = sup.max((i as f64 + 1.0) / m - u).max(u - i as f64 / m);
    }
    sup
}

/// Asymptotic two-sided KS p-value with the small-sample correction.
pub fn ks_p_value(stat: f64, m: usize) -> f64 {
    let sm = (m as f64).sqrt();
    kolmogorov_q((sm + 0.12 + 0.11 / sm) * stat)
}

/// Deterministic count of the node at heap index `k` for a sample of size
/// `root_count`, or an error when the stopping rule makes it unreachable.
pub fn deterministic_count(root_count: usize, k: u64, stop: f64) -> Result<usize, Error> {
    let bits = 64 - (k + 1).leading_zeros();
    let mut count = root_count;
    for level in (0..bits.saturating_sub(1)).rev() {
        if (count as f64) < stop || count == 0 {
            return Err(Error::InvalidInput(format!(
                "node {k} is never created: an ancestor with {count} points is a leaf"
            )));
        }
        let half = count.div_ceil(2);
        count = if (k + 1) >> level & 1 == 0 { half - 1 } else { count - half };
    }
    Ok(count)
}

#[derive(Debug, Clone)]
pub struct PivotResult {
    pub replications: usize,
    pub sample_size: usize,
    pub dim: usize,
    pub node_index: u64,
    pub node_count: usize,
    pub ks_statistic: f64,
    pub p_value: f64,
}

/// Sample `reps` uniform datasets, record the true probability content of
/// the node-`k` rectangle each time, and KS-test the sample against the
/// pivot law Beta(n_k + 1, n - n_k).
pub fn pivot_check(
    n: usize,
    d: usize,
    node_index: u64,
    reps: usize,
    seed: u64,
) -> Result<PivotResult, Error> {
    if node_index == 0 {
        return Err(Error::InvalidInput(
            "the full-space root has deterministic mass 1; pick a proper node".into(),
        ));
    }
    let cfg = Config { root_mode: RootMode::FullSpace, ..Config::default() };
    let node_count = deterministic_count(n, node_index, cfg.stop_threshold(n))?;
    let params = BetaParams::pivot(node_count, n)?;
    let target = Target::UniformCube { dim: d };

    let mut uniforms: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let data = target.sample(n, rep_seed(seed, rep));
            let tree = build_kdtree(data, &cfg)?;
            let node = tree
                .node_by_index(node_index)
                .expect("count recursion guarantees existence");
            debug_assert_eq!(node.count, node_count);
            let mass = target.mass(&node.rect)?.value;
            beta_cdf(mass, &params)
        })
        .collect::<Result<_, Error>>()?;

    let ks = ks_statistic(&mut uniforms);
    Ok(PivotResult {
        replications: reps,
        sample_size: n,
        dim: d,
        node_index,
        node_count,
        ks_statistic: ks,
        p_value: ks_p_value(ks, reps),
    })
}

#[derive(Debug, Clone)]
pub struct CoverageResult {
    pub replications: usize,
    /// Replications where every bounded rectangle's CI held its true mass.
    pub hits: usize,
    /// Replications discarded because the integration error was too large
    /// relative to the CI half-width.
    pub discarded: usize,
    pub coverage_rate: f64,
    /// Binomial standard error of the coverage rate.
    pub std_error: f64,
    /// Pruned-histogram bin count per kept replication.
    pub bin_counts: Vec<usize>,
}

impl CoverageResult {
    pub fn bin_count_stats(&self) -> (usize, usize, usize) {
        count_stats(&self.bin_counts)
    }
}

fn count_stats(counts: &[usize]) -> (usize, usize, usize) {
    if counts.is_empty() {
        return (0, 0, 0);
    }
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    (sorted[0], sorted[sorted.len() / 2], sorted[sorted.len() - 1])
}

pub fn median_count(counts: &[usize]) -> usize {
    count_stats(counts).1
}

/// Per replication: build the tree and all CIs, compare each bounded
/// rectangle's CI against the true mass, and record the histogram size.
pub fn coverage_check(
    target: &Target,
    n: usize,
    alpha: f64,
    cfg: &Config,
    reps: usize,
    seed: u64,
) -> Result<CoverageResult, Error> {
    coverage_check_with_qmc(target, n, alpha, cfg, reps, seed, DEFAULT_QMC_POINTS)
}

/// [`coverage_check`] with an explicit QMC node budget for the mass oracle.
/// A replication is discarded (and counted) whenever an integration error
/// estimate exceeds 1% of the CI half-width it is compared against.
pub fn coverage_check_with_qmc(
    target: &Target,
    n: usize,
    alpha: f64,
    cfg: &Config,
    reps: usize,
    seed: u64,
    qmc_points: usize,
) -> Result<CoverageResult, Error> {
    struct Rep {
        covered: bool,
        discarded: bool,
        bins: usize,
    }

    let outcomes: Vec<Rep> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let data = target.sample(n, rep_seed(seed, rep));
            let tree = build_kdtree(data, cfg)?;
            let inf = infer(&tree, alpha)?;
            let mut covered = true;
            let mut discarded = false;
            for (slot, node) in tree.nodes().iter().enumerate() {
                let Some((lo, hi)) = inf.nodes[slot].prob_ci else {
                    continue;
                };
                let mass = target.mass_with(
                    &node.rect,
                    qmc_points,
                    rep_seed(seed ^ 0x51ed_270b, rep).wrapping_add(slot as u64),
                )?;
                let half_width = 0.5 * (hi - lo);
                if mass.std_error > 0.0 && mass.std_error > 0.01 * half_width {
                    // one untrustworthy comparison spoils the whole
                    // all-rectangles event; discarding wins over a miss
                    discarded = true;
                    break;
                }
                if !(lo <= mass.value && mass.value <= hi) {
                    covered = false;
                }
            }
            let bins = match extract_betatree(&tree, &inf) {
                Ok(bt) => bt.bins.len(),
                Err(Error::EmptyBetaTree) => 0,
                Err(e) => return Err(e),
            };
            Ok(Rep { covered, discarded, bins })
        })
        .collect::<Result<_, Error>>()?;

    let discarded = outcomes.iter().filter(|r| r.discarded).count();
    let kept = reps - discarded;
    let hits = outcomes.iter().filter(|r| !r.discarded && r.covered).count();
    let rate = if kept > 0 { hits as f64 / kept as f64 } else { 0.0 };
    let se = if kept > 0 {
        (rate * (1.0 - rate) / kept as f64).sqrt()
    } else {
        0.0
    };
    Ok(CoverageResult {
        replications: reps,
        hits,
        discarded,
        coverage_rate: rate,
        std_error: se,
        bin_counts: outcomes
            .iter()
            .filter(|r| !r.discarded)
            .map(|r| r.bins)
            .collect(),
    })
}

/// Histogram sizes over independent replications (no mass oracle needed).
pub fn bin_count_study(
    target: &Target,
    n: usize,
    alpha: f64,
    cfg: &Config,
    reps: usize,
    seed: u64,
) -> Result<Vec<usize>, Error> {
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let data = target.sample(n, rep_seed(seed, rep));
            let tree = build_kdtree(data, cfg)?;
            let inf = infer(&tree, alpha)?;
            match extract_betatree(&tree, &inf) {
                Ok(bt) => Ok(bt.bins.len()),
                Err(Error::EmptyBetaTree) => Ok(0),
                Err(e) => Err(e),
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct WidthBoundReport {
    /// Bounded nodes with count inside [ln^2 n, n^q].
    pub eligible: usize,
    pub violations: usize,
}

/// Check the sharp width envelope on every eligible node: at each point G of
/// the probability CI (both endpoints plus a 100-point grid),
///
///   sqrt(n) |G - F_n| / sqrt(G (1-G))  <=  (sqrt(2) + 4/sqrt(ln n)) sqrt(ln(e/G))
///
/// where F_n = (n_k + 1)/n. Returns the count of nodes violating it anywhere.
pub fn width_bound_check(tree: &KdTree, inference: &TreeInference, q: f64) -> WidthBoundReport {
    let n = tree.n;
    let mut eligible = 0;
    let mut violations = 0;
    for (slot, node) in tree.nodes().iter().enumerate() {
        let Some(ci) = inference.nodes[slot].prob_ci else {
            continue;
        };
        if inference.plan.alpha_at(node.depth) == 0.0 {
            continue;
        }
        if !count_in_envelope_regime(n, node.count, q) {
            continue;
        }
        eligible += 1;
        if width_bound_violates(n, node.count, ci) {
            violations += 1;
        }
    }
    WidthBoundReport { eligible, violations }
}

pub fn count_in_envelope_regime(n: usize, count: usize, q: f64) -> bool {
    let ln_n = (n as f64).ln();
    let c = count as f64;
    c >= ln_n * ln_n && c <= (n as f64).powf(q)
}

/// Envelope test for one probability CI.
pub fn width_bound_violates(n: usize, count: usize, ci: (f64, f64)) -> bool {
    let nf = n as f64;
    let fn_mass = (count as f64 + 1.0) / nf;
    let constant = 2f64.sqrt() + 4.0 / nf.ln().sqrt();
    let violates_at = |g: f64| -> bool {
        if !(g > 0.0 && g < 1.0) {
            return true;
        }
        let stat = nf.sqrt() * (g - fn_mass).abs() / (g * (1.0 - g)).sqrt();
        let bound = constant * (std::f64::consts::E / g).ln().sqrt();
        stat > bound
    };
    let (lo, hi) = ci;
    if violates_at(lo) || violates_at(hi) {
        return true;
    }
    (1..100).any(|i| violates_at(lo + (hi - lo) * i as f64 / 100.0))
}
