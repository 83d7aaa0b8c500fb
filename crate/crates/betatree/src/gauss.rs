//! Multivariate normal rectangle probabilities.
//!
//! Diagonal covariances reduce to products of one-dimensional CDF
//! differences. Correlated components use the sequential-conditioning
//! transform (Cholesky factor, one coordinate at a time) integrated with a
//! randomized Halton sequence; the spread across independent random shifts
//! gives the reported standard error.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::special::{normal_cdf, normal_quantile};

/// Lower-triangular Cholesky factor (row-major d x d), or `None` when the
/// matrix is not positive definite.
pub fn cholesky(matrix: &[f64], d: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(matrix.len(), d * d);
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut sum = matrix[i * d + j];
            for k in 0..j {
                sum -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if !(sum > 0.0) || !sum.is_finite() {
                    return None;
                }
                l[i * d + i] = sum.sqrt();
            } else {
                l[i * d + j] = sum / l[j * d + j];
            }
        }
    }
    Some(l)
}

pub fn is_diagonal(matrix: &[f64], d: usize) -> bool {
    for i in 0..d {
        for j in 0..d {
            if i != j && matrix[i * d + j] != 0.0 {
                return false;
            }
        }
    }
    true
}

/// Product of per-coordinate normal CDF differences (independent case).
/// Bounds may be infinite.
pub fn diagonal_rect_mass(mean: &[f64], cov: &[f64], lower: &[f64], upper: &[f64]) -> f64 {
    let d = mean.len();
    let mut mass = 1.0;
    for p in 0..d {
        let sd = cov[p * d + p].sqrt();
        let lo = cdf_standardized(lower[p], mean[p], sd);
        let hi = cdf_standardized(upper[p], mean[p], sd);
        mass *= (hi - lo).max(0.0);
    }
    mass
}

fn cdf_standardized(x: f64, mean: f64, sd: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        0.0
    } else if x == f64::INFINITY {
        1.0
    } else {
        normal_cdf((x - mean) / sd)
    }
}

const HALTON_BASES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical-inverse of `index` in the given base.
fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let b = base as f64;
    while index > 0 {
        f /= b;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

pub const DEFAULT_QMC_POINTS: usize = 1_000_000;
const QMC_SHIFTS: usize = 8;

/// P(lower <= X <= upper) for X ~ N(mean, L L^T) with finite bounds,
/// with a standard-error estimate from the shift spread.
pub fn mvn_rect_mass(
    mean: &[f64],
    chol: &[f64],
    lower: &[f64],
    upper: &[f64],
    points: usize,
    seed: u64,
) -> Result<(f64, f64), Error> {
    let d = mean.len();
    if lower.iter().chain(upper).any(|b| !b.is_finite()) {
        return Err(Error::UnboundedRect);
    }
    if d == 1 {
        let sd = chol[0];
        let mass = cdf_standardized(upper[0], mean[0], sd) - cdf_standardized(lower[0], mean[0], sd);
        return Ok((mass.max(0.0), 0.0));
    }
    if d - 1 > HALTON_BASES.len() {
        return Err(Error::InvalidInput(format!(
            "QMC integration supports up to {} dimensions",
            HALTON_BASES.len() + 1
        )));
    }

    let a: Vec<f64> = lower.iter().zip(mean).map(|(l, m)| l - m).collect();
    let b: Vec<f64> = upper.iter().zip(mean).map(|(u, m)| u - m).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_shift = (points / QMC_SHIFTS).max(1);
    let mut shift_means = Vec::with_capacity(QMC_SHIFTS);
    let mut w = vec![0.0; d - 1];
    let mut y = vec![0.0; d - 1];

    for _ in 0..QMC_SHIFTS {
        let shift: Vec<f64> = (0..d - 1).map(|_| rng.random::<f64>()).collect();
        let mut acc = 0.0;
        for i in 0..per_shift {
            for (j, wj) in w.iter_mut().enumerate() {
                let v = halton(i as u64 + 1, HALTON_BASES[j]) + shift[j];
                *wj = v - v.floor();
            }
            acc += genz_factor(&a, &b, chol, d, &w, &mut y);
        }
        shift_means.push(acc / per_shift as f64);
    }

    let value = shift_means.iter().sum::<f64>() / QMC_SHIFTS as f64;
    let var = shift_means
        .iter()
        .map(|m| (m - value) * (m - value))
        .sum::<f64>()
        / (QMC_SHIFTS as f64 - 1.0);
    let se = (var / QMC_SHIFTS as f64).sqrt();
    Ok((value.clamp(0.0, 1.0), se))
}

/// One integrand evaluation of the sequential-conditioning transform.
fn genz_factor(a: &[f64], b: &[f64], chol: &[f64], d: usize, w: &[f64], y: &mut [f64]) -> f64 {
    let mut dlo = normal_cdf(a[0] / chol[0]);
    let mut dhi = normal_cdf(b[0] / chol[0]);
    let mut f = dhi - dlo;
    for i in 1..d {
        let z = (dlo + w[i - 1] * (dhi - dlo)).clamp(1e-300, 1.0 - 1e-16);
        y[i - 1] = normal_quantile(z).expect("z clamped into (0,1)");
        let mut t = 0.0;
        for j in 0..i {
            t += chol[i * d + j] * y[j];
        }
        let lii = chol[i * d + i];
        dlo = normal_cdf((a[i] - t) / lii);
        dhi = normal_cdf((b[i] - t) / lii);
        f *= (dhi - dlo).max(0.0);
        if f == 0.0 {
            return 0.0;
        }
    }
    f
}
