//! Exact Beta-distribution CDF and quantile kernels.
//!
//! The CDF is the regularized incomplete beta function, evaluated with the
//! standard continued fraction (modified Lentz) after the symmetry switch at
//! x = (a+1)/(a+b+2). The quantile inverts the CDF with a bracketed Newton
//! iteration started from the normal approximation.
//!
//! Shapes in this crate reach the sample size (a = n_k+1, b = n-n_k with n up
//! to 1e6), so the power prefactor x^a (1-x)^b / B(a,b) is evaluated on the
//! log scale with the Stirling remainder split out. The naive form
//! a ln x + b ln(1-x) - ln B(a,b) cancels catastrophically at large shapes
//! (three terms of size ~1e6 summing to O(1)); regrouping against the mean
//! keeps the absolute error of the exponent near 1e-13.

use crate::error::Error;
use crate::special::{ln1p_minus_x, ln_beta, stirling_remainder, LN_2PI};

/// Shape pair (a, b) of a Beta distribution; both must be positive and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    pub a: f64,
    pub b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self, Error> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidShape { a, b });
        }
        Ok(BetaParams { a, b })
    }

    /// Shapes of the pivot for a rectangle holding `count` of `n` points:
    /// Beta(count + 1, n - count).
    pub fn pivot(count: usize, n: usize) -> Result<Self, Error> {
        BetaParams::new(count as f64 + 1.0, (n - count) as f64)
    }

    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    pub fn sd(&self) -> f64 {
        let s = self.a + self.b;
        (self.a * self.b / (s * s * (s + 1.0))).sqrt()
    }
}

const CF_MAX_ITER: usize = 20_000;
const CF_EPS: f64 = 1e-16;

/// log of x^a (1-x)^b / B(a, b) for 0 < x < 1.
fn ln_prefactor(x: f64, a: f64, b: f64) -> f64 {
    if a.min(b) < 16.0 {
        return a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    }
    let s = a + b;
    // c = (x - a/s) * s is the only cancellation-prone difference; everything
    // downstream is expressed through it.
    let c = x * s - a;
    let u1 = c / a;
    let u2 = -c / b;
    let g = a * ln1p_minus_x(u1) + b * ln1p_minus_x(u2) + (a * u1 + b * u2);
    g + 0.5 * (a.ln() + b.ln() - s.ln() - LN_2PI)
        - (stirling_remainder(a) + stirling_remainder(b) - stirling_remainder(s))
}

/// Beta density at x (used as the Newton derivative in the quantile solver).
fn beta_pdf(x: f64, p: &BetaParams) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    (ln_prefactor(x, p.a, p.b) - x.ln() - (1.0 - x).ln()).exp()
}

/// Regularized incomplete beta I_x(a, b): the Beta(a, b) CDF at x.
pub fn beta_cdf(x: f64, p: &BetaParams) -> Result<f64, Error> {
    BetaParams::new(p.a, p.b)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!(
            "beta_cdf requires x in [0,1], got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    // symmetry switch keeps the continued fraction in its fast region
    let v = if x <= (p.a + 1.0) / (p.a + p.b + 2.0) {
        cf_regularized(x, p.a, p.b)?
    } else {
        1.0 - cf_regularized(1.0 - x, p.b, p.a)?
    };
    Ok(v.clamp(0.0, 1.0))
}

/// I_x(a,b) via prefactor times the DLMF 8.17.22 continued fraction.
fn cf_regularized(x: f64, a: f64, b: f64) -> Result<f64, Error> {
    let prefix = ln_prefactor(x, a, b).exp() / a;
    let tiny = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=CF_MAX_ITER {
        let fm = m as f64;
        let m2 = 2.0 * fm;

        let aa = fm * (b - fm) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + fm) * (qab + fm) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;

        if (del - 1.0).abs() < CF_EPS {
            return Ok(prefix * h);
        }
    }
    Err(Error::NoConvergence {
        op: "beta_cdf continued fraction",
        iterations: CF_MAX_ITER,
    })
}

const QUANTILE_MAX_ITER: usize = 200;

/// Beta(a, b) quantile: the x with I_x(a, b) = q.
///
/// Bracketed Newton started at the normal approximation mean + z*sd, with
/// bisection whenever a step leaves the bracket.
pub fn beta_quantile(q: f64, p: &BetaParams) -> Result<f64, Error> {
    BetaParams::new(p.a, p.b)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidInput(format!(
            "beta_quantile requires q in (0,1), got {q}"
        )));
    }

    let z = crate::special::normal_quantile(q)?;
    let mut x = (p.mean() + z * p.sd()).clamp(1e-12, 1.0 - 1e-12);
    let mut lo = 0.0;
    let mut hi = 1.0;

    for _ in 0..QUANTILE_MAX_ITER {
        let f = beta_cdf(x, p)? - q;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if f == 0.0 {
            return Ok(x);
        }
        let deriv = beta_pdf(x, p);
        let mut next = if deriv > 0.0 && deriv.is_finite() {
            x - f / deriv
        } else {
            f64::NAN
        };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() || hi - lo <= f64::MIN_POSITIVE {
            return Ok(next);
        }
        x = next;
    }
    // Newton stalls only at noise level; accept if the residual is tiny.
    if (beta_cdf(x, p)? - q).abs() <= 1e-9 {
        return Ok(x);
    }
    Err(Error::NoConvergence {
        op: "beta_quantile",
        iterations: QUANTILE_MAX_ITER,
    })
}
