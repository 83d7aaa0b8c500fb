//! The dataset: a row-major n x d matrix of finite reals, with validation
//! and optional seeded tie-breaking.
//!
//! The downstream statistical guarantees assume a continuous distribution,
//! which in the sample translates to per-coordinate distinctness. Ties are a
//! hard error by default; opting into jitter breaks them with seeded uniform
//! noise of magnitude 1e-9 times the coordinate scale.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::error::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct PointMatrix {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl PointMatrix {
    pub fn new(data: Vec<f64>, d: usize) -> Result<Self, Error> {
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if data.len() % d != 0 {
            return Err(Error::InvalidInput(format!(
                "flat length {} is not a multiple of d={d}",
                data.len()
            )));
        }
        let n = data.len() / d;
        Ok(PointMatrix { data, n, d })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, Error> {
        let d = rows.first().map(|r| r.len()).unwrap_or(0);
        if d == 0 {
            return Err(Error::InvalidInput(
                "need at least one row with at least one coordinate".into(),
            ));
        }
        let mut data = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} coordinates, expected {d}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        PointMatrix::new(data, d)
    }

    pub fn empty(d: usize) -> Self {
        PointMatrix { data: Vec::new(), n: 0, d }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, row: usize, coordinate: usize) -> f64 {
        self.data[row * self.d + coordinate]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.d..(row + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    /// New matrix keeping the given rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> PointMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.d);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        PointMatrix { data, n: rows.len(), d: self.d }
    }

    fn set(&mut self, row: usize, coordinate: usize, value: f64) {
        self.data[row * self.d + coordinate] = value;
    }
}

/// Sorted row order of one coordinate; returns the first adjacent tie if any.
fn find_tie(data: &PointMatrix, coordinate: usize) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..data.n()).collect();
    order.sort_unstable_by(|&a, &b| data.get(a, coordinate).total_cmp(&data.get(b, coordinate)));
    order
        .windows(2)
        .find(|w| data.get(w[0], coordinate) == data.get(w[1], coordinate))
        .map(|w| (w[0], w[1]))
}

fn coordinate_scale(data: &PointMatrix, coordinate: usize) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in 0..data.n() {
        let v = data.get(r, coordinate);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let range = hi - lo;
    if range > 0.0 {
        range
    } else {
        hi.abs().max(1.0)
    }
}

const JITTER_RETRIES: usize = 8;

/// Validate finiteness and per-coordinate distinctness; break ties with
/// seeded noise when `cfg.jitter` is set.
pub fn validate_and_prepare(data: PointMatrix, cfg: &Config) -> Result<PointMatrix, Error> {
    if data.is_empty() {
        return Err(Error::InvalidInput("dataset is empty".into()));
    }
    for r in 0..data.n() {
        for p in 0..data.dim() {
            if !data.get(r, p).is_finite() {
                return Err(Error::NonFiniteValue { row: r, coordinate: p });
            }
        }
    }

    let mut data = data;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for p in 0..data.dim() {
        let Some((row_a, row_b)) = find_tie(&data, p) else {
            continue;
        };
        if !cfg.jitter {
            return Err(Error::TiesDetected { coordinate: p, row_a, row_b });
        }
        let scale = 1e-9 * coordinate_scale(&data, p);
        let mut ok = false;
        for _ in 0..JITTER_RETRIES {
            for r in 0..data.n() {
                let noise = (2.0 * rng.random::<f64>() - 1.0) * scale;
                data.set(r, p, data.get(r, p) + noise);
            }
            if find_tie(&data, p).is_none() {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::InvalidInput(format!(
                "jitter failed to break ties in coordinate {p}"
            )));
        }
    }
    Ok(data)
}
