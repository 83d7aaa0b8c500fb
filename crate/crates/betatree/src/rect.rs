//! Axis-aligned rectangles with possibly infinite bounds.
//!
//! Rectangles are open boxes: a point belongs to the interior when it is
//! strictly between the bounds in every coordinate. Adjacency between bins
//! uses the closed intervals instead, so touching faces, edges and corners
//! count as overlapping.

use crate::error::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct Rect {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Rect {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, Error> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidInput(format!(
                "rectangle bounds must be nonempty and of equal length, got {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for (p, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() || !(l < u) {
                return Err(Error::InvalidInput(format!(
                    "invalid bounds in coordinate {p}: [{l}, {u}]"
                )));
            }
        }
        Ok(Rect { lower, upper })
    }

    /// The whole space: (-inf, +inf) in every coordinate.
    pub fn unbounded(d: usize) -> Self {
        Rect {
            lower: vec![f64::NEG_INFINITY; d],
            upper: vec![f64::INFINITY; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.iter().all(|l| l.is_finite()) && self.upper.iter().all(|u| u.is_finite())
    }

    /// Product of side lengths; `None` when any bound is infinite.
    pub fn volume(&self) -> Option<f64> {
        if !self.is_bounded() {
            return None;
        }
        Some(
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(l, u)| u - l)
                .product(),
        )
    }

    /// Strict interior membership.
    pub fn contains_interior(&self, point: &[f64]) -> bool {
        debug_assert_eq!(point.len(), self.dim());
        point
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&x, (&l, &u))| l < x && x < u)
    }

    /// Closed-interval overlap in every coordinate (the bin adjacency test).
    pub fn closed_overlaps(&self, other: &Rect) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.lower
            .iter()
            .zip(&self.upper)
            .zip(other.lower.iter().zip(&other.upper))
            .all(|((&l1, &u1), (&l2, &u2))| l1 <= u2 && l2 <= u1)
    }

    /// Midpoint of a bounded rectangle.
    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    pub(crate) fn with_upper(&self, axis: usize, value: f64) -> Rect {
        let mut r = self.clone();
        r.upper[axis] = value;
        r
    }

    pub(crate) fn with_lower(&self, axis: usize, value: f64) -> Rect {
        let mut r = self.clone();
        r.lower[axis] = value;
        r
    }
}
