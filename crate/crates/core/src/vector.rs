//! Dense vectors in Rⁿ with the Euclidean inner product.

use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of Rⁿ, n ≥ 1.
///
/// Vectors built through [`Vector::new`] are checked for finiteness; the
/// arithmetic below does not re-check, so oracle outputs are validated at the
/// problem boundary instead.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { origin: "vector construction" });
        }
        Ok(Vector(entries))
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        Self::new(entries.to_vec())
    }

    /// Wraps entries without validation. Callers promise finiteness.
    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        Vector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "vector dimension must be positive");
        Vector(vec![0.0; n])
    }

    pub fn filled(n: usize, value: f64) -> Self {
        assert!(n > 0, "vector dimension must be positive");
        Vector(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false: a vector has at least one entry.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    fn check_same_len(&self, other: &Vector) {
        assert_eq!(
            self.len(),
            other.len(),
            "dimension mismatch between vectors"
        );
    }

    /// Euclidean inner product. Panics on a dimension mismatch; see
    /// [`inner_product`] for the checked form.
    pub fn dot(&self, other: &Vector) -> f64 {
        self.check_same_len(other);
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        let s = self.norm_sq();
        if s.is_finite() && s > f64::MIN_POSITIVE {
            return s.sqrt();
        }
        // rescale when the squared entries overflow or underflow
        let scale = self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 || !scale.is_finite() {
            return scale;
        }
        // power-of-two scaling keeps the rescaled entries exact
        let p = 2f64.powi(scale.log2().floor() as i32);
        let s: f64 = self.0.iter().map(|v| (v / p).powi(2)).sum();
        p * s.sqrt()
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        (self - other).norm()
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector(self.0.iter().map(|v| c * v).collect())
    }

    /// self += c·other
    pub fn add_scaled(&mut self, c: f64, other: &Vector) {
        self.check_same_len(other);
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += c * b;
        }
    }

    /// Returns a·self + b·other.
    pub fn lincomb(&self, a: f64, b: f64, other: &Vector) -> Vector {
        self.check_same_len(other);
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        self.lincomb(1.0, 1.0, rhs)
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        self.lincomb(1.0, -1.0, rhs)
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scale(self)
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

pub fn inner_product(a: &Vector, b: &Vector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(a.dot(b))
}

pub fn norm(x: &Vector) -> f64 {
    x.norm()
}

/// Σ cᵢvᵢ.
pub fn combine(coeffs: &[f64], vectors: &[&Vector]) -> Result<Vector> {
    if coeffs.len() != vectors.len() {
        return Err(Error::DimensionMismatch { expected: coeffs.len(), found: vectors.len() });
    }
    let first = vectors.first().ok_or(Error::EmptyVector)?;
    let n = first.len();
    let mut out = vec![0.0; n];
    for (c, v) in coeffs.iter().zip(vectors) {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += c * x;
        }
    }
    Ok(Vector(out))
}
