//! Smooth oracles used by the testbed and the examples.

use crate::problem::SmoothOracle;
use crate::vector::Vector;

/// f ≡ 0, declared with a positive Lipschitz hint so that line-search
/// preconditions L ≥ L_min hold.
#[derive(Clone, Debug)]
pub struct ZeroSmooth {
    hint: f64,
}

impl ZeroSmooth {
    pub fn new(hint: f64) -> Self {
        assert!(hint > 0.0);
        ZeroSmooth { hint }
    }
}

impl SmoothOracle for ZeroSmooth {
    fn value(&self, _x: &Vector) -> f64 {
        0.0
    }

    fn gradient(&self, x: &Vector) -> Vector {
        Vector::zeros(x.len())
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(self.hint)
    }
}

/// f(x) = (c/2)‖x‖².
#[derive(Clone, Debug)]
pub struct ScaledSquare {
    c: f64,
}

impl ScaledSquare {
    pub fn new(c: f64) -> Self {
        assert!(c >= 0.0);
        ScaledSquare { c }
    }
}

impl SmoothOracle for ScaledSquare {
    fn value(&self, x: &Vector) -> f64 {
        0.5 * self.c * x.norm_sq()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        x.scale(self.c)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(self.c)
    }
}

/// f(x) = ½(x − x*)ᵀ diag(d) (x − x*).
#[derive(Clone, Debug)]
pub struct DiagonalQuadratic {
    diag: Vector,
    center: Vector,
    hint: Option<f64>,
}

impl DiagonalQuadratic {
    pub fn new(diag: Vector, center: Vector) -> Self {
        assert_eq!(diag.len(), center.len());
        assert!(diag.iter().all(|&d| d >= 0.0));
        let hint = Some(diag.max_abs());
        DiagonalQuadratic { diag, center, hint }
    }

    /// Drops the Lipschitz hint so solvers must discover L_f by backtracking.
    pub fn without_hint(mut self) -> Self {
        self.hint = None;
        self
    }

    pub fn diag(&self) -> &Vector {
        &self.diag
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }
}

impl SmoothOracle for DiagonalQuadratic {
    fn value(&self, x: &Vector) -> f64 {
        x.iter()
            .zip(self.center.iter())
            .zip(self.diag.iter())
            .map(|((xi, ci), di)| 0.5 * di * (xi - ci).powi(2))
            .sum()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let g = x
            .iter()
            .zip(self.center.iter())
            .zip(self.diag.iter())
            .map(|((xi, ci), di)| di * (xi - ci))
            .collect();
        Vector::from_vec_unchecked(g)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        self.hint
    }
}

/// f(x) = ½‖Ax − b‖² with a dense row-major A.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    rows: Vec<Vec<f64>>,
    b: Vec<f64>,
    hint: Option<f64>,
}

impl LeastSquares {
    pub fn new(rows: Vec<Vec<f64>>, b: Vec<f64>, hint: Option<f64>) -> Self {
        assert_eq!(rows.len(), b.len());
        assert!(!rows.is_empty());
        let n = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == n));
        LeastSquares { rows, b, hint }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn ncols(&self) -> usize {
        self.rows[0].len()
    }

    fn residual(&self, x: &Vector) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.b)
            .map(|(r, bi)| r.iter().zip(x.iter()).map(|(a, xj)| a * xj).sum::<f64>() - bi)
            .collect()
    }

    /// Aᵀ r.
    pub fn transpose_apply(&self, r: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols()];
        for (row, ri) in self.rows.iter().zip(r) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * ri;
            }
        }
        out
    }
}

impl SmoothOracle for LeastSquares {
    fn value(&self, x: &Vector) -> f64 {
        0.5 * self.residual(x).iter().map(|r| r * r).sum::<f64>()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        Vector::from_vec_unchecked(self.transpose_apply(&self.residual(x)))
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        self.hint
    }
}

/// f(x) = (1/p) Σᵢ xᵢᵖ for an even p ≥ 2. The Lipschitz constant of ∇f only
/// exists on bounded sets, so the hint is supplied by the caller.
#[derive(Clone, Debug)]
pub struct PowerSum {
    p: u32,
    hint: Option<f64>,
}

impl PowerSum {
    pub fn new(p: u32, hint: Option<f64>) -> Self {
        assert!(p >= 2 && p.is_multiple_of(2), "exponent must be even and at least 2");
        PowerSum { p, hint }
    }

    pub fn exponent(&self) -> u32 {
        self.p
    }
}

impl SmoothOracle for PowerSum {
    fn value(&self, x: &Vector) -> f64 {
        let p = self.p as i32;
        x.iter().map(|xi| xi.powi(p)).sum::<f64>() / self.p as f64
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let p = self.p as i32;
        x.map(|xi| xi.powi(p - 1))
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        self.hint
    }
}

/// A smooth oracle assembled from closures.
pub struct FnSmooth<F, G> {
    value: F,
    gradient: G,
    hint: Option<f64>,
}

impl<F, G> FnSmooth<F, G>
where
    F: Fn(&Vector) -> f64 + Send + Sync,
    G: Fn(&Vector) -> Vector + Send + Sync,
{
    pub fn new(value: F, gradient: G, hint: Option<f64>) -> Self {
        FnSmooth { value, gradient, hint }
    }
}

impl<F, G> SmoothOracle for FnSmooth<F, G>
where
    F: Fn(&Vector) -> f64 + Send + Sync,
    G: Fn(&Vector) -> Vector + Send + Sync,
{
    fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        (self.gradient)(x)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        self.hint
    }
}
