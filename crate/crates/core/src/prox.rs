//! Closed-form proximal operators and the σ-augmentation
//! Ψ_σ(x) = Ψ(x) + (σ/2)‖x − x₀‖².

use crate::error::{Error, Result};
use crate::problem::Regularizer;
use crate::vector::Vector;

/// Absolute tolerance on the scalar root defining the ‖·‖^ρ prox.
pub const NORM_POWER_ROOT_TOL: f64 = 1e-14;

pub fn prox_zero(step: f64, y: &Vector) -> Vector {
    debug_assert!(step > 0.0);
    y.clone()
}

/// Componentwise soft threshold at level step·weight.
pub fn prox_l1(step: f64, weight: f64, y: &Vector) -> Vector {
    debug_assert!(step > 0.0 && weight >= 0.0);
    let t = step * weight;
    // +0.0 inside the threshold, never -0.0
    y.map(|v| if v.abs() <= t { 0.0 } else { v.signum() * (v.abs() - t) })
}

/// Block soft threshold (1 − step·weight/‖y‖)₊·y.
pub fn prox_l2norm(step: f64, weight: f64, y: &Vector) -> Vector {
    debug_assert!(step > 0.0 && weight >= 0.0);
    let ny = y.norm();
    let t = step * weight;
    if ny <= t {
        return Vector::zeros(y.len());
    }
    y.scale(1.0 - t / ny)
}

/// Prox of weight·‖x‖₂^ρ for 1 < ρ < 2.
///
/// The output is t·y/‖y‖ where t ≥ 0 solves t + c·t^(ρ−1) = ‖y‖ with
/// c = step·weight·ρ. The root is found by Newton steps safeguarded by a
/// shrinking bracket starting from [0, min(‖y‖, (‖y‖/c)^(1/(ρ−1)))].
pub fn prox_norm_power(step: f64, weight: f64, rho: f64, y: &Vector) -> Result<Vector> {
    if !(step > 0.0 && weight > 0.0 && rho > 1.0 && rho < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "prox_norm_power needs step > 0, weight > 0, 1 < rho < 2 (got {step}, {weight}, {rho})"
        )));
    }
    let r = y.norm();
    if r == 0.0 {
        return Ok(Vector::zeros(y.len()));
    }
    let c = step * weight * rho;
    let t = norm_power_root(r, c, rho)?;
    Ok(y.scale(t / r))
}

/// Unique t ≥ 0 with t + c·t^(ρ−1) = r.
pub(crate) fn norm_power_root(r: f64, c: f64, rho: f64) -> Result<f64> {
    let e = rho - 1.0;
    let h = |t: f64| t + c * t.powf(e) - r;
    let mut lo = 0.0_f64;
    // both r and (r/c)^(1/e) bound the root from above
    let by_power = (r / c).powf(1.0 / e);
    if by_power < f64::MIN_POSITIVE {
        // c·t^(ρ−1) dominates and the root is at or below the normal range
        return Ok(by_power.min(r));
    }
    let mut hi = r.min(by_power);
    if !hi.is_finite() {
        hi = r;
    }
    if h(hi) < 0.0 {
        // rounding in the second bound; fall back to the always-valid one
        hi = r;
    }
    if !(h(lo) < 0.0 && h(hi) >= 0.0) {
        return Err(Error::RootFinding(format!(
            "cannot bracket root of t + {c:e} t^{e} = {r:e} on [0, {hi:e}]"
        )));
    }
    if h(hi) == 0.0 {
        return Ok(hi);
    }
    let mut t = 0.5 * hi;
    for _ in 0..400 {
        let ht = h(t);
        if ht == 0.0 {
            return Ok(t);
        }
        if ht < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let dh = 1.0 + c * e * t.powf(e - 1.0);
        let newton = t - ht / dh;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let width = hi - lo;
        if (next - t).abs() <= NORM_POWER_ROOT_TOL.min(4.0 * f64::EPSILON * t)
            || width <= 4.0 * f64::EPSILON * hi
            || width <= f64::MIN_POSITIVE
        {
            return Ok(next);
        }
        t = next;
    }
    Err(Error::RootFinding(format!("no convergence for t + {c:e} t^{e} = {r:e}")))
}

/// Ψ ≡ 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroReg;

impl Regularizer for ZeroReg {
    fn value(&self, _x: &Vector) -> f64 {
        0.0
    }

    fn prox(&self, step: f64, point: &Vector) -> Result<Vector> {
        Ok(prox_zero(step, point))
    }
}

/// Ψ(x) = weight·‖x‖₁.
#[derive(Clone, Copy, Debug)]
pub struct L1Norm {
    pub weight: f64,
}

impl L1Norm {
    pub fn new(weight: f64) -> Self {
        assert!(weight >= 0.0);
        L1Norm { weight }
    }
}

impl Regularizer for L1Norm {
    fn value(&self, x: &Vector) -> f64 {
        self.weight * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    fn prox(&self, step: f64, point: &Vector) -> Result<Vector> {
        Ok(prox_l1(step, self.weight, point))
    }
}

/// Ψ(x) = weight·‖x‖₂.
#[derive(Clone, Copy, Debug)]
pub struct L2Norm {
    pub weight: f64,
}

impl L2Norm {
    pub fn new(weight: f64) -> Self {
        assert!(weight >= 0.0);
        L2Norm { weight }
    }
}

impl Regularizer for L2Norm {
    fn value(&self, x: &Vector) -> f64 {
        self.weight * x.norm()
    }

    fn prox(&self, step: f64, point: &Vector) -> Result<Vector> {
        Ok(prox_l2norm(step, self.weight, point))
    }
}

/// Ψ(x) = weight·‖x‖₂^ρ with 1 < ρ < 2.
#[derive(Clone, Copy, Debug)]
pub struct NormPower {
    pub weight: f64,
    pub rho: f64,
}

impl NormPower {
    pub fn new(weight: f64, rho: f64) -> Self {
        assert!(weight > 0.0 && rho > 1.0 && rho < 2.0);
        NormPower { weight, rho }
    }
}

impl Regularizer for NormPower {
    fn value(&self, x: &Vector) -> f64 {
        self.weight * x.norm().powf(self.rho)
    }

    fn prox(&self, step: f64, point: &Vector) -> Result<Vector> {
        prox_norm_power(step, self.weight, self.rho, point)
    }
}

/// Indicator of the box [lo, hi]ⁿ. Not part of the testbed; handy for
/// exercising the extended-real paths.
#[derive(Clone, Copy, Debug)]
pub struct BoxIndicator {
    pub lo: f64,
    pub hi: f64,
}

impl BoxIndicator {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi);
        BoxIndicator { lo, hi }
    }
}

impl Regularizer for BoxIndicator {
    fn value(&self, x: &Vector) -> f64 {
        if x.iter().all(|&v| v >= self.lo && v <= self.hi) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, _step: f64, point: &Vector) -> Result<Vector> {
        Ok(point.map(|v| v.clamp(self.lo, self.hi)))
    }
}

/// The quadratic (σ/2)‖x − center‖² added to a base regularizer.
#[derive(Clone, Debug, PartialEq)]
pub struct RegTerm {
    pub sigma: f64,
    pub center: Vector,
}

impl RegTerm {
    pub fn new(sigma: f64, center: Vector) -> Self {
        assert!(sigma >= 0.0 && sigma.is_finite());
        RegTerm { sigma, center }
    }

    pub fn penalty(&self, x: &Vector) -> f64 {
        if self.sigma == 0.0 {
            return 0.0;
        }
        0.5 * self.sigma * (x - &self.center).norm_sq()
    }

    /// Reduces argmin_x {Ψ(x) + (σ/2)‖x − x₀‖² + ‖x − y‖²/(2·step)} to a
    /// plain prox of Ψ: returns (step/(1+step·σ), (y + step·σ·x₀)/(1+step·σ)).
    pub fn reduce(&self, step: f64, y: &Vector) -> (f64, Vector) {
        if self.sigma == 0.0 {
            return (step, y.clone());
        }
        let d = 1.0 + step * self.sigma;
        (step / d, y.lincomb(1.0 / d, step * self.sigma / d, &self.center))
    }
}

/// Ψ_σ = Ψ + (σ/2)‖· − x₀‖² as a regularizer in its own right.
#[derive(Clone, Debug)]
pub struct AugmentedRegularizer<R> {
    pub base: R,
    pub term: RegTerm,
}

impl<R: Regularizer> AugmentedRegularizer<R> {
    pub fn new(base: R, term: RegTerm) -> Self {
        AugmentedRegularizer { base, term }
    }
}

impl<R: Regularizer> Regularizer for AugmentedRegularizer<R> {
    fn value(&self, x: &Vector) -> f64 {
        self.base.value(x) + self.term.penalty(x)
    }

    fn prox(&self, step: f64, point: &Vector) -> Result<Vector> {
        augmented_prox(&self.base, &self.term, step, point)
    }
}

pub fn augmented_prox<R: Regularizer + ?Sized>(
    base: &R,
    term: &RegTerm,
    step: f64,
    y: &Vector,
) -> Result<Vector> {
    let (s, u) = term.reduce(step, y);
    base.prox(s, &u)
}
