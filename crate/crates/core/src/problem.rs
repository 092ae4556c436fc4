//! The composite problem φ = f + Ψ and its oracle accounting.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prox::{AugmentedRegularizer, RegTerm};
use crate::vector::Vector;

/// First-order oracle of a smooth convex function f.
pub trait SmoothOracle: Send + Sync {
    fn value(&self, x: &Vector) -> f64;

    fn gradient(&self, x: &Vector) -> Vector;

    /// A valid upper bound on the Lipschitz constant of ∇f, when known.
    fn lipschitz_hint(&self) -> Option<f64> {
        None
    }
}

/// A proper closed convex function with an inexpensive proximal map.
pub trait Regularizer: Send + Sync {
    /// Ψ(x); may be `f64::INFINITY` outside the domain.
    fn value(&self, x: &Vector) -> f64;

    /// argmin_x { Ψ(x) + ‖x − point‖² / (2·step) }.
    fn prox(&self, step: f64, point: &Vector) -> Result<Vector>;
}

impl<R: Regularizer + ?Sized> Regularizer for Arc<R> {
    fn value(&self, x: &Vector) -> f64 {
        (**self).value(x)
    }

    fn prox(&self, step: f64, point: &Vector) -> Result<Vector> {
        (**self).prox(step, point)
    }
}

impl<R: Regularizer + ?Sized> Regularizer for &R {
    fn value(&self, x: &Vector) -> f64 {
        (**self).value(x)
    }

    fn prox(&self, step: f64, point: &Vector) -> Result<Vector> {
        (**self).prox(step, point)
    }
}

/// Cumulative oracle-call counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCounters {
    pub f_evals: u64,
    pub grad_evals: u64,
    pub prox_evals: u64,
}

impl OracleCounters {
    pub fn total(&self) -> u64 {
        self.f_evals + self.grad_evals + self.prox_evals
    }

    /// Component-wise difference `self − earlier`.
    pub fn since(&self, earlier: &OracleCounters) -> OracleCounters {
        OracleCounters {
            f_evals: self.f_evals - earlier.f_evals,
            grad_evals: self.grad_evals - earlier.grad_evals,
            prox_evals: self.prox_evals - earlier.prox_evals,
        }
    }
}

/// Value of φ split into its smooth and nonsmooth parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiParts {
    pub f: f64,
    pub psi: f64,
}

impl PhiParts {
    pub fn phi(&self) -> f64 {
        self.f + self.psi
    }
}

/// min_x φ(x) = f(x) + Ψ(x), with every oracle call routed through counters.
///
/// The counters use interior mutability so that solver code can hold shared
/// references; the wrapper is `Send` but not `Sync`, so one thread drives a
/// run. Share the oracles themselves (they are `Arc`s) across threads and
/// build one wrapper per run.
pub struct CompositeProblem {
    smooth: Arc<dyn SmoothOracle>,
    reg: Arc<dyn Regularizer>,
    counters: Cell<OracleCounters>,
}

/// Clones share the oracles and copy the current counter values.
impl Clone for CompositeProblem {
    fn clone(&self) -> Self {
        CompositeProblem { smooth: Arc::clone(&self.smooth), reg: Arc::clone(&self.reg), counters: self.counters.clone() }
    }
}

impl fmt::Debug for CompositeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompositeProblem")
            .field("lipschitz_hint", &self.smooth.lipschitz_hint())
            .field("counters", &self.counters.get())
            .finish()
    }
}

impl CompositeProblem {
    pub fn new(smooth: Arc<dyn SmoothOracle>, reg: Arc<dyn Regularizer>) -> Self {
        CompositeProblem { smooth, reg, counters: Cell::new(OracleCounters::default()) }
    }

    /// A fresh wrapper over the same oracles with zeroed counters.
    pub fn fresh(&self) -> Self {
        CompositeProblem::new(Arc::clone(&self.smooth), Arc::clone(&self.reg))
    }

    /// The regularized problem φ_σ = f + Ψ + (σ/2)‖· − center‖², sharing f.
    pub fn regularized(&self, sigma: f64, center: Vector) -> Self {
        let reg = AugmentedRegularizer::new(Arc::clone(&self.reg), RegTerm::new(sigma, center));
        CompositeProblem::new(Arc::clone(&self.smooth), Arc::new(reg))
    }

    pub fn smooth(&self) -> &Arc<dyn SmoothOracle> {
        &self.smooth
    }

    pub fn regularizer(&self) -> &Arc<dyn Regularizer> {
        &self.reg
    }

    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.smooth.lipschitz_hint()
    }

    pub fn counters(&self) -> OracleCounters {
        self.counters.get()
    }

    pub fn reset_counters(&self) {
        self.counters.set(OracleCounters::default());
    }

    fn bump(&self, update: impl FnOnce(&mut OracleCounters)) {
        let mut c = self.counters.get();
        update(&mut c);
        self.counters.set(c);
    }

    /// One φ evaluation (one `f_evals` increment), returned split into f and Ψ.
    pub fn eval_parts(&self, x: &Vector) -> Result<PhiParts> {
        self.bump(|c| c.f_evals += 1);
        let f = self.smooth.value(x);
        if !f.is_finite() {
            return Err(Error::NonFinite { origin: "smooth oracle value" });
        }
        let psi = self.reg.value(x);
        if psi.is_nan() || psi == f64::NEG_INFINITY {
            return Err(Error::NonFinite { origin: "regularizer value" });
        }
        Ok(PhiParts { f, psi })
    }

    /// φ(x) = f(x) + Ψ(x); `+∞` outside dom Ψ.
    pub fn phi(&self, x: &Vector) -> Result<f64> {
        Ok(self.eval_parts(x)?.phi())
    }

    pub fn grad(&self, x: &Vector) -> Result<Vector> {
        self.bump(|c| c.grad_evals += 1);
        let g = self.smooth.gradient(x);
        if g.len() != x.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: g.len() });
        }
        if !g.is_finite() {
            return Err(Error::NonFinite { origin: "smooth oracle gradient" });
        }
        Ok(g)
    }

    pub fn prox(&self, step: f64, point: &Vector) -> Result<Vector> {
        self.bump(|c| c.prox_evals += 1);
        let p = self.reg.prox(step, point)?;
        if !p.is_finite() {
            return Err(Error::NonFinite { origin: "proximal operator" });
        }
        Ok(p)
    }

    /// φ(x) without touching the counters; for telemetry and tests only.
    pub fn phi_uncounted(&self, x: &Vector) -> f64 {
        self.smooth.value(x) + self.reg.value(x)
    }
}

/// φ(x); one `f_evals` increment.
pub fn phi(problem: &CompositeProblem, x: &Vector) -> Result<f64> {
    problem.phi(x)
}

/// Which endpoint of the admissible σ₀ interval `choose_sigma0` returns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sigma0Endpoint {
    /// 2M/(1+√2β), independent of ε.
    #[default]
    Upper,
    /// 2εM/((1+√2β)‖g_M(x₀)‖).
    Lower,
}

/// Tunables shared by every solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    pub gamma_inc: f64,
    pub gamma_dec: f64,
    pub l_min: f64,
    pub gamma_reg: f64,
    pub beta: f64,
    pub theta: f64,
    pub eps: f64,
    pub max_oracle_calls: u64,
    pub sigma0_endpoint: Sigma0Endpoint,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            gamma_inc: 2.0,
            gamma_dec: 2.0,
            l_min: 1e-3,
            gamma_reg: 2.0,
            beta: 1.0,
            theta: 0.5,
            eps: 1e-6,
            max_oracle_calls: 10_000_000,
            sigma0_endpoint: Sigma0Endpoint::Upper,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.gamma_inc > 1.0 && self.gamma_inc.is_finite()) {
            return bad("gamma_inc must be > 1");
        }
        if !(self.gamma_dec >= 1.0 && self.gamma_dec.is_finite()) {
            return bad("gamma_dec must be >= 1");
        }
        if !(self.l_min > 0.0 && self.l_min.is_finite()) {
            return bad("l_min must be > 0");
        }
        if !(self.gamma_reg > 1.0 && self.gamma_reg.is_finite()) {
            return bad("gamma_reg must be > 1");
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return bad("beta must lie in (0, 1]");
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return bad("theta must lie in (0, 1)");
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return bad("eps must be >= 0");
        }
        if self.max_oracle_calls == 0 {
            return bad("max_oracle_calls must be positive");
        }
        Ok(())
    }

    pub fn with_l_min(mut self, l_min: f64) -> Self {
        self.l_min = l_min;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    /// L_{k+1} = max(L_min, M_k/γ_dec).
    pub fn next_l(&self, m: f64) -> f64 {
        self.l_min.max(m / self.gamma_dec)
    }

    /// 1 + √2·β, a constant that recurs in every σ formula.
    pub(crate) fn beta_factor(&self) -> f64 {
        1.0 + std::f64::consts::SQRT_2 * self.beta
    }
}
