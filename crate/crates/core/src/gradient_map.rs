//! Prox-gradient points T_L, gradient mappings g_L, their σ-regularized
//! counterparts, and the line-search predicates built from them.

use crate::error::Result;
use crate::problem::{CompositeProblem, PhiParts};
use crate::prox::RegTerm;
use crate::vector::Vector;

/// Relative slack applied to every line-search inequality.
pub const REL_SLACK: f64 = 1e-12;

/// lhs ≤ rhs up to a relative slack of [`REL_SLACK`].
pub fn leq_with_slack(lhs: f64, rhs: f64) -> bool {
    if !lhs.is_finite() || !rhs.is_finite() {
        return lhs <= rhs;
    }
    lhs <= rhs + REL_SLACK * lhs.abs().max(rhs.abs())
}

/// Absolute rounding allowance, per unit of gradient magnitude, in the
/// co-coercivity test.
const GRAD_NOISE: f64 = 1e-13;

/// ‖Δg‖²/L ≤ ⟨Δg, Δx⟩ where Δg = ∇f(y) − ∇f(z). Near convergence Δg is a
/// difference of nearly equal gradients, so besides the relative slack the
/// test tolerates an error of order GRAD_NOISE·(‖∇f(y)‖ + ‖∇f(z)‖) in Δg.
pub(crate) fn cocoercive_with_slack(grad_y: &Vector, grad_z: &Vector, dx: &Vector, l: f64) -> bool {
    let dg = grad_y - grad_z;
    let lhs = dg.norm_sq() / l;
    let rhs = dg.dot(dx);
    let noise = GRAD_NOISE * (grad_y.norm() + grad_z.norm());
    let allowance = noise * (dx.norm() + 2.0 * dg.norm() / l);
    leq_with_slack(lhs, rhs + allowance)
}

/// T_L(y) together with ‖g_L(y)‖ = L‖y − T_L(y)‖.
#[derive(Clone, Debug, PartialEq)]
pub struct MapResult {
    pub point: Vector,
    pub g_norm: f64,
    /// The modulus the mapping was taken with.
    pub l: f64,
}

/// m_L(y; x) = f(y) + ⟨∇f(y), x − y⟩ + (L/2)‖x − y‖² + Ψ(x).
///
/// Charges one φ evaluation and one gradient at y.
pub fn model_value(problem: &CompositeProblem, y: &Vector, x: &Vector, l: f64) -> Result<f64> {
    let fy = problem.eval_parts(y)?.f;
    let gy = problem.grad(y)?;
    let psi_x = problem.regularizer().value(x);
    Ok(quadratic_model(fy, &gy, y, x, l) + psi_x)
}

/// f(y) + ⟨∇f(y), x − y⟩ + (L/2)‖x − y‖², the smooth part of m_L(y; x).
pub(crate) fn quadratic_model(fy: f64, grad_y: &Vector, y: &Vector, x: &Vector, l: f64) -> f64 {
    let d = x - y;
    fy + grad_y.dot(&d) + 0.5 * l * d.norm_sq()
}

/// T_L(y) = prox_{Ψ/L}(y − ∇f(y)/L); one gradient and one prox.
pub fn prox_grad_point(problem: &CompositeProblem, y: &Vector, l: f64) -> Result<MapResult> {
    let gy = problem.grad(y)?;
    prox_grad_point_from(problem, y, &gy, l)
}

/// [`prox_grad_point`] with ∇f(y) already in hand; one prox.
pub(crate) fn prox_grad_point_from(
    problem: &CompositeProblem,
    y: &Vector,
    grad_y: &Vector,
    l: f64,
) -> Result<MapResult> {
    debug_assert!(l > 0.0);
    let point = problem.prox(1.0 / l, &y.lincomb(1.0, -1.0 / l, grad_y))?;
    let g_norm = l * y.dist(&point);
    Ok(MapResult { point, g_norm, l })
}

/// T^σ_{L+σ}(y) for the regularization `term`, where `l` is the modulus of
/// the plain-f gradient step; the returned `l` field is the total L + σ.
///
/// Computed as the prox of Ψ with step 1/(L+σ) at (L·y − ∇f(y) + σ·x₀)/(L+σ).
pub fn reg_prox_grad_point(
    problem: &CompositeProblem,
    term: &RegTerm,
    y: &Vector,
    l: f64,
) -> Result<MapResult> {
    let gy = problem.grad(y)?;
    reg_prox_grad_point_from(problem, term, y, &gy, l)
}

pub(crate) fn reg_prox_grad_point_from(
    problem: &CompositeProblem,
    term: &RegTerm,
    y: &Vector,
    grad_y: &Vector,
    l: f64,
) -> Result<MapResult> {
    debug_assert!(l > 0.0);
    let total = l + term.sigma;
    // gradient step of f with modulus L, then prox of Ψ_σ with step 1/L
    let u = y.lincomb(1.0, -1.0 / l, grad_y);
    let (step, shifted) = term.reduce(1.0 / l, &u);
    let point = problem.prox(step, &shifted)?;
    let g_norm = total * y.dist(&point);
    Ok(MapResult { point, g_norm, l: total })
}

/// The sufficient-decrease test φ(T_L(y)) ≤ m_L(y; T_L(y)).
///
/// Charges one gradient, one prox and two φ evaluations (at y for f(y) and
/// at T_L(y)).
pub fn descent_condition(problem: &CompositeProblem, y: &Vector, l: f64) -> Result<bool> {
    let gy = problem.grad(y)?;
    let fy = problem.eval_parts(y)?.f;
    let map = prox_grad_point_from(problem, y, &gy, l)?;
    let ft = problem.eval_parts(&map.point)?;
    Ok(descent_holds(fy, &gy, y, &map.point, ft, l))
}

/// φ(x) ≤ m_L(y; x) evaluated with Ψ(x) cancelled from both sides.
pub(crate) fn descent_holds(fy: f64, grad_y: &Vector, y: &Vector, x: &Vector, at_x: PhiParts, l: f64) -> bool {
    leq_with_slack(at_x.f, quadratic_model(fy, grad_y, y, x, l))
}

/// Which of the optional tests a line-search pass evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConditionChecks {
    /// Test φ_σ(T^σ_{L+σ}(z)) ≤ m^σ_{L+σ}(z; T^σ_{L+σ}(z)).
    pub regularized_descent: bool,
    /// Test φ(T_L(z)) ≤ φ(z).
    pub monotone: bool,
}

/// Everything one line-search pass learns about z.
#[derive(Clone, Debug)]
pub(crate) struct PassEvaluation {
    /// Truth of the three conditions; skipped tests report `true`.
    pub conditions: (bool, bool, bool),
    pub grad_z: Vector,
    /// φ parts at z when they were needed.
    pub phi_z: Option<PhiParts>,
    /// T_L(z) with ‖g_L(z)‖.
    pub plain_map: MapResult,
    /// ‖g^σ_{L+σ}(z)‖ when T^σ_{L+σ}(z) was computed.
    pub reg_map_norm: Option<f64>,
}

/// Evaluates the pass conditions given ∇f(y) and z = T^σ_{L+σ}(y).
///
/// Charges one gradient (at z), one prox for T_L(z), and, when the
/// corresponding test is enabled, one prox for T^σ_{L+σ}(z) plus up to three
/// φ evaluations (z, T^σ_{L+σ}(z), T_L(z)).
pub(crate) fn evaluate_pass(
    problem: &CompositeProblem,
    term: &RegTerm,
    y: &Vector,
    grad_y: &Vector,
    z: &Vector,
    l: f64,
    checks: ConditionChecks,
) -> Result<PassEvaluation> {
    let grad_z = problem.grad(z)?;

    let cond_a = cocoercive_with_slack(grad_y, &grad_z, &(y - z), l);

    let plain_map = prox_grad_point_from(problem, z, &grad_z, l)?;

    let phi_z = if checks.regularized_descent || checks.monotone {
        Some(problem.eval_parts(z)?)
    } else {
        None
    };

    let mut reg_map_norm = None;
    let cond_b = if checks.regularized_descent {
        let w = reg_prox_grad_point_from(problem, term, z, &grad_z, l)?;
        reg_map_norm = Some(w.g_norm);
        let at_w = problem.eval_parts(&w.point)?;
        let fz = phi_z.expect("φ(z) evaluated above").f;
        // φ_σ(w) ≤ m^σ_{L+σ}(z; w) with Ψ(w) and the σ-quadratic cancelled,
        // which is f(w) ≤ f(z) + ⟨∇f(z), w − z⟩ + (L/2)‖w − z‖²
        leq_with_slack(at_w.f, quadratic_model(fz, &grad_z, z, &w.point, l))
    } else {
        true
    };

    let cond_c = if checks.monotone {
        let at_t = problem.eval_parts(&plain_map.point)?;
        leq_with_slack(at_t.phi(), phi_z.expect("φ(z) evaluated above").phi())
    } else {
        true
    };

    Ok(PassEvaluation {
        conditions: (cond_a, cond_b, cond_c),
        grad_z,
        phi_z,
        plain_map,
        reg_map_norm,
    })
}

/// Tests the three line-search conditions of one accelerated pass at
/// (y, z = T^σ_{L+σ}(y), L). The optional monotonicity test reports `true`
/// when `test_monotone` is off.
pub fn apg_conditions(
    problem: &CompositeProblem,
    term: &RegTerm,
    y: &Vector,
    z: &Vector,
    l: f64,
    test_monotone: bool,
) -> Result<(bool, bool, bool)> {
    let gy = problem.grad(y)?;
    let checks = ConditionChecks { regularized_descent: true, monotone: test_monotone };
    Ok(evaluate_pass(problem, term, y, &gy, z, l, checks)?.conditions)
}
