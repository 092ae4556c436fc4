//! Single-step engines: the accelerated iteration on the regularized problem
//! and the plain proximal gradient iteration, both with backtracking on L.

use crate::error::{Error, Result};
use crate::gradient_map::{
    descent_holds, evaluate_pass, prox_grad_point_from, reg_prox_grad_point_from, ConditionChecks, MapResult,
};
use crate::problem::{CompositeProblem, PhiParts, SolverParams};
use crate::prox::RegTerm;
use crate::vector::Vector;

/// Implicit estimate sequence ψ_k(x) = ½‖x − x₀‖² + Σᵢ aᵢ[linearization of f at xᵢ + Ψ_σ].
///
/// Only A_k = Σaᵢ and Σaᵢ∇f(xᵢ) are stored; the minimizer v_k is recovered in
/// closed form by [`estimate_min`].
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateState {
    pub center: Vector,
    pub a_sum: f64,
    pub grad_sum: Vector,
    pub sigma: f64,
}

impl EstimateState {
    /// ψ₀ = ½‖· − center‖², A₀ = 0.
    pub fn new(center: Vector, sigma: f64) -> Self {
        let n = center.len();
        EstimateState { center, a_sum: 0.0, grad_sum: Vector::zeros(n), sigma }
    }

    /// The σ-quadratic attached to this sequence.
    pub fn reg_term(&self) -> RegTerm {
        RegTerm::new(self.sigma, self.center.clone())
    }
}

/// v_k = argmin ψ_k = prox_{γΨ}(w) with γ = A/(1+σA) and
/// w = x₀ − Σaᵢ∇f(xᵢ)/(1+σA). Returns the center when A = 0 (no oracle call).
pub fn estimate_min(state: &EstimateState, problem: &CompositeProblem) -> Result<Vector> {
    if state.a_sum == 0.0 {
        return Ok(state.center.clone());
    }
    let d = 1.0 + state.sigma * state.a_sum;
    let w = state.center.lincomb(1.0, -1.0 / d, &state.grad_sum);
    problem.prox(state.a_sum / d, &w)
}

/// Largest root a > 0 of a²/(A + a) = 2(1 + σA)/L.
///
/// With c = 2(1+σA)/L the quadratic is a² − c·a − c·A = 0, solved in the
/// cancellation-free form (c + √(c² + 4cA))/2.
pub fn solve_a(a_sum: f64, sigma: f64, l: f64) -> f64 {
    debug_assert!(a_sum >= 0.0 && sigma >= 0.0 && l > 0.0);
    let c = 2.0 * (1.0 + sigma * a_sum) / l;
    0.5 * (c + (c * c + 4.0 * c * a_sum).sqrt())
}

/// Result of one accelerated iteration.
#[derive(Clone, Debug)]
pub struct ApgStepOutput {
    pub x_next: Vector,
    /// M_k, the accepted Lipschitz estimate.
    pub m: f64,
    /// L_{k+1} = max(L_min, M_k/γ_dec).
    pub l_next: f64,
    pub a_next: f64,
    /// T_{M_k}(x_{k+1}) and ‖g_{M_k}(x_{k+1})‖, reused by stopping tests.
    pub plain_map: MapResult,
    /// ‖g^σ_{M_k+σ}(x_{k+1})‖; `None` when the regularized descent test was
    /// skipped on the accepted pass.
    pub reg_map_norm: Option<f64>,
    /// φ(x_{k+1}) when it was evaluated during the accepted pass.
    pub phi_next: Option<f64>,
    pub ls_passes: u32,
    /// True when the regularized descent test and its prox were skipped
    /// because the trial L reached the known Lipschitz bound.
    pub skipped_reg_test: bool,
}

fn check_budget(problem: &CompositeProblem, params: &SolverParams) -> Result<()> {
    let used = problem.counters().total();
    if used >= params.max_oracle_calls {
        return Err(Error::BudgetExhausted { used, limit: params.max_oracle_calls });
    }
    Ok(())
}

/// One accelerated proximal gradient iteration on φ_σ = f + Ψ + (σ/2)‖· − x₀‖².
///
/// The regularization (σ, x₀) is taken from `state`. Starting from L = L_in
/// the trial modulus is multiplied by γ_inc until all enabled conditions
/// hold. Per pass this charges two gradients (at y and z), up to three prox
/// calls (T^σ_{L+σ}(y), T_L(z), T^σ_{L+σ}(z)) and up to three φ
/// evaluations; v_k costs one more prox outside the loop when A_k > 0.
pub fn apg_step(
    problem: &CompositeProblem,
    x: &Vector,
    state: &EstimateState,
    l_in: f64,
    params: &SolverParams,
    test_monotone: bool,
) -> Result<(ApgStepOutput, EstimateState)> {
    if !(l_in > 0.0 && l_in.is_finite()) {
        return Err(Error::InvalidParameter(format!("trial modulus must be positive, got {l_in}")));
    }
    let term = state.reg_term();
    let v = estimate_min(state, problem)?;
    let hint = problem.lipschitz_hint();
    let a_sum = state.a_sum;

    let mut l = l_in / params.gamma_inc;
    let mut passes = 0u32;
    loop {
        check_budget(problem, params)?;
        l *= params.gamma_inc;
        passes += 1;

        let a = solve_a(a_sum, state.sigma, l);
        let y = x.lincomb(a_sum / (a_sum + a), a / (a_sum + a), &v);
        let grad_y = problem.grad(&y)?;
        let z = reg_prox_grad_point_from(problem, &term, &y, &grad_y, l)?.point;

        let skip_reg = hint.is_some_and(|h| l >= h);
        let checks = ConditionChecks { regularized_descent: !skip_reg, monotone: test_monotone };
        let pass = evaluate_pass(problem, &term, &y, &grad_y, &z, l, checks)?;
        let (ca, cb, cc) = pass.conditions;
        if !(ca && cb && cc) {
            continue;
        }

        let mut next = state.clone();
        next.a_sum = a_sum + a;
        next.grad_sum.add_scaled(a, &pass.grad_z);
        let out = ApgStepOutput {
            x_next: z,
            m: l,
            l_next: params.next_l(l),
            a_next: next.a_sum,
            plain_map: pass.plain_map,
            reg_map_norm: pass.reg_map_norm,
            phi_next: pass.phi_z.map(|p: PhiParts| p.phi()),
            ls_passes: passes,
            skipped_reg_test: skip_reg,
        };
        return Ok((out, next));
    }
}

/// Result of one proximal gradient iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct PgStepOutput {
    /// T_{M}(x).
    pub point: Vector,
    pub m: f64,
    pub l_next: f64,
    /// ‖g_M(x)‖ = M‖x − T_M(x)‖.
    pub g_norm: f64,
    pub ls_passes: u32,
}

impl PgStepOutput {
    pub fn map(&self) -> MapResult {
        MapResult { point: self.point.clone(), g_norm: self.g_norm, l: self.m }
    }
}

/// One proximal gradient iteration with backtracking until
/// φ(T_L(x)) ≤ m_L(x; T_L(x)).
///
/// Charges one gradient and one φ evaluation at x, then one prox and one φ
/// evaluation per trial L.
pub fn pg_step(problem: &CompositeProblem, x: &Vector, l_in: f64, params: &SolverParams) -> Result<PgStepOutput> {
    if !(l_in > 0.0 && l_in.is_finite()) {
        return Err(Error::InvalidParameter(format!("trial modulus must be positive, got {l_in}")));
    }
    check_budget(problem, params)?;
    let grad_x = problem.grad(x)?;
    let fx = problem.eval_parts(x)?.f;
    let mut l = l_in / params.gamma_inc;
    let mut passes = 0u32;
    loop {
        check_budget(problem, params)?;
        l *= params.gamma_inc;
        passes += 1;
        let map = prox_grad_point_from(problem, x, &grad_x, l)?;
        let at_t = problem.eval_parts(&map.point)?;
        if descent_holds(fx, &grad_x, x, &map.point, at_t, l) {
            return Ok(PgStepOutput {
                point: map.point,
                m: l,
                l_next: params.next_l(l),
                g_norm: map.g_norm,
                ls_passes: passes,
            });
        }
    }
}
