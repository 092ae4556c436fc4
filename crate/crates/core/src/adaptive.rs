//! AdaAPG (adaptive σ halving around the accelerated engine) and rAdaAPG
//! (restarts driven by the gradient-mapping norm), plus the fixed-σ and
//! plain proximal gradient baselines.

use serde::{Deserialize, Serialize};

use crate::engine::{apg_step, pg_step, EstimateState};
use crate::error::{Error, Result};
use crate::problem::{CompositeProblem, SolverParams};
use crate::trace::{RowIndex, RowValues, Trace, TraceRecord};
use crate::vector::Vector;

/// σ values below this are treated as underflow and end the run.
pub const SIGMA_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Converged,
    Safeguard,
}

/// Hölderian error bound φ(x) − φ* ≥ κ·dist(x, X*)^ρ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HebParams {
    pub kappa: f64,
    pub rho: f64,
}

impl HebParams {
    pub fn new(kappa: f64, rho: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
        }
        if !(rho >= 1.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho must be >= 1, got {rho}")));
        }
        Ok(HebParams { kappa, rho })
    }
}

/// Output of one AdaAPG call.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaApgResult {
    pub sigma_final: f64,
    /// x_{k+1}.
    pub x: Vector,
    /// T_{M_k}(x_{k+1}).
    pub x_prox: Vector,
    pub m: f64,
    /// L_{k+1}.
    pub l: f64,
    /// ‖g_{M_k}(x_{k+1})‖; +∞ if no iteration completed.
    pub g_norm: f64,
    pub status: Status,
    /// Set when `status` is `Safeguard`.
    pub safeguard: Option<Error>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopExit {
    Converged,
    AGrowth,
    Safeguard,
}

/// What happened in one σ_j loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaLoop {
    pub j: u64,
    pub sigma: f64,
    /// APGIter calls completed in this loop.
    pub iterations: u64,
    pub exit: LoopExit,
    /// A_{k+1} at exit.
    pub a_final: f64,
    /// M_k at exit (0 when no iteration completed).
    pub m_final: f64,
}

/// Per-step observations exposed for invariant checks.
#[derive(Clone, Debug, PartialEq)]
pub struct StepLog {
    pub j: u64,
    pub k: u64,
    pub sigma: f64,
    pub l_in: f64,
    pub m: f64,
    pub l_next: f64,
    pub a_next: f64,
    pub g_norm: f64,
    pub ls_passes: u32,
    pub skipped_reg_test: bool,
}

#[derive(Clone, Debug)]
pub struct AdaApgRun {
    pub result: AdaApgResult,
    pub loops: Vec<SigmaLoop>,
    pub steps: Vec<StepLog>,
    pub apg_iters: u64,
}

impl AdaApgRun {
    pub fn sigmas(&self) -> Vec<f64> {
        self.loops.iter().map(|l| l.sigma).collect()
    }
}

fn safeguard_result(x: &Vector, sigma: f64, l: f64, e: Error) -> AdaApgResult {
    AdaApgResult {
        sigma_final: sigma,
        x: x.clone(),
        x_prox: x.clone(),
        m: l,
        l,
        g_norm: f64::INFINITY,
        status: Status::Safeguard,
        safeguard: Some(e),
    }
}

/// AdaAPG with a fresh, untimed trace.
pub fn ada_apg(
    problem: &CompositeProblem,
    x0: &Vector,
    l_init: f64,
    sigma0: f64,
    eps: f64,
    params: &SolverParams,
    test_monotone: bool,
) -> Result<(AdaApgRun, Vec<TraceRecord>)> {
    let mut trace = Trace::new();
    let run = ada_apg_traced(problem, x0, l_init, sigma0, eps, params, test_monotone, 0, &mut trace)?;
    Ok((run, trace.into_records()))
}

/// Runs AdaAPG from `x0`, appending one row per APGIter to `trace` under
/// outer index `outer_t`.
///
/// For j = 0, 1, … the inner loop restarts the estimate sequence at `x0` with
/// σ_j = σ₀/γ_reg^j. It returns as soon as ‖g_{M_k}(x_{k+1})‖ ≤ eps and moves
/// to the next σ once A_{k+1} ≥ 2(M_k + σ_j)/(β²σ_j²). With eps = 0 the run
/// only ends on a safeguard. Oracle errors other than safeguards propagate.
#[allow(clippy::too_many_arguments)]
pub fn ada_apg_traced(
    problem: &CompositeProblem,
    x0: &Vector,
    l_init: f64,
    sigma0: f64,
    eps: f64,
    params: &SolverParams,
    test_monotone: bool,
    outer_t: u64,
    trace: &mut Trace,
) -> Result<AdaApgRun> {
    params.validate()?;
    if !(sigma0 > 0.0 && sigma0.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma0 must be positive, got {sigma0}")));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    let mut l = l_init.max(params.l_min);
    let mut loops = Vec::new();
    let mut steps = Vec::new();
    let mut apg_iters = 0u64;
    let mut last: Option<AdaApgResult> = None;

    for j in 0u64.. {
        let sigma = sigma0 / params.gamma_reg.powi(j.min(i32::MAX as u64) as i32);
        if sigma < SIGMA_FLOOR {
            let e = Error::SigmaUnderflow { sigma, floor: SIGMA_FLOOR };
            let result = match last {
                Some(r) => AdaApgResult { status: Status::Safeguard, safeguard: Some(e), ..r },
                None => safeguard_result(x0, sigma, l, e),
            };
            return Ok(AdaApgRun { result, loops, steps, apg_iters });
        }
        let mut state = EstimateState::new(x0.clone(), sigma);
        let mut x = x0.clone();
        let mut k = 0u64;
        loop {
            let l_in = l;
            let (out, next) = match apg_step(problem, &x, &state, l, params, test_monotone) {
                Ok(v) => v,
                Err(e) if e.is_safeguard() => {
                    loops.push(SigmaLoop {
                        j,
                        sigma,
                        iterations: k,
                        exit: LoopExit::Safeguard,
                        a_final: state.a_sum,
                        m_final: last.as_ref().map_or(0.0, |r| r.m),
                    });
                    let result = match last {
                        Some(r) => AdaApgResult { status: Status::Safeguard, safeguard: Some(e), ..r },
                        None => safeguard_result(x0, sigma, l, e),
                    };
                    return Ok(AdaApgRun { result, loops, steps, apg_iters });
                }
                Err(e) => return Err(e),
            };
            apg_iters += 1;
            let g_norm = out.plain_map.g_norm;
            trace.push(
                RowIndex { outer_t, sigma_index_j: j, inner_k: k + 1 },
                RowValues {
                    sigma,
                    a: out.a_next,
                    m: out.m,
                    g_map_norm: g_norm,
                    phi_val: out.phi_next.unwrap_or_else(|| problem.phi_uncounted(&out.x_next)),
                },
                problem.counters(),
            );
            steps.push(StepLog {
                j,
                k,
                sigma,
                l_in,
                m: out.m,
                l_next: out.l_next,
                a_next: out.a_next,
                g_norm,
                ls_passes: out.ls_passes,
                skipped_reg_test: out.skipped_reg_test,
            });
            l = out.l_next;
            let a_growth = out.a_next >= 2.0 * (out.m + sigma) / (params.beta * params.beta * sigma * sigma);
            let current = AdaApgResult {
                sigma_final: sigma,
                x: out.x_next,
                x_prox: out.plain_map.point,
                m: out.m,
                l: out.l_next,
                g_norm,
                status: Status::Converged,
                safeguard: None,
            };
            state = next;
            k += 1;
            if g_norm <= eps {
                loops.push(SigmaLoop {
                    j,
                    sigma,
                    iterations: k,
                    exit: LoopExit::Converged,
                    a_final: state.a_sum,
                    m_final: current.m,
                });
                return Ok(AdaApgRun { result: current, loops, steps, apg_iters });
            }
            x = current.x.clone();
            let m_final = current.m;
            last = Some(current);
            if a_growth {
                loops.push(SigmaLoop { j, sigma, iterations: k, exit: LoopExit::AGrowth, a_final: state.a_sum, m_final });
                break;
            }
        }
    }
    unreachable!("the σ loop only exits by returning")
}

/// Upper (ε-free) or lower endpoint of the admissible σ₀ interval given
/// T_M(x₀) from a proximal gradient step.
pub fn choose_sigma0(m: f64, g_norm: f64, eps: f64, params: &SolverParams) -> f64 {
    let b = params.beta_factor();
    match params.sigma0_endpoint {
        crate::problem::Sigma0Endpoint::Upper => 2.0 * m / b,
        crate::problem::Sigma0Endpoint::Lower => 2.0 * eps * m / (b * g_norm),
    }
}

/// AdaAPG preceded by the proximal gradient step that fixes σ₀.
#[derive(Clone, Debug)]
pub struct AdaApgDriverRun {
    pub run: Option<AdaApgRun>,
    pub sigma0: Option<f64>,
    /// ‖g_M(x₀)‖ from the initial proximal gradient step.
    pub g0: f64,
    pub m0: f64,
    pub result: AdaApgResult,
}

/// Runs the initial proximal gradient step, picks σ₀ with
/// [`choose_sigma0`] and calls AdaAPG from x₀. If already ‖g_M(x₀)‖ ≤ eps
/// the step's output is returned without any APGIter.
pub fn ada_apg_auto(
    problem: &CompositeProblem,
    x0: &Vector,
    l_init: f64,
    eps: f64,
    params: &SolverParams,
    test_monotone: bool,
    trace: &mut Trace,
) -> Result<AdaApgDriverRun> {
    params.validate()?;
    let pg = match pg_step(problem, x0, l_init.max(params.l_min), params) {
        Ok(pg) => pg,
        Err(e) if e.is_safeguard() => {
            let result = safeguard_result(x0, f64::NAN, l_init, e);
            return Ok(AdaApgDriverRun { run: None, sigma0: None, g0: f64::INFINITY, m0: f64::NAN, result });
        }
        Err(e) => return Err(e),
    };
    if pg.g_norm <= eps {
        let result = AdaApgResult {
            sigma_final: f64::NAN,
            x: x0.clone(),
            x_prox: pg.point.clone(),
            m: pg.m,
            l: pg.l_next,
            g_norm: pg.g_norm,
            status: Status::Converged,
            safeguard: None,
        };
        return Ok(AdaApgDriverRun { run: None, sigma0: None, g0: pg.g_norm, m0: pg.m, result });
    }
    let sigma0 = choose_sigma0(pg.m, pg.g_norm, eps, params);
    let run = ada_apg_traced(problem, x0, pg.l_next, sigma0, eps, params, test_monotone, 0, trace)?;
    let result = run.result.clone();
    Ok(AdaApgDriverRun { run: Some(run), sigma0: Some(sigma0), g0: pg.g_norm, m0: pg.m, result })
}

/// One restart of rAdaAPG.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub t: u64,
    /// ε^{(t)} = θ·‖g_{M^{(t)}}(x^{(t)})‖.
    pub eps_t: f64,
    pub sigma_t: f64,
    pub g_norm_t: f64,
    pub phi_plus_t: f64,
    /// APGIter calls made by the AdaAPG call at this restart (0 at the last).
    pub apgiter_count: u64,
}

#[derive(Clone, Debug)]
pub struct RAdaApgRun {
    /// x^{(t)} at exit.
    pub x: Vector,
    /// x₊^{(t)} = T_{M^{(t)}}(x^{(t)}).
    pub x_plus: Vector,
    pub m: f64,
    pub l: f64,
    pub g_norm: f64,
    pub sigma: f64,
    pub status: Status,
    pub safeguard: Option<Error>,
    pub records: Vec<RestartRecord>,
    /// ‖g_{M^{(0)}}(x^{(0)})‖.
    pub g0: f64,
    pub m0: f64,
    /// σ^{(0)}; `None` when the run stopped before it was needed.
    pub sigma0: Option<f64>,
    pub total_apg_iters: u64,
    /// Every AdaAPG call, in order.
    pub inner_runs: Vec<AdaApgRun>,
}

impl RAdaApgRun {
    pub fn final_record(&self) -> Option<&RestartRecord> {
        self.records.last()
    }
}

/// σ^{(0)} = 2ε⁽⁰⁾M/((1+√2β)‖g_M(x₊⁽⁰⁾)‖) from one extra proximal gradient
/// step at x₊⁽⁰⁾, falling back to 2M/(1+√2β) when that norm vanishes.
pub fn choose_sigma0_heb(
    problem: &CompositeProblem,
    x_plus0: &Vector,
    l0: f64,
    eps0: f64,
    params: &SolverParams,
) -> Result<f64> {
    let pg = pg_step(problem, x_plus0, l0, params)?;
    Ok(sigma0_from_step(pg.m, pg.g_norm, eps0, params))
}

pub(crate) fn sigma0_from_step(m: f64, g_norm: f64, eps0: f64, params: &SolverParams) -> f64 {
    let b = params.beta_factor();
    if g_norm == 0.0 {
        2.0 * m / b
    } else {
        2.0 * eps0 * m / (b * g_norm)
    }
}

/// rAdaAPG with σ^{(0)} chosen by [`choose_sigma0_heb`] and an untimed trace.
pub fn r_ada_apg(
    problem: &CompositeProblem,
    x0: &Vector,
    l_init: f64,
    eps: f64,
    params: &SolverParams,
) -> Result<(RAdaApgRun, Vec<TraceRecord>)> {
    let mut trace = Trace::new();
    let run = r_ada_apg_traced(problem, x0, l_init, eps, None, params, &mut trace)?;
    Ok((run, trace.into_records()))
}

/// rAdaAPG. Starts with a proximal gradient step at x⁽⁰⁾; while
/// ‖g_{M^{(t)}}(x^{(t)})‖ > eps, calls AdaAPG from x₊^{(t)} with target
/// θ·‖g_{M^{(t)}}(x^{(t)})‖ and the monotonicity test enabled, threading σ and
/// L through the calls. `sigma0` overrides the automatic choice.
pub fn r_ada_apg_traced(
    problem: &CompositeProblem,
    x0: &Vector,
    l_init: f64,
    eps: f64,
    sigma0: Option<f64>,
    params: &SolverParams,
    trace: &mut Trace,
) -> Result<RAdaApgRun> {
    params.validate()?;
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    let l_init = l_init.max(params.l_min);
    let mut run = RAdaApgRun {
        x: x0.clone(),
        x_plus: x0.clone(),
        m: l_init,
        l: l_init,
        g_norm: f64::INFINITY,
        sigma: f64::NAN,
        status: Status::Safeguard,
        safeguard: None,
        records: Vec::new(),
        g0: f64::INFINITY,
        m0: f64::NAN,
        sigma0: None,
        total_apg_iters: 0,
        inner_runs: Vec::new(),
    };
    let pg = match pg_step(problem, x0, l_init, params) {
        Ok(pg) => pg,
        Err(e) if e.is_safeguard() => {
            run.safeguard = Some(e);
            return Ok(run);
        }
        Err(e) => return Err(e),
    };
    run.x_plus = pg.point;
    run.m = pg.m;
    run.l = pg.l_next;
    run.g_norm = pg.g_norm;
    run.g0 = pg.g_norm;
    run.m0 = pg.m;

    let phi_plus0 = problem.phi_uncounted(&run.x_plus);
    if run.g_norm > eps {
        let eps0 = params.theta * run.g_norm;
        let s0 = match sigma0 {
            Some(s) => s,
            None => match choose_sigma0_heb(problem, &run.x_plus, run.l, eps0, params) {
                Ok(s) => s,
                Err(e) if e.is_safeguard() => {
                    run.safeguard = Some(e);
                    return Ok(run);
                }
                Err(e) => return Err(e),
            },
        };
        run.sigma0 = Some(s0);
        run.sigma = s0;
    }
    trace.push(
        RowIndex { outer_t: 0, sigma_index_j: 0, inner_k: 0 },
        RowValues { sigma: run.sigma, a: 0.0, m: run.m, g_map_norm: run.g_norm, phi_val: phi_plus0 },
        problem.counters(),
    );

    for t in 0u64.. {
        let eps_t = params.theta * run.g_norm;
        let phi_plus_t = problem.phi_uncounted(&run.x_plus);
        if run.g_norm <= eps {
            run.records.push(RestartRecord {
                t,
                eps_t,
                sigma_t: run.sigma,
                g_norm_t: run.g_norm,
                phi_plus_t,
                apgiter_count: 0,
            });
            run.status = Status::Converged;
            return Ok(run);
        }
        let inner = ada_apg_traced(problem, &run.x_plus, run.l, run.sigma, eps_t, params, true, t, trace)?;
        run.total_apg_iters += inner.apg_iters;
        run.records.push(RestartRecord {
            t,
            eps_t,
            sigma_t: run.sigma,
            g_norm_t: run.g_norm,
            phi_plus_t,
            apgiter_count: inner.apg_iters,
        });
        let r = &inner.result;
        if r.status == Status::Safeguard {
            // keep the last completed restart's point unless AdaAPG progressed
            if r.g_norm.is_finite() && r.g_norm < run.g_norm {
                run.x = r.x.clone();
                run.x_plus = r.x_prox.clone();
                run.m = r.m;
                run.l = r.l;
                run.g_norm = r.g_norm;
            }
            run.safeguard = r.safeguard.clone();
            run.inner_runs.push(inner);
            return Ok(run);
        }
        run.sigma = r.sigma_final;
        run.x = r.x.clone();
        run.x_plus = r.x_prox.clone();
        run.m = r.m;
        run.l = r.l;
        run.g_norm = r.g_norm;
        run.inner_runs.push(inner);
    }
    unreachable!("the restart loop only exits by returning")
}

/// Per-iteration data of a fixed-σ accelerated run.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedSigmaStep {
    pub k: u64,
    pub a_next: f64,
    pub m: f64,
    pub l_in: f64,
    pub l_next: f64,
    pub g_norm: f64,
    pub ls_passes: u32,
    pub x_next: Vector,
}

/// Runs APGIter with a fixed σ and center x₀ until ‖g_{M_k}(x_{k+1})‖ ≤ eps or
/// `max_iters` iterations. The minimizer approached is that of the
/// regularized problem, so small `eps` may be unreachable.
#[allow(clippy::too_many_arguments)]
pub fn apg_fixed_sigma(
    problem: &CompositeProblem,
    x0: &Vector,
    l_init: f64,
    sigma: f64,
    eps: f64,
    max_iters: u64,
    params: &SolverParams,
    trace: &mut Trace,
) -> Result<(Vec<FixedSigmaStep>, Status, Option<Error>)> {
    params.validate()?;
    let mut state = EstimateState::new(x0.clone(), sigma);
    let mut x = x0.clone();
    let mut l = l_init.max(params.l_min);
    let mut steps = Vec::new();
    for k in 0..max_iters {
        let (out, next) = match apg_step(problem, &x, &state, l, params, false) {
            Ok(v) => v,
            Err(e) if e.is_safeguard() => return Ok((steps, Status::Safeguard, Some(e))),
            Err(e) => return Err(e),
        };
        trace.push(
            RowIndex { outer_t: 0, sigma_index_j: 0, inner_k: k + 1 },
            RowValues {
                sigma,
                a: out.a_next,
                m: out.m,
                g_map_norm: out.plain_map.g_norm,
                phi_val: problem.phi_uncounted(&out.x_next),
            },
            problem.counters(),
        );
        steps.push(FixedSigmaStep {
            k,
            a_next: out.a_next,
            m: out.m,
            l_in: l,
            l_next: out.l_next,
            g_norm: out.plain_map.g_norm,
            ls_passes: out.ls_passes,
            x_next: out.x_next.clone(),
        });
        let done = out.plain_map.g_norm <= eps;
        x = out.x_next;
        l = out.l_next;
        state = next;
        if done {
            return Ok((steps, Status::Converged, None));
        }
    }
    let e = Error::BudgetExhausted { used: max_iters, limit: max_iters };
    Ok((steps, Status::Safeguard, Some(e)))
}

/// Output of the plain proximal gradient baseline.
#[derive(Clone, Debug)]
pub struct PgRun {
    pub x: Vector,
    pub x_plus: Vector,
    pub m: f64,
    pub g_norm: f64,
    pub iterations: u64,
    pub status: Status,
    pub safeguard: Option<Error>,
}

/// Iterates x ← T_M(x) with backtracking until ‖g_M(x)‖ ≤ eps.
pub fn pg_solve(
    problem: &CompositeProblem,
    x0: &Vector,
    l_init: f64,
    eps: f64,
    params: &SolverParams,
    trace: &mut Trace,
) -> Result<PgRun> {
    params.validate()?;
    let mut x = x0.clone();
    let mut l = l_init.max(params.l_min);
    let mut run =
        PgRun { x: x0.clone(), x_plus: x0.clone(), m: l, g_norm: f64::INFINITY, iterations: 0, status: Status::Safeguard, safeguard: None };
    loop {
        let step = match pg_step(problem, &x, l, params) {
            Ok(s) => s,
            Err(e) if e.is_safeguard() => {
                run.safeguard = Some(e);
                return Ok(run);
            }
            Err(e) => return Err(e),
        };
        trace.push(
            RowIndex { outer_t: 0, sigma_index_j: 0, inner_k: run.iterations },
            RowValues { sigma: 0.0, a: 0.0, m: step.m, g_map_norm: step.g_norm, phi_val: problem.phi_uncounted(&step.point) },
            problem.counters(),
        );
        run.x = x.clone();
        run.x_plus = step.point.clone();
        run.m = step.m;
        run.g_norm = step.g_norm;
        if step.g_norm <= eps {
            run.status = Status::Converged;
            return Ok(run);
        }
        run.iterations += 1;
        x = step.point;
        l = step.l_next;
    }
}
