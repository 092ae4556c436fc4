//! Closed-form iteration bounds and thresholds for AdaAPG and rAdaAPG.
//!
//! All logarithms are natural unless a base is named. `lf` is the
//! Lipschitz constant of ∇f, `lmin` the lower clamp on L.

use serde::{Deserialize, Serialize};

use crate::adaptive::HebParams;
use crate::error::{Error, Result};
use crate::problem::SolverParams;

fn beta_factor(beta: f64) -> f64 {
    1.0 + std::f64::consts::SQRT_2 * beta
}

fn log_base(b: f64, x: f64) -> f64 {
    x.ln() / b.ln()
}

/// σ(x₀, ε) = ε/((1+√2β)·dist(x₀, X*)); +∞ when dist = 0.
pub fn sigma_threshold(dist: f64, eps: f64, beta: f64) -> f64 {
    if dist == 0.0 {
        return f64::INFINITY;
    }
    eps / (beta_factor(beta) * dist)
}

/// log((γ_inc·L_f + σ)/(βσ)).
fn log_ratio(sigma: f64, lf: f64, p: &SolverParams) -> f64 {
    ((p.gamma_inc * lf + sigma) / (p.beta * sigma)).ln()
}

/// Bound on the APGIter calls of a single σ loop:
/// 2 + (√(2γ_inc L_f/σ) + 1)·log((γ_inc L_f + σ)/(βσ)).
pub fn single_loop_bound(sigma: f64, lf: f64, p: &SolverParams) -> f64 {
    2.0 + ((2.0 * p.gamma_inc * lf / sigma).sqrt() + 1.0) * log_ratio(sigma, lf, p)
}

/// Total APGIter bound for an AdaAPG run that terminates in the loop with
/// σ_ℓ ≤ σ₀.
pub fn adaapg_bound_at(sigma0: f64, sigma_l: f64, lf: f64, p: &SolverParams) -> f64 {
    let lr = log_ratio(sigma_l, lf, p);
    let sg = p.gamma_reg.sqrt();
    (2.0 * p.gamma_inc * lf).sqrt() / (sg - 1.0) * (sg / sigma_l.sqrt() - 1.0 / sigma0.sqrt()) * lr
        + (1.0 + log_base(p.gamma_reg, sigma0 / sigma_l)) * (2.0 + lr)
}

/// AdaAPG bound when σ₀ ≥ σ(x₀, ε), written in terms of the threshold.
pub fn adaapg_bound_above_threshold(sigma0: f64, sigma_th: f64, lf: f64, p: &SolverParams) -> f64 {
    let g = p.gamma_reg;
    let lr = (g * p.gamma_inc * lf / (p.beta * sigma_th) + 1.0 / p.beta).ln();
    (2.0 * p.gamma_inc * lf).sqrt() / (g.sqrt() - 1.0) * (g / sigma_th.sqrt() - 1.0 / sigma0.sqrt()) * lr
        + (2.0 + log_base(g, sigma0 / sigma_th)) * (2.0 + lr)
}

/// AdaAPG bound for given σ₀ and σ(x₀, ε), selecting the applicable case.
pub fn adaapg_bound(sigma0: f64, sigma_th: f64, lf: f64, p: &SolverParams) -> f64 {
    if sigma0 <= sigma_th {
        single_loop_bound(sigma0, lf, p)
    } else {
        adaapg_bound_above_threshold(sigma0, sigma_th, lf, p)
    }
}

/// Shared inputs of the restart-scheme bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartInputs {
    pub eps: f64,
    /// ‖g_{M⁽⁰⁾}(x⁽⁰⁾)‖.
    pub g0: f64,
    pub sigma0: f64,
    pub lf: f64,
    pub lmin: f64,
}

/// N(ε, σ_*, C): zero when g₀ ≤ ε, else the three-term restart bound.
pub fn n_bound(eps: f64, sigma_star: f64, c: f64, g0: f64, sigma0: f64, lf: f64, p: &SolverParams) -> f64 {
    if g0 <= eps {
        return 0.0;
    }
    let lr = log_ratio(sigma_star, lf, p);
    let s2l = (2.0 * p.gamma_inc * lf).sqrt();
    (1.0 + log_base(1.0 / p.theta, g0 / eps) + log_base(p.gamma_reg, sigma0 / sigma_star)) * (2.0 + lr)
        + s2l / (p.gamma_reg.sqrt() - 1.0) * (1.0 / sigma_star.sqrt() - 1.0 / sigma0.sqrt()) * lr
        + c * s2l * lr
}

/// σ̄. For ρ ≥ 2 it depends on ε; for 1 ≤ ρ < 2 on Δ₀ = φ(x⁽⁰⁾) − φ*.
pub fn sigma_bar(heb: HebParams, lf: f64, lmin: f64, eps: f64, delta0: f64, p: &SolverParams) -> f64 {
    let HebParams { kappa, rho } = heb;
    let lead = p.theta / beta_factor(p.beta);
    let ratio = lf / lmin + 1.0;
    if rho >= 2.0 {
        lead * kappa.powf(1.0 / (rho - 1.0)) * ratio.powf(-1.0 / (rho - 1.0)) * eps.powf((rho - 2.0) / (rho - 1.0))
    } else {
        lead * kappa.powf(2.0 / rho) / ratio * delta0.powf(-(2.0 - rho) / rho)
    }
}

/// σ_* = σ⁽⁰⁾ if σ⁽⁰⁾ ≤ σ̄, else σ̄/γ_reg.
pub fn sigma_star(sigma0: f64, sigma_bar: f64, gamma_reg: f64) -> f64 {
    if sigma0 <= sigma_bar {
        sigma0
    } else {
        sigma_bar / gamma_reg
    }
}

/// ε_*. ρ = 1: κ/(L_f/L_min + 1). ρ ∈ (1,2):
/// [(1+√2)θ⁻¹(γ_inc L_f + σ⁽⁰⁾)]^{−(ρ−1)/(2−ρ)}·κ^{1/(2−ρ)}·(L_f/L_min+1)^{−1/(2−ρ)}.
pub fn eps_star(heb: HebParams, lf: f64, lmin: f64, sigma0: f64, p: &SolverParams) -> Result<f64> {
    let HebParams { kappa, rho } = heb;
    let ratio = lf / lmin + 1.0;
    if rho == 1.0 {
        return Ok(kappa / ratio);
    }
    if !(rho > 1.0 && rho < 2.0) {
        return Err(Error::InvalidParameter(format!("eps_star needs 1 <= rho < 2, got {rho}")));
    }
    let q = 2.0 - rho;
    let base = (1.0 + std::f64::consts::SQRT_2) / p.theta * (p.gamma_inc * lf + sigma0);
    Ok(base.powf(-(rho - 1.0) / q) * kappa.powf(1.0 / q) * ratio.powf(-1.0 / q))
}

/// σ_*⁽⁰⁾ for ρ > 2: σ̄ evaluated at ε = ‖g₀‖.
pub fn sigma_star_initial(heb: HebParams, lf: f64, lmin: f64, g0: f64, p: &SolverParams) -> f64 {
    sigma_bar(heb, lf, lmin, g0, 0.0, p)
}

/// C = √(1/σ)·(1 + log_{1/θ}(g₀/ε)), the form used for ρ = 2, for ρ > 2 when
/// σ⁽⁰⁾ < σ̄, and (with ε replaced by max(ε, ε_*)) for ρ < 2.
pub fn c_log_form(sigma: f64, g0: f64, eps: f64, theta: f64) -> f64 {
    (1.0 / sigma).sqrt() * (1.0 + log_base(1.0 / theta, g0 / eps))
}

/// C for ρ > 2 when σ⁽⁰⁾ ≥ σ̄.
pub fn c_rho_above_two(heb: HebParams, sigma0: f64, sigma_bar: f64, sigma_star0: f64, p: &SolverParams) -> f64 {
    let rho = heb.rho;
    let e = (rho - 2.0) / (rho - 1.0);
    let st = p.theta.sqrt().powf(e);
    (1.0 / sigma0).sqrt() * (1.0 + (rho - 1.0) / (rho - 2.0) * log_base(1.0 / p.theta, sigma_star0 / sigma_star0.min(sigma0)))
        + p.gamma_reg.sqrt() / (1.0 - st) * ((1.0 / sigma_bar).sqrt() - st * (1.0 / sigma0).sqrt())
}

/// Every quantity entering the restart-scheme bound, for reporting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartBound {
    pub sigma_bar: f64,
    pub sigma_star: f64,
    pub eps_star: Option<f64>,
    /// σ_*⁽⁰⁾, reported for ρ > 2.
    pub sigma_star0: Option<f64>,
    pub c: f64,
    /// Bound on the total number of APGIter calls.
    pub n: f64,
}

/// Bound on the total APGIter count of rAdaAPG under the error bound `heb`.
/// `delta0` = φ(x⁽⁰⁾) − φ* is needed only for ρ < 2.
pub fn restart_bound(heb: HebParams, inp: RestartInputs, delta0: f64, p: &SolverParams) -> Result<RestartBound> {
    let RestartInputs { eps, g0, sigma0, lf, lmin } = inp;
    let rho = heb.rho;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("restart bound needs eps > 0".into()));
    }
    let sb = sigma_bar(heb, lf, lmin, eps, delta0, p);
    let ss = sigma_star(sigma0, sb, p.gamma_reg);
    if rho == 2.0 {
        let c = c_log_form(ss, g0, eps, p.theta);
        let n = n_bound(eps, ss, c, g0, sigma0, lf, p);
        return Ok(RestartBound { sigma_bar: sb, sigma_star: ss, eps_star: None, sigma_star0: None, c, n });
    }
    if rho > 2.0 {
        let s0 = sigma_star_initial(heb, lf, lmin, g0, p);
        let (ss, c) = if sigma0 >= sb {
            (ss, c_rho_above_two(heb, sigma0, sb, s0, p))
        } else {
            (sigma0, c_log_form(sigma0, g0, eps, p.theta))
        };
        let n = n_bound(eps, ss, c, g0, sigma0, lf, p);
        return Ok(RestartBound { sigma_bar: sb, sigma_star: ss, eps_star: None, sigma_star0: Some(s0), c, n });
    }
    let es = eps_star(heb, lf, lmin, sigma0, p)?;
    let e_hi = eps.max(es);
    let c = c_log_form(ss, g0, e_hi, p.theta);
    let mut n = 1.0 + n_bound(e_hi, ss, c, g0, sigma0, lf, p);
    if rho > 1.0 {
        n += superlinear_tail(eps, es, rho, p.theta);
    }
    Ok(RestartBound { sigma_bar: sb, sigma_star: ss, eps_star: Some(es), sigma_star0: None, c, n })
}

/// Restarts spent below ε_* for ρ ∈ (1,2):
/// (log 1/(ρ−1))⁻¹·[log log(ε_*/(θ^q·min(ε, ε_*))) − log log(1/θ^q)], q = (ρ−1)/(2−ρ).
pub fn superlinear_tail(eps: f64, eps_star: f64, rho: f64, theta: f64) -> f64 {
    let tq = theta.powf((rho - 1.0) / (2.0 - rho));
    let lhs = (eps_star / (tq * eps.min(eps_star))).ln().ln();
    let rhs = (1.0 / tq).ln().ln();
    (lhs - rhs) / (1.0 / (rho - 1.0)).ln()
}

/// Certified objective gap at x₊^{(t)} from the mapping norm at x^{(t)}, ρ > 1:
/// κ^{−1/(ρ−1)}·(L_f/L_min + 1)^{ρ/(ρ−1)}·g^{ρ/(ρ−1)}.
pub fn objective_gap_bound(heb: HebParams, lf: f64, lmin: f64, g_norm: f64) -> f64 {
    let HebParams { kappa, rho } = heb;
    let e = rho / (rho - 1.0);
    kappa.powf(-1.0 / (rho - 1.0)) * (lf / lmin + 1.0).powf(e) * g_norm.powf(e)
}

/// Lower bound on A_k of a fixed-σ accelerated run, k ≥ 1:
/// (2/(γ_inc L_f))·(1 + √(σ/(2γ_inc L_f)))^{2(k−1)}.
pub fn a_growth_lower_bound(k: u64, sigma: f64, lf: f64, gamma_inc: f64) -> f64 {
    let gl = gamma_inc * lf;
    2.0 / gl * (1.0 + (sigma / (2.0 * gl)).sqrt()).powf(2.0 * (k as f64 - 1.0))
}

/// Bound on the total line-search passes of k accelerated iterations
/// started at L₀ and ending with L_{k+1} (k counts from 0):
/// (1 + log γ_dec/log γ_inc)(k+1) + log(L_{k+1}/L₀)/log γ_inc.
pub fn line_search_bound(k: u64, l0: f64, l_next: f64, p: &SolverParams) -> f64 {
    let li = p.gamma_inc.ln();
    (1.0 + p.gamma_dec.ln() / li) * (k as f64 + 1.0) + (l_next / l0).ln() / li
}

/// log_{1/θ}(g₀/g_t), the restart-count bound.
pub fn restart_count_bound(g0: f64, g_t: f64, theta: f64) -> f64 {
    log_base(1.0 / theta, g0 / g_t)
}
