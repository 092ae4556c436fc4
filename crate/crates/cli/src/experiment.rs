//! One experiment: a problem instance, a solver and an ε grid. Each ε gives
//! one trace file; the run summaries go to `summary.json`.

use std::path::{Path, PathBuf};

use adapg::bounds::{
    adaapg_bound, c_log_form, c_rho_above_two, restart_bound, sigma_threshold, RestartInputs,
};
use adapg::trace::export_trace;
use adapg::{
    ada_apg_auto, apg_fixed_sigma, dist_to_opt, pg_solve, r_ada_apg_traced, HebProblem, OptSet, SolverParams, Status,
    Trace, TraceFormat, TraceRecord,
};
use serde::{Deserialize, Serialize};

use crate::config::{Config, SolverKind};
use crate::error::CliError;

pub const SUMMARY_FILE: &str = "summary.json";
const FIXED_SIGMA_DEFAULT: f64 = 1.0;
// A_k grows geometrically with a fixed σ; far beyond 1000 steps it overflows.
const FIXED_SIGMA_MAX_ITERS: u64 = 1_000;

/// Instance data shared by every run of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInfo {
    pub name: String,
    pub n: usize,
    pub lf: f64,
    pub l_min: f64,
    pub kappa: Option<f64>,
    pub rho: f64,
    /// dist(x₀, X*) when X* is known analytically.
    pub dist0: Option<f64>,
    pub phi0: f64,
    pub phi_star: Option<f64>,
    pub level_note: String,
}

/// Theoretical quantities for one run. Absent entries need data the
/// instance does not provide (analytic dist or κ).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Predicted {
    /// σ(x₀, ε).
    pub sigma_threshold: Option<f64>,
    /// AdaAPG closed-form APGIter bound for the σ₀ actually used.
    pub adaapg_bound: Option<f64>,
    pub sigma_bar: Option<f64>,
    pub sigma_star: Option<f64>,
    pub eps_star: Option<f64>,
    pub sigma_star0: Option<f64>,
    /// C entering the restart bound, and both candidate forms for ρ > 2.
    pub c: Option<f64>,
    pub c_log_branch: Option<f64>,
    pub c_rho_above_two_branch: Option<f64>,
    /// rAdaAPG total APGIter bound N(ε, σ_*, C).
    pub n_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub eps: f64,
    pub params: SolverParams,
    pub trace_file: String,
    pub rows: usize,
    pub status: Status,
    pub safeguard: Option<String>,
    /// APGIter calls (0 for pg).
    pub apg_iters: u64,
    /// Proximal gradient steps taken outside APGIter.
    pub pg_steps: u64,
    pub f_evals: u64,
    pub grad_evals: u64,
    pub prox_evals: u64,
    pub g_norm: f64,
    pub phi: f64,
    /// ‖g_M(x₀)‖ from the initial step.
    pub g0: Option<f64>,
    pub sigma0: Option<f64>,
    pub predicted: Predicted,
    /// apg_iters divided by the bound that applies to the solver.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub solver: String,
    pub problem: ProblemInfo,
    pub runs: Vec<RunSummary>,
}

impl Summary {
    pub fn any_safeguard(&self) -> bool {
        self.runs.iter().any(|r| r.status == Status::Safeguard)
    }
}

fn problem_info(hp: &HebProblem) -> ProblemInfo {
    let dist0 = match hp.opt_set {
        OptSet::Point(_) => Some(dist_to_opt(hp, &hp.x0)),
        OptSet::NumericOnly => None,
    };
    ProblemInfo {
        name: hp.name.clone(),
        n: hp.dim(),
        lf: hp.lf_true,
        l_min: hp.l_min,
        kappa: hp.kappa,
        rho: hp.rho,
        dist0,
        phi0: hp.problem.phi_uncounted(&hp.x0),
        phi_star: hp.phi_star,
        level_note: hp.level_note.clone(),
    }
}

pub fn trace_file_name(index: usize, eps: f64, format: TraceFormat) -> String {
    let ext = match format {
        TraceFormat::Csv => "csv",
        TraceFormat::Json => "json",
    };
    format!("run_{index:02}_eps{eps:e}.{ext}")
}

struct Outcome {
    records: Vec<TraceRecord>,
    status: Status,
    safeguard: Option<String>,
    apg_iters: u64,
    pg_steps: u64,
    g_norm: f64,
    x_report: adapg::Vector,
    g0: Option<f64>,
    sigma0: Option<f64>,
}

fn run_solver(cfg: &Config, hp: &HebProblem, params: &SolverParams, eps: f64) -> Result<Outcome, CliError> {
    let problem = &hp.problem;
    let x0 = &hp.x0;
    let opts = &cfg.solver.params;
    let l_init = opts.l_init.unwrap_or(params.l_min);
    let mut trace = if cfg.run.timed { Trace::timed() } else { Trace::new() };
    let out = match cfg.solver.kind {
        SolverKind::Pg => {
            let run = pg_solve(problem, x0, l_init, eps, params, &mut trace)?;
            Outcome {
                records: Vec::new(),
                status: run.status,
                safeguard: run.safeguard.map(|e| e.to_string()),
                apg_iters: 0,
                pg_steps: run.iterations,
                g_norm: run.g_norm,
                x_report: run.x_plus,
                g0: None,
                sigma0: None,
            }
        }
        SolverKind::ApgFixedSigma => {
            let sigma = opts.sigma.unwrap_or(FIXED_SIGMA_DEFAULT);
            let cap = opts.max_iters.unwrap_or(FIXED_SIGMA_MAX_ITERS);
            let (steps, status, err) = apg_fixed_sigma(problem, x0, l_init, sigma, eps, cap, params, &mut trace)?;
            let g_norm = steps.last().map_or(f64::INFINITY, |s| s.g_norm);
            let x_report = steps.last().map_or_else(|| x0.clone(), |s| s.x_next.clone());
            Outcome {
                records: Vec::new(),
                status,
                safeguard: err.map(|e| e.to_string()),
                apg_iters: steps.len() as u64,
                pg_steps: 0,
                g_norm,
                x_report,
                g0: None,
                sigma0: Some(sigma),
            }
        }
        SolverKind::AdaApg => {
            let monotone = opts.test_monotone.unwrap_or(false);
            let d = ada_apg_auto(problem, x0, l_init, eps, params, monotone, &mut trace)?;
            Outcome {
                records: Vec::new(),
                status: d.result.status,
                safeguard: d.result.safeguard.as_ref().map(|e| e.to_string()),
                apg_iters: d.run.as_ref().map_or(0, |r| r.apg_iters),
                pg_steps: 1,
                g_norm: d.result.g_norm,
                x_report: d.result.x_prox.clone(),
                g0: d.g0.is_finite().then_some(d.g0),
                sigma0: d.sigma0,
            }
        }
        SolverKind::RAdaApg => {
            let run = r_ada_apg_traced(problem, x0, l_init, eps, opts.sigma, params, &mut trace)?;
            let pg_steps = if run.g0.is_finite() { 1 + u64::from(run.sigma0.is_some() && opts.sigma.is_none()) } else { 0 };
            Outcome {
                records: Vec::new(),
                status: run.status,
                safeguard: run.safeguard.as_ref().map(|e| e.to_string()),
                apg_iters: run.total_apg_iters,
                pg_steps,
                g_norm: run.g_norm,
                x_report: run.x_plus.clone(),
                g0: run.g0.is_finite().then_some(run.g0),
                sigma0: run.sigma0,
            }
        }
    };
    Ok(Outcome { records: trace.into_records(), ..out })
}

fn predict(cfg: &Config, hp: &HebProblem, info: &ProblemInfo, params: &SolverParams, eps: f64, o: &Outcome) -> Predicted {
    let mut p = Predicted { sigma_threshold: info.dist0.map(|d| sigma_threshold(d, eps, params.beta)), ..Default::default() };
    let lf = hp.lf_true;
    match cfg.solver.kind {
        SolverKind::AdaApg => {
            if let (Some(sth), Some(s0)) = (p.sigma_threshold, o.sigma0) {
                p.adaapg_bound = Some(adaapg_bound(s0, sth, lf, params));
            }
        }
        SolverKind::RAdaApg => {
            let (Some(heb), Some(g0)) = (hp.heb(), o.g0) else { return p };
            let Some(s0) = o.sigma0 else {
                // stopped at the initial step
                p.n_bound = Some(0.0);
                return p;
            };
            let delta0 = info.phi_star.map_or(f64::NAN, |ps| info.phi0 - ps);
            let inputs = RestartInputs { eps, g0, sigma0: s0, lf, lmin: params.l_min };
            if let Ok(b) = restart_bound(heb, inputs, delta0, params) {
                p.sigma_bar = Some(b.sigma_bar);
                p.sigma_star = Some(b.sigma_star);
                p.eps_star = b.eps_star;
                p.sigma_star0 = b.sigma_star0;
                p.c = Some(b.c);
                p.n_bound = Some(b.n);
                match b.sigma_star0 {
                    Some(s0star) => {
                        p.c_log_branch = Some(c_log_form(s0, g0, eps, params.theta));
                        p.c_rho_above_two_branch = Some(c_rho_above_two(heb, s0, b.sigma_bar, s0star, params));
                    }
                    None => p.c_log_branch = Some(b.c),
                }
            }
        }
        SolverKind::Pg | SolverKind::ApgFixedSigma => {}
    }
    p
}

fn ratio(n: u64, bound: Option<f64>) -> Option<f64> {
    match bound {
        Some(_) if n == 0 => Some(0.0),
        Some(b) if b > 0.0 => Some(n as f64 / b),
        _ => None,
    }
}

/// Runs every ε of the grid and writes the traces and `summary.json` under
/// `out`. Safeguard terminations are reported in the summary, not as errors.
pub fn run_experiment(cfg: &Config, out: &Path) -> Result<Summary, CliError> {
    let base = cfg.build_problem()?;
    let params = cfg.solver_params_for(base.l_min);
    let info = problem_info(&base);
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;

    let mut runs = Vec::new();
    for (i, eps) in cfg.run.eps.values().into_iter().enumerate() {
        let hp = base.fresh();
        let params = params.clone().with_eps(eps);
        let o = run_solver(cfg, &hp, &params, eps)?;
        let name = trace_file_name(i, eps, cfg.run.format);
        let path: PathBuf = out.join(&name);
        export_trace(&o.records, &path, cfg.run.format).map_err(|e| CliError::io(&path, e))?;

        let predicted = predict(cfg, &hp, &info, &params, eps, &o);
        let bound = match cfg.solver.kind {
            SolverKind::AdaApg if o.g0.is_some_and(|g| g <= eps) => Some(0.0),
            SolverKind::AdaApg => predicted.adaapg_bound,
            SolverKind::RAdaApg => predicted.n_bound,
            _ => None,
        };
        let c = hp.problem.counters();
        runs.push(RunSummary {
            eps,
            params: params.clone(),
            trace_file: name,
            rows: o.records.len(),
            status: o.status,
            safeguard: o.safeguard.clone(),
            apg_iters: o.apg_iters,
            pg_steps: o.pg_steps,
            f_evals: c.f_evals,
            grad_evals: c.grad_evals,
            prox_evals: c.prox_evals,
            g_norm: o.g_norm,
            phi: hp.problem.phi_uncounted(&o.x_report),
            g0: o.g0,
            sigma0: o.sigma0,
            ratio: ratio(o.apg_iters, bound),
            predicted,
        });
    }
    let summary = Summary { solver: cfg.solver.kind.name().to_string(), problem: info, runs };
    let path = out.join(SUMMARY_FILE);
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(summary)
}
