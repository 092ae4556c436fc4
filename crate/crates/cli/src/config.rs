//! Experiment configuration, read from JSON.
//!
//! ```json
//! {
//!   "problem": { "kind": "quadratic", "n": 2, "seed": 7,
//!                "params": { "eig_min": 1.0, "eig_max": 10.0 } },
//!   "solver":  { "kind": "r-ada-apg", "params": { "theta": 0.5 } },
//!   "run":     { "eps": [1e-4, 1e-8], "eps0_mode": "upper",
//!                "max_oracle_calls": 10000000, "out": "runs/quad" }
//! }
//! ```

use std::path::{Path, PathBuf};

use adapg::testbed::{make_lasso, make_norm_power_nonsmooth, make_quadratic, make_sharp, make_smooth_power};
use adapg::{HebProblem, Sigma0Endpoint, SolverParams, TraceFormat};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub problem: ProblemSpec,
    pub solver: SolverSpec,
    #[serde(default)]
    pub run: RunSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Quadratic,
    Sharp,
    NormPower,
    SmoothPower,
    Lasso,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub n: usize,
    #[serde(default)]
    pub params: ProblemParams,
    #[serde(default)]
    pub seed: u64,
}

/// Generator parameters; each kind accepts only its own keys.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eig_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eig_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Pg,
    ApgFixedSigma,
    AdaApg,
    RAdaApg,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Pg => "pg",
            SolverKind::ApgFixedSigma => "apg-fixed-sigma",
            SolverKind::AdaApg => "ada-apg",
            SolverKind::RAdaApg => "r-ada-apg",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub kind: SolverKind,
    #[serde(default)]
    pub params: SolverOptions,
}

/// Overrides of the solver tunables. Unset fields keep the library
/// defaults; `l_min` defaults to the problem instance's value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_inc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_dec: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_reg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Initial trial modulus; defaults to L_min.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_init: Option<f64>,
    /// Fixed σ (apg-fixed-sigma) or σ⁽⁰⁾ override (r-ada-apg).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Iteration cap of apg-fixed-sigma (default 1000).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<u64>,
    /// Enables the monotonicity test in ada-apg (always on in r-ada-apg).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_monotone: Option<bool>,
}

/// A single tolerance or a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsGrid {
    One(f64),
    Many(Vec<f64>),
}

impl EpsGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            EpsGrid::One(e) => vec![*e],
            EpsGrid::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default = "default_eps")]
    pub eps: EpsGrid,
    /// Endpoint of the admissible σ₀ interval used by ada-apg: "upper" is
    /// independent of ε, "lower" scales with ε.
    #[serde(default)]
    pub eps0_mode: Sigma0Endpoint,
    #[serde(default = "default_budget")]
    pub max_oracle_calls: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: TraceFormat,
    /// Fill elapsed_s in traces (breaks byte-identical reruns).
    #[serde(default)]
    pub timed: bool,
}

fn default_eps() -> EpsGrid {
    EpsGrid::One(1e-6)
}

fn default_budget() -> u64 {
    SolverParams::default().max_oracle_calls
}

fn default_format() -> TraceFormat {
    TraceFormat::Csv
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            eps: default_eps(),
            eps0_mode: Sigma0Endpoint::default(),
            max_oracle_calls: default_budget(),
            out: None,
            format: default_format(),
            timed: false,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<TraceFormat>,
    pub seed: Option<u64>,
    pub eps: Option<f64>,
}

pub const DEFAULT_OUT: &str = "adapg-out";

impl Config {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.run.out = Some(out.clone());
        }
        if let Some(f) = o.format {
            self.run.format = f;
        }
        if let Some(s) = o.seed {
            self.problem.seed = s;
        }
        if let Some(e) = o.eps {
            self.run.eps = EpsGrid::One(e);
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.run.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.problem.n == 0 {
            return bad("problem.n must be positive".into());
        }
        let allowed: &[&str] = match self.problem.kind {
            ProblemKind::Quadratic => &["eig_min", "eig_max"],
            ProblemKind::Sharp => &["x0_scale"],
            ProblemKind::NormPower => &["rho"],
            ProblemKind::SmoothPower => &["p"],
            ProblemKind::Lasso => &["m", "lambda"],
        };
        let p = &self.problem.params;
        let given = [
            ("eig_min", p.eig_min.is_some()),
            ("eig_max", p.eig_max.is_some()),
            ("x0_scale", p.x0_scale.is_some()),
            ("rho", p.rho.is_some()),
            ("p", p.p.is_some()),
            ("m", p.m.is_some()),
            ("lambda", p.lambda.is_some()),
        ];
        for (key, set) in given {
            if set && !allowed.contains(&key) {
                return bad(format!("problem.params.{key} does not apply to {:?}", self.problem.kind));
            }
        }
        let grid = self.run.eps.values();
        if grid.is_empty() {
            return bad("run.eps must not be empty".into());
        }
        if let Some(e) = grid.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return bad(format!("run.eps values must be positive and finite, got {e}"));
        }
        if self.run.max_oracle_calls == 0 {
            return bad("run.max_oracle_calls must be positive".into());
        }
        let s = &self.solver.params;
        if s.sigma.is_some() && !matches!(self.solver.kind, SolverKind::ApgFixedSigma | SolverKind::RAdaApg) {
            return bad(format!("solver.params.sigma does not apply to {}", self.solver.kind.name()));
        }
        if s.max_iters.is_some() && self.solver.kind != SolverKind::ApgFixedSigma {
            return bad(format!("solver.params.max_iters does not apply to {}", self.solver.kind.name()));
        }
        if s.test_monotone.is_some() && self.solver.kind != SolverKind::AdaApg {
            return bad(format!("solver.params.test_monotone does not apply to {}", self.solver.kind.name()));
        }
        if let Some(sig) = s.sigma {
            if !(sig.is_finite() && sig > 0.0) {
                return bad(format!("solver.params.sigma must be positive, got {sig}"));
            }
        }
        if let Some(l) = s.l_init {
            if !(l.is_finite() && l > 0.0) {
                return bad(format!("solver.params.l_init must be positive, got {l}"));
            }
        }
        // the instance L_min is always positive; only the overrides are checked here
        self.solver_params_for(1.0).validate().map_err(CliError::from)
    }

    /// The problem instance described by `problem`.
    pub fn build_problem(&self) -> Result<HebProblem, CliError> {
        let ps = &self.problem;
        let p = &ps.params;
        let hp = match ps.kind {
            ProblemKind::Quadratic => make_quadratic(ps.n, p.eig_min.unwrap_or(1.0), p.eig_max.unwrap_or(100.0), ps.seed),
            ProblemKind::Sharp => make_sharp(ps.n, p.x0_scale.unwrap_or(1.0)),
            ProblemKind::NormPower => make_norm_power_nonsmooth(ps.n, p.rho.unwrap_or(1.5)),
            ProblemKind::SmoothPower => make_smooth_power(ps.n, p.p.unwrap_or(4)),
            ProblemKind::Lasso => make_lasso(p.m.unwrap_or(ps.n), ps.n, p.lambda.unwrap_or(0.1), ps.seed),
        };
        hp.map_err(CliError::from)
    }

    /// Library parameters with the overrides applied, L_min from the
    /// instance unless set explicitly.
    pub fn solver_params_for(&self, instance_l_min: f64) -> SolverParams {
        let s = &self.solver.params;
        let d = SolverParams::default();
        SolverParams {
            gamma_inc: s.gamma_inc.unwrap_or(d.gamma_inc),
            gamma_dec: s.gamma_dec.unwrap_or(d.gamma_dec),
            l_min: s.l_min.unwrap_or(instance_l_min),
            gamma_reg: s.gamma_reg.unwrap_or(d.gamma_reg),
            beta: s.beta.unwrap_or(d.beta),
            theta: s.theta.unwrap_or(d.theta),
            eps: d.eps,
            max_oracle_calls: self.run.max_oracle_calls,
            sigma0_endpoint: self.run.eps0_mode,
        }
    }
}
