//! The `rates` and `bounds` subcommands.

use std::collections::BTreeMap;
use std::path::Path;

use adapg::bounds::{adaapg_bound, c_log_form, c_rho_above_two, restart_bound, sigma_threshold, RestartInputs};
use adapg::trace::read_trace_csv;
use adapg::{fit_rate, HebParams, RateFit, SolverParams, TraceRecord};
use serde::Serialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SeriesMode {
    /// Per restart when the trace has several outer indices, else per row.
    #[default]
    Auto,
    Restart,
    Row,
}

impl std::str::FromStr for SeriesMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(SeriesMode::Auto),
            "restart" => Ok(SeriesMode::Restart),
            "row" => Ok(SeriesMode::Row),
            other => Err(format!("unknown series mode '{other}' (auto, restart, row)")),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RatesReport {
    pub series: &'static str,
    pub points: Vec<(f64, f64)>,
    pub fit: RateFit,
}

/// (t, ‖g‖) pairs. Restart mode takes the last row of each outer index;
/// row mode numbers rows from 1. Rows with a non-finite norm are dropped.
pub fn series_from_trace(records: &[TraceRecord], mode: SeriesMode) -> (&'static str, Vec<(f64, f64)>) {
    let by_restart = match mode {
        SeriesMode::Restart => true,
        SeriesMode::Row => false,
        SeriesMode::Auto => records.iter().any(|r| r.outer_t != records[0].outer_t),
    };
    if by_restart {
        let mut last: BTreeMap<u64, f64> = BTreeMap::new();
        for r in records {
            last.insert(r.outer_t, r.g_map_norm);
        }
        let pts = last.into_iter().filter(|(_, g)| g.is_finite()).map(|(t, g)| (t as f64, g)).collect();
        ("restart", pts)
    } else {
        let pts = records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.g_map_norm.is_finite())
            .map(|(i, r)| ((i + 1) as f64, r.g_map_norm))
            .collect();
        ("row", pts)
    }
}

pub fn rates_from_file(path: &Path, mode: SeriesMode) -> Result<RatesReport, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let records = read_trace_csv(std::io::BufReader::new(file))?;
    if records.is_empty() {
        return Err(CliError::Config(format!("{}: trace has no rows", path.display())));
    }
    let (series, points) = series_from_trace(&records, mode);
    let fit = fit_rate(&points)?;
    Ok(RatesReport { series, points, fit })
}

/// Inputs of the `bounds` subcommand.
#[derive(Clone, Debug)]
pub struct BoundsInput {
    pub kappa: f64,
    pub rho: f64,
    pub lf: f64,
    pub lmin: f64,
    pub eps: f64,
    pub g0: f64,
    pub sigma0: f64,
    pub dist: Option<f64>,
    pub delta0: Option<f64>,
    pub params: SolverParams,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct BoundsReport {
    /// σ(x₀, ε), needs dist.
    pub sigma_threshold: Option<f64>,
    /// AdaAPG APGIter bound at σ₀ = sigma0, needs dist.
    pub adaapg_bound: Option<f64>,
    pub sigma_bar: f64,
    pub sigma_star: f64,
    pub eps_star: Option<f64>,
    pub sigma_star0: Option<f64>,
    pub c: f64,
    pub c_log_branch: f64,
    pub c_rho_above_two_branch: Option<f64>,
    pub n_bound: f64,
}

pub fn compute_bounds(b: &BoundsInput) -> Result<BoundsReport, CliError> {
    let heb = HebParams::new(b.kappa, b.rho)?;
    b.params.validate()?;
    for (name, v) in [("lf", b.lf), ("lmin", b.lmin), ("eps", b.eps), ("g0", b.g0), ("sigma0", b.sigma0)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Config(format!("--{name} must be positive, got {v}")));
        }
    }
    let delta0 = match b.delta0 {
        Some(d) => d,
        None if b.rho < 2.0 => return Err(CliError::Config("--delta0 is required when rho < 2".into())),
        None => f64::NAN,
    };
    let p = &b.params;
    let inputs = RestartInputs { eps: b.eps, g0: b.g0, sigma0: b.sigma0, lf: b.lf, lmin: b.lmin };
    let rb = restart_bound(heb, inputs, delta0, p)?;
    let sigma_th = b.dist.map(|d| sigma_threshold(d, b.eps, p.beta));
    let (c_log_branch, c_rho_above_two_branch) = match rb.sigma_star0 {
        Some(s0star) => (
            c_log_form(b.sigma0, b.g0, b.eps, p.theta),
            Some(c_rho_above_two(heb, b.sigma0, rb.sigma_bar, s0star, p)),
        ),
        None => (rb.c, None),
    };
    Ok(BoundsReport {
        sigma_threshold: sigma_th,
        adaapg_bound: sigma_th.map(|s| adaapg_bound(b.sigma0, s, b.lf, p)),
        sigma_bar: rb.sigma_bar,
        sigma_star: rb.sigma_star,
        eps_star: rb.eps_star,
        sigma_star0: rb.sigma_star0,
        c: rb.c,
        c_log_branch,
        c_rho_above_two_branch,
        n_bound: rb.n,
    })
}
