//! Empirical convergence-rate classification of a (t, ξ_t) series.
//!
//! Fits are tried in the order finite, superlinear (log log 1/ξ vs t),
//! linear (log ξ vs t), sublinear (log ξ vs log t); the first with
//! r² ≥ [`R2_THRESHOLD`] wins. A superlinear fit must also beat the linear
//! one, since on short geometric series both can exceed the threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const R2_THRESHOLD: f64 = 0.98;
pub const MIN_POINTS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateClass {
    Finite,
    Superlinear,
    Linear,
    Sublinear,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub classification: RateClass,
    /// Superlinear: slope of log log(1/ξ) in t. Linear: −slope of log ξ in t.
    /// Sublinear: slope of log ξ in log t. Finite: the first t with ξ = 0.
    pub rate_param: f64,
    pub r2: f64,
    /// No fit reached the threshold.
    pub low_confidence: bool,
}

/// Least-squares line through (x, y): (slope, intercept, r²).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Some((slope, my - slope * mx, r2))
}

fn fit_on(series: &[(f64, f64)], keep: impl Fn(f64, f64) -> bool, fx: impl Fn(f64) -> f64, fy: impl Fn(f64) -> f64) -> Option<(f64, f64)> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = series.iter().filter(|(t, v)| keep(*t, *v)).map(|&(t, v)| (fx(t), fy(v))).unzip();
    if xs.len() < MIN_POINTS {
        return None;
    }
    linear_fit(&xs, &ys).map(|(s, _, r2)| (s, r2))
}

pub fn fit_rate(series: &[(f64, f64)]) -> Result<RateFit> {
    if series.len() < MIN_POINTS {
        return Err(Error::InvalidParameter(format!("need at least {MIN_POINTS} points, got {}", series.len())));
    }
    if let Some(&(t, v)) = series.iter().find(|(t, v)| !t.is_finite() || !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidParameter(format!("invalid series point ({t}, {v})")));
    }
    if let Some(&(t, _)) = series.iter().find(|(_, v)| *v == 0.0) {
        return Ok(RateFit { classification: RateClass::Finite, rate_param: t, r2: 1.0, low_confidence: false });
    }

    let linear = fit_on(series, |_, _| true, |t| t, f64::ln);
    let superlinear = fit_on(series, |_, v| v < 1.0, |t| t, |v| (1.0 / v).ln().ln());
    let sublinear = fit_on(series, |t, _| t > 0.0, f64::ln, f64::ln);

    let lin_r2 = linear.map_or(0.0, |f| f.1);
    if let Some((s, r2)) = superlinear {
        if r2 >= R2_THRESHOLD && r2 > lin_r2 {
            return Ok(RateFit { classification: RateClass::Superlinear, rate_param: s, r2, low_confidence: false });
        }
    }
    if let Some((s, r2)) = linear {
        if r2 >= R2_THRESHOLD {
            return Ok(RateFit { classification: RateClass::Linear, rate_param: -s, r2, low_confidence: false });
        }
    }
    match sublinear {
        Some((s, r2)) => Ok(RateFit {
            classification: RateClass::Sublinear,
            rate_param: s,
            r2,
            low_confidence: r2 < R2_THRESHOLD,
        }),
        None => Ok(RateFit { classification: RateClass::Sublinear, rate_param: f64::NAN, r2: 0.0, low_confidence: true }),
    }
}
