//! Problem generators with known Lipschitz constants and error-bound data,
//! and a high-accuracy reference solver for the ones without closed forms.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::adaptive::HebParams;
use crate::error::{Error, Result};
use crate::gradient_map::prox_grad_point;
use crate::problem::{CompositeProblem, SolverParams};
use crate::prox::{L1Norm, NormPower, ZeroReg};
use crate::smooth::{DiagonalQuadratic, LeastSquares, PowerSum, ZeroSmooth};
use crate::vector::Vector;

#[derive(Clone, Debug, PartialEq)]
pub enum OptSet {
    /// X* = {point}.
    Point(Vector),
    /// Only a numerical reference solution is available.
    NumericOnly,
}

/// A composite problem with its error-bound data.
#[derive(Clone, Debug)]
pub struct HebProblem {
    pub name: String,
    pub problem: CompositeProblem,
    /// κ when known analytically.
    pub kappa: Option<f64>,
    pub rho: f64,
    /// Lipschitz constant of ∇f, valid on the level set of φ(x₀).
    pub lf_true: f64,
    /// L_min tuned for this instance.
    pub l_min: f64,
    pub opt_set: OptSet,
    pub phi_star: Option<f64>,
    pub level_note: String,
    pub x0: Vector,
    /// (x_ref, φ(x_ref)) for problems without analytic X*.
    pub reference: Option<(Vector, f64)>,
}

impl HebProblem {
    pub fn heb(&self) -> Option<HebParams> {
        self.kappa.map(|kappa| HebParams { kappa, rho: self.rho })
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// `base` with L_min replaced by this instance's value.
    pub fn params(&self, base: &SolverParams) -> SolverParams {
        base.clone().with_l_min(self.l_min)
    }

    /// The initial trial modulus used by the drivers: L_min, which lies in
    /// [L_min, γ_inc·L_f].
    pub fn l_init(&self) -> f64 {
        self.l_min
    }

    /// φ* if known, else the cached reference value.
    pub fn phi_star_or_ref(&self) -> Option<f64> {
        self.phi_star.or(self.reference.as_ref().map(|r| r.1))
    }

    /// Problem with the same data and zeroed counters.
    pub fn fresh(&self) -> Self {
        HebProblem { problem: self.problem.fresh(), ..self.clone() }
    }
}

/// dist(x, X*). For numeric-only X* this is ‖x − x_ref‖, which upper-bounds
/// the true distance when X* is not a singleton.
pub fn dist_to_opt(hp: &HebProblem, x: &Vector) -> f64 {
    match &hp.opt_set {
        OptSet::Point(p) => x.dist(p),
        OptSet::NumericOnly => match &hp.reference {
            Some((r, _)) => x.dist(r),
            None => f64::NAN,
        },
    }
}

fn normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    Vector::new(v).expect("finite samples")
}

/// f(x) = ½(x − x*)ᵀD(x − x*) with eigenvalues log-spaced in
/// [eig_min, eig_max], Ψ = 0. κ = eig_min/2, ρ = 2, L_f = eig_max.
pub fn make_quadratic(n: usize, eig_min: f64, eig_max: f64, seed: u64) -> Result<HebProblem> {
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    if !(eig_min > 0.0 && eig_min <= eig_max && eig_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 0 < eig_min <= eig_max, got [{eig_min}, {eig_max}]")));
    }
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                eig_min
            } else {
                let t = i as f64 / (n - 1) as f64;
                (eig_min.ln() + t * (eig_max.ln() - eig_min.ln())).exp()
            }
        })
        .collect();
    // endpoints exact so that κ and L_f are exact
    let mut diag = diag;
    diag[0] = eig_min;
    diag[n - 1] = eig_max;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_star = normal_vec(&mut rng, n);
    let x0 = normal_vec(&mut rng, n);
    quadratic_from(Vector::new(diag)?, x_star, x0)
}

/// Quadratic with an explicit spectrum, minimizer and start point.
pub fn quadratic_from(diag: Vector, x_star: Vector, x0: Vector) -> Result<HebProblem> {
    if diag.len() != x_star.len() || diag.len() != x0.len() {
        return Err(Error::DimensionMismatch { expected: diag.len(), found: x_star.len().min(x0.len()) });
    }
    let eig_min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let eig_max = diag.max_abs();
    if !(eig_min > 0.0) {
        return Err(Error::InvalidParameter("quadratic needs a positive spectrum".into()));
    }
    let smooth = DiagonalQuadratic::new(diag, x_star.clone());
    Ok(HebProblem {
        name: "quadratic".into(),
        problem: CompositeProblem::new(Arc::new(smooth), Arc::new(ZeroReg)),
        kappa: Some(eig_min / 2.0),
        rho: 2.0,
        lf_true: eig_max,
        l_min: eig_max / 10.0,
        opt_set: OptSet::Point(x_star),
        phi_star: Some(0.0),
        level_note: "global: f is quadratic, so L_f and κ hold on all of R^n".into(),
        x0,
        reference: None,
    })
}

/// φ = ‖x‖₁ (f ≡ 0 with declared L_f = L_min = 1). X* = {0}, κ = 1, ρ = 1.
pub fn make_sharp(n: usize, x0_scale: f64) -> Result<HebProblem> {
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    if !(x0_scale > 0.0 && x0_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("x0_scale must be positive, got {x0_scale}")));
    }
    let x0: Vec<f64> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * x0_scale * (i + 1) as f64 / n as f64
        })
        .collect();
    Ok(HebProblem {
        name: "sharp".into(),
        problem: CompositeProblem::new(Arc::new(ZeroSmooth::new(1.0)), Arc::new(L1Norm::new(1.0))),
        kappa: Some(1.0),
        rho: 1.0,
        lf_true: 1.0,
        l_min: 1.0,
        opt_set: OptSet::Point(Vector::zeros(n)),
        phi_star: Some(0.0),
        level_note: "global: ‖x‖₁ ≥ ‖x‖₂ everywhere".into(),
        x0: Vector::new(x0)?,
        reference: None,
    })
}

/// φ = ‖x‖₂^ρ with 1 < ρ < 2 (f ≡ 0 with declared L_f = L_min = 1).
/// X* = {0}, κ = 1, error bound holds with equality.
pub fn make_norm_power_nonsmooth(n: usize, rho: f64) -> Result<HebProblem> {
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    if !(rho > 1.0 && rho < 2.0) {
        return Err(Error::InvalidParameter(format!("rho must lie in (1, 2), got {rho}")));
    }
    Ok(HebProblem {
        name: "norm_power".into(),
        problem: CompositeProblem::new(Arc::new(ZeroSmooth::new(1.0)), Arc::new(NormPower::new(1.0, rho))),
        kappa: Some(1.0),
        rho,
        lf_true: 1.0,
        l_min: 1.0,
        opt_set: OptSet::Point(Vector::zeros(n)),
        phi_star: Some(0.0),
        level_note: "global: φ(x) = dist(x, {0})^ρ".into(),
        x0: Vector::filled(n, 1.0),
        reference: None,
    })
}

/// f(x) = (1/p)Σxᵢᵖ from x₀ = (1, …, 1).
pub fn make_smooth_power(n: usize, p: u32) -> Result<HebProblem> {
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    make_smooth_power_from(Vector::filled(n, 1.0), p)
}

/// f(x) = (1/p)Σxᵢᵖ, Ψ = 0, even p ≥ 4. X* = {0}, ρ = p,
/// κ = 1/(p·n^{(p−2)/2}); L_f = (p−1)·r² where r = (p·φ(x₀))^{1/p} bounds
/// every coordinate on the level set of φ(x₀).
pub fn make_smooth_power_from(x0: Vector, p: u32) -> Result<HebProblem> {
    if !(p >= 4 && p.is_multiple_of(2)) {
        return Err(Error::InvalidParameter(format!("p must be even and >= 4, got {p}")));
    }
    let n = x0.len();
    let pf = p as f64;
    let phi0: f64 = x0.iter().map(|x| x.powi(p as i32)).sum::<f64>() / pf;
    if phi0 == 0.0 {
        return Err(Error::InvalidParameter("x0 must not be the minimizer".into()));
    }
    let r = (pf * phi0).powf(1.0 / pf);
    let lf = (pf - 1.0) * r * r;
    let kappa = 1.0 / (pf * (n as f64).powf((pf - 2.0) / 2.0));
    Ok(HebProblem {
        name: "smooth_power".into(),
        problem: CompositeProblem::new(Arc::new(PowerSum::new(p, None)), Arc::new(ZeroReg)),
        kappa: Some(kappa),
        rho: pf,
        lf_true: lf,
        l_min: lf / 10.0,
        opt_set: OptSet::Point(Vector::zeros(n)),
        phi_star: Some(0.0),
        level_note: format!(
            "level set φ ≤ {phi0:e}: |x_i| ≤ {r:e}, Hessian diag (p-1)x_i^(p-2) ≤ {lf:e}; no Lipschitz hint is declared"
        ),
        x0,
        reference: None,
    })
}

/// Largest eigenvalue of AᵀA by power iteration.
pub fn gram_spectral_norm(ls: &LeastSquares) -> f64 {
    let n = ls.ncols();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lam = 0.0;
    for _ in 0..10_000 {
        let av: Vec<f64> = ls.rows().iter().map(|r| r.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
        let w = ls.transpose_apply(&av);
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nw == 0.0 {
            return 0.0;
        }
        let next = nw;
        v = w.into_iter().map(|x| x / nw).collect();
        if (next - lam).abs() <= 1e-15 * next {
            lam = next;
            break;
        }
        lam = next;
    }
    lam
}

/// f(x) = ½‖Ax − b‖², Ψ = λ‖x‖₁ with Gaussian A ∈ R^{m×n}, b ∈ R^m.
/// ρ = 2 with κ unknown; X* and φ* come from a reference solve at build.
pub fn make_lasso(m: usize, n: usize, lambda: f64, seed: u64) -> Result<HebProblem> {
    if m == 0 || n == 0 {
        return Err(Error::EmptyVector);
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..m).map(|_| normal_vec(&mut rng, n).into_vec()).collect();
    let b = normal_vec(&mut rng, m).into_vec();
    lasso_from(rows, b, lambda)
}

/// Lasso with explicit data.
pub fn lasso_from(rows: Vec<Vec<f64>>, b: Vec<f64>, lambda: f64) -> Result<HebProblem> {
    let n = rows.first().map_or(0, |r| r.len());
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    let probe = LeastSquares::new(rows.clone(), b.clone(), None);
    let lf = gram_spectral_norm(&probe);
    if !(lf > 0.0) {
        return Err(Error::InvalidParameter("lasso design matrix is zero".into()));
    }
    // small inflation keeps the hint a valid upper bound despite the
    // power-iteration error
    let hint = lf * (1.0 + 1e-9);
    let smooth = LeastSquares::new(rows, b, Some(hint));
    let problem = CompositeProblem::new(Arc::new(smooth), Arc::new(L1Norm::new(lambda)));
    let x0 = Vector::zeros(n);
    let (x_ref, phi_ref) = reference_solve(&problem.fresh(), &x0, hint, 1e-12)?;
    Ok(HebProblem {
        name: "lasso".into(),
        problem,
        kappa: None,
        rho: 2.0,
        lf_true: lf,
        l_min: lf / 10.0,
        opt_set: OptSet::NumericOnly,
        phi_star: None,
        level_note: "global L_f = λ_max(AᵀA); κ not available".into(),
        x0,
        reference: Some((x_ref, phi_ref)),
    })
}

/// Iteration cap of [`reference_solve`].
pub const REFERENCE_MAX_ITERS: u64 = 5_000_000;

/// Fixed-step proximal gradient with L = `hint_l` (a valid Lipschitz bound)
/// from `x_start` until ‖g_L(x)‖ ≤ tol. Returns (x, φ(x)).
pub fn reference_solve(problem: &CompositeProblem, x_start: &Vector, hint_l: f64, tol: f64) -> Result<(Vector, f64)> {
    if !(tol > 0.0) || !(hint_l > 0.0) {
        return Err(Error::InvalidParameter("reference_solve needs tol > 0 and hint_l > 0".into()));
    }
    let mut x = x_start.clone();
    for it in 0..REFERENCE_MAX_ITERS {
        let map = prox_grad_point(problem, &x, hint_l)?;
        if map.g_norm <= tol {
            let phi = problem.phi_uncounted(&x);
            return Ok((x, phi));
        }
        if it + 1 == REFERENCE_MAX_ITERS {
            break;
        }
        x = map.point;
    }
    Err(Error::BudgetExhausted { used: REFERENCE_MAX_ITERS, limit: REFERENCE_MAX_ITERS })
}
