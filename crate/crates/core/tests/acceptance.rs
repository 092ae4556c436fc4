//! Acceptance criteria 1-10. Runs as a plain binary and prints one
//! PASS/FAIL line per criterion; exits non-zero if any criterion fails.

mod common;

use std::sync::{Arc, Mutex};
use std::time::Instant;

use rand::Rng;

use adapg::adaptive::{ada_apg_auto, apg_fixed_sigma, r_ada_apg, LoopExit, Status};
use adapg::bounds::{
    a_growth_lower_bound, adaapg_bound, eps_star, objective_gap_bound, restart_bound, restart_count_bound,
    sigma_threshold, RestartInputs,
};
use adapg::engine::{apg_step, EstimateState};
use adapg::gradient_map::{descent_condition, prox_grad_point, reg_prox_grad_point};
use adapg::prox::{AugmentedRegularizer, BoxIndicator, L1Norm, L2Norm, NormPower, RegTerm, ZeroReg};
use adapg::rate::{fit_rate, linear_fit, RateClass};
use adapg::smooth::{DiagonalQuadratic, LeastSquares, ScaledSquare, ZeroSmooth};
use adapg::testbed::{self, dist_to_opt, reference_solve, HebProblem};
use adapg::{CompositeProblem, HebParams, Regularizer, SmoothOracle, SolverParams, Trace, Vector};

use common::logging::{count, Event, LoggedReg, LoggedSmooth};
use common::{brute, level_set_point, rng, unit, vec_of, x_star};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn base_params() -> SolverParams {
    SolverParams::default()
}

fn c1_line_search_envelope() -> Outcome {
    let instances = vec![
        testbed::make_quadratic(20, 1.0, 50.0, 1).map_err(|e| e.to_string())?,
        testbed::make_sharp(10, 3.0).map_err(|e| e.to_string())?,
        testbed::make_norm_power_nonsmooth(8, 1.5).map_err(|e| e.to_string())?,
        testbed::make_smooth_power(4, 4).map_err(|e| e.to_string())?,
        testbed::make_lasso(30, 20, 0.5, 2).map_err(|e| e.to_string())?,
    ];
    let mut checked = 0usize;
    for hp in &instances {
        let p = hp.params(&base_params());
        let hi = p.gamma_inc * hp.lf_true;
        let inside = |m: f64| m >= p.l_min && m <= hi;

        let prob = hp.problem.fresh();
        let mut trace = Trace::new();
        let drv = ada_apg_auto(&prob, &hp.x0, hp.l_init(), 1e-6, &p, false, &mut trace).map_err(|e| e.to_string())?;
        ensure(inside(drv.m0), || format!("{}: initial M {} outside [{}, {hi}]", hp.name, drv.m0, p.l_min))?;
        for r in &trace.records {
            ensure(inside(r.m), || format!("{} AdaAPG: M {} outside [{}, {hi}]", hp.name, r.m, p.l_min))?;
            checked += 1;
        }
        if let Some(run) = &drv.run {
            for s in &run.steps {
                ensure(s.l_next >= p.l_min && s.l_next <= hi, || format!("{}: L {} outside", hp.name, s.l_next))?;
            }
        }

        let prob = hp.problem.fresh();
        let (run, rows) = r_ada_apg(&prob, &hp.x0, hp.l_init(), 1e-9, &p).map_err(|e| e.to_string())?;
        ensure(run.status == Status::Converged, || format!("{} rAdaAPG did not converge", hp.name))?;
        for r in &rows {
            ensure(inside(r.m), || format!("{} rAdaAPG: M {} outside [{}, {hi}]", hp.name, r.m, p.l_min))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} recorded M values on {} problems", instances.len()))
}

fn c2_estimate_growth() -> Outcome {
    let hp = testbed::make_quadratic(50, 1.0, 100.0, 5).map_err(|e| e.to_string())?;
    let p = hp.params(&base_params());
    let sigma = 1.0;
    let (steps, _, _) = apg_fixed_sigma(&hp.problem.fresh(), &hp.x0, hp.l_init(), sigma, 0.0, 200, &p, &mut Trace::new())
        .map_err(|e| e.to_string())?;
    ensure(steps.len() == 200, || format!("only {} iterations ran", steps.len()))?;
    let mut worst = f64::INFINITY;
    for s in &steps {
        let k = s.k + 1;
        let lb = a_growth_lower_bound(k, sigma, hp.lf_true, p.gamma_inc);
        ensure(s.a_next >= lb, || format!("A_{k} = {:e} < bound {lb:e}", s.a_next))?;
        worst = worst.min(s.a_next / lb);
    }
    Ok(format!("A_k >= bound for k = 1..200, min ratio {worst:.3}"))
}

fn c3_adaapg_bound() -> Outcome {
    let hp = testbed::make_quadratic(100, 1.0, 100.0, 7).map_err(|e| e.to_string())?;
    // without restarts the smallest tolerances need ~1e8 oracle calls; the
    // budget must not be what ends the run
    let p = SolverParams { max_oracle_calls: 2_000_000_000, ..hp.params(&base_params()) };
    let dist = dist_to_opt(&hp, &hp.x0);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for e in 2..=8 {
        let eps = 10f64.powi(-e);
        let prob = hp.problem.fresh();
        let drv = ada_apg_auto(&prob, &hp.x0, hp.l_init(), eps, &p, false, &mut Trace::new()).map_err(|e| e.to_string())?;
        ensure(drv.result.status == Status::Converged, || format!("eps {eps:e}: no convergence"))?;
        ensure(drv.result.g_norm <= eps, || format!("eps {eps:e}: final ‖g‖ {:e}", drv.result.g_norm))?;
        let run = drv.run.as_ref().ok_or("initial point already optimal")?;
        let s0 = drv.sigma0.unwrap();
        let s_th = sigma_threshold(dist, eps, p.beta);
        let bound = adaapg_bound(s0, s_th, hp.lf_true, &p);
        let n = run.apg_iters as f64;
        ensure(n <= bound, || format!("eps {eps:e}: N = {n} > bound {bound:.1}"))?;
        for lp in run.loops.iter().filter(|l| l.j > 0) {
            ensure(lp.sigma >= s_th / p.gamma_reg, || format!("eps {eps:e}: σ_{} = {:e} < σ_th/γ", lp.j, lp.sigma))?;
        }
        worst = worst.max(n / bound);
        parts.push(format!("{n}"));
    }
    Ok(format!("N = [{}], max N/bound = {worst:.3}", parts.join(", ")))
}

fn c4_linear_rate() -> Outcome {
    let hp = testbed::make_quadratic(100, 1.0, 100.0, 7).map_err(|e| e.to_string())?;
    let p = hp.params(&base_params());
    let mut logs = Vec::new();
    let mut ns = Vec::new();
    let mut series = Vec::new();
    for e in 2..=10 {
        let eps = 10f64.powi(-e);
        let (run, _) = r_ada_apg(&hp.problem.fresh(), &hp.x0, hp.l_init(), eps, &p).map_err(|e| e.to_string())?;
        ensure(run.status == Status::Converged && run.g_norm <= eps, || format!("eps {eps:e}: not converged"))?;
        logs.push((1.0 / eps).ln());
        ns.push(run.total_apg_iters as f64);
        if e == 10 {
            series = run.records.iter().map(|r| (r.t as f64, r.g_norm_t)).collect();
        }
    }
    let fit = fit_rate(&series).map_err(|e| e.to_string())?;
    ensure(fit.classification == RateClass::Linear && fit.r2 >= 0.98, || {
        format!("restart series classified {:?} (r² {:.4})", fit.classification, fit.r2)
    })?;
    let (s1, _, _) = linear_fit(&logs[..5], &ns[..5]).unwrap();
    let (s2, _, _) = linear_fit(&logs[4..], &ns[4..]).unwrap();
    let rel = (s1 - s2).abs() / s1.abs().max(s2.abs());
    ensure(rel <= 0.15, || format!("slopes {s1:.2} vs {s2:.2} differ by {:.1}%", 100.0 * rel))?;
    Ok(format!(
        "Linear r² {:.4}, rate {:.3}; N/log(1/ε) slopes {s1:.2} / {s2:.2} ({:.1}% apart)",
        fit.r2,
        fit.rate_param,
        100.0 * rel
    ))
}

fn c5_finite_termination() -> Outcome {
    let hp = testbed::make_sharp(20, 5.0).map_err(|e| e.to_string())?;
    let p = hp.params(&base_params());
    let mut counts = Vec::new();
    let mut es = 0.0;
    for eps in [1e-6, 1e-12] {
        let (run, _) = r_ada_apg(&hp.problem.fresh(), &hp.x0, hp.l_init(), eps, &p).map_err(|e| e.to_string())?;
        ensure(run.status == Status::Converged, || format!("eps {eps:e}: not converged"))?;
        ensure(run.x_plus.iter().all(|v| v.to_bits() == 0), || format!("eps {eps:e}: x₊ = {:?}", run.x_plus))?;
        es = eps_star(hp.heb().unwrap(), hp.lf_true, hp.l_min, run.sigma0.unwrap_or(0.0), &p).unwrap();
        ensure(eps < es, || format!("eps {eps:e} not below ε_* {es}"))?;
        counts.push(run.total_apg_iters);
    }
    ensure(counts[0] == counts[1], || format!("APGIter counts differ: {counts:?}"))?;
    Ok(format!("x₊ bitwise zero, N = {} for ε = 1e-6 and 1e-12 (ε_* = {es})", counts[0]))
}

fn c6_superlinear() -> Outcome {
    let rho = 1.5;
    let hp = testbed::make_norm_power_nonsmooth(10, rho).map_err(|e| e.to_string())?;
    let p = hp.params(&base_params());
    let (run, _) = r_ada_apg(&hp.problem.fresh(), &hp.x0, hp.l_init(), 1e-12, &p).map_err(|e| e.to_string())?;
    ensure(run.status == Status::Converged, || "not converged".into())?;
    let es = eps_star(hp.heb().unwrap(), hp.lf_true, hp.l_min, run.sigma0.unwrap(), &p).map_err(|e| e.to_string())?;
    let recs = &run.records;
    let t_star = recs.iter().position(|r| r.g_norm_t <= es).ok_or("ξ_t never fell below ε_*")?;
    let coef = p.theta * es.powf((rho - 2.0) / (rho - 1.0));
    let mut checked = 0;
    for w in recs[t_star..].windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let rhs = coef * a.g_norm_t.powf(1.0 / (rho - 1.0));
        ensure(b.g_norm_t <= rhs * (1.0 + 1e-9), || {
            format!("t = {}: ξ_(t+1) = {:e} > {:e}", a.t, b.g_norm_t, rhs)
        })?;
        ensure(a.apgiter_count == 1, || format!("t = {}: N^(t) = {}", a.t, a.apgiter_count))?;
        checked += 1;
    }
    ensure(checked >= 2, || format!("only {checked} restarts below ε_*"))?;
    Ok(format!("ε_* = {es:.4e}; {checked} restarts after T_* = {t_star} satisfy the recurrence with N^(t) = 1"))
}

fn c7_sublinear_envelope() -> Outcome {
    let hp = testbed::make_smooth_power(5, 4).map_err(|e| e.to_string())?;
    let p = hp.params(&base_params());
    let heb = hp.heb().unwrap();
    let mut pts = Vec::new();
    for e in 1..=6 {
        let eps = 10f64.powi(-e);
        let (run, _) = r_ada_apg(&hp.problem.fresh(), &hp.x0, hp.l_init(), eps, &p).map_err(|e| e.to_string())?;
        ensure(run.status == Status::Converged, || format!("eps {eps:e}: not converged"))?;
        let inp = RestartInputs { eps, g0: run.g0, sigma0: run.sigma0.unwrap(), lf: hp.lf_true, lmin: hp.l_min };
        let b = restart_bound(heb, inp, 0.0, &p).map_err(|e| e.to_string())?;
        let n = run.total_apg_iters as f64;
        ensure(n <= b.n, || format!("eps {eps:e}: N = {n} > bound {:.1}", b.n))?;
        pts.push((eps, n));
    }
    let h = |eps: f64| eps.powf(-1.0 / 3.0) * (1.0 / eps).ln();
    // least-squares fit of log N = log c + log h, then every point and the
    // growth across the whole grid must stay within a factor 2 of it
    let log_c = pts.iter().map(|&(e, n)| n.ln() - h(e).ln()).sum::<f64>() / pts.len() as f64;
    let c = log_c.exp();
    for &(e, n) in &pts {
        ensure(n <= 2.0 * c * h(e), || format!("ε={e:e}: N = {n} above 2x the fitted envelope {:.1}", c * h(e)))?;
    }
    let (e0, n0) = pts[0];
    let (e1, n1) = pts[pts.len() - 1];
    ensure(n1 / n0 <= 2.0 * h(e1) / h(e0), || {
        format!("N grew {:.2}x over the grid, envelope allows {:.2}x", n1 / n0, 2.0 * h(e1) / h(e0))
    })?;
    let ns: Vec<String> = pts.iter().map(|(_, n)| format!("{n}")).collect();
    Ok(format!("N = [{}] within the restart bound and 2x of c·ε^(-1/3)·log(1/ε), c = {c:.3}", ns.join(", ")))
}

fn with_start(hp: &HebProblem, x0: Vector) -> HebProblem {
    if hp.name == "smooth_power" {
        testbed::make_smooth_power_from(x0, hp.rho as u32).unwrap()
    } else {
        HebProblem { x0, ..hp.fresh() }
    }
}

fn c8_invariants() -> Outcome {
    let mut r = rng(8);
    let beds = common::analytic_testbed();
    let mut tally = Vec::new();

    // gradient mapping properties
    let mut n1 = 0;
    for i in 0..600 {
        let hp = &beds[i % beds.len()];
        let prob = &hp.problem;
        let y = level_set_point(hp, &mut r);
        let l1: f64 = r.random_range(1.0..100.0);
        let l2: f64 = r.random_range(l1..=100.0);
        let g1 = prox_grad_point(prob, &y, l1).unwrap().g_norm;
        let g2 = prox_grad_point(prob, &y, l2).unwrap().g_norm;
        ensure(g1 <= g2 + 1e-10, || format!("{}: ‖g_L‖ not increasing in L ({g1:e} > {g2:e})", hp.name))?;

        let xs = x_star(hp);
        let gs = prox_grad_point(prob, &xs, l1).unwrap().g_norm;
        ensure(gs <= 1e-8, || format!("{}: ‖g_L(x*)‖ = {gs:e}", hp.name))?;
        if y.dist(&xs) > 1e-6 {
            ensure(g1 > 0.0, || format!("{}: ‖g_L‖ = 0 at a non-optimal point", hp.name))?;
        }

        let l = hp.lf_true * r.random_range(1.0..10.0);
        let map = prox_grad_point(prob, &y, l).unwrap();
        let gvec = (&y - &map.point).scale(l);
        let sub = &(&prob.grad(&map.point).unwrap() - &prob.grad(&y).unwrap()) + &gvec;
        let s = sub.norm();
        ensure(s <= (hp.lf_true / l + 1.0) * map.g_norm + 1e-9, || format!("{}: subgradient bound", hp.name))?;

        let holds = descent_condition(prob, &y, l).unwrap();
        ensure(holds, || format!("{}: descent fails with L = {l} >= L_f", hp.name))?;
        let lr = r.random_range(0.05..1.0) * hp.lf_true;
        for ll in [l, lr] {
            if descent_condition(prob, &y, ll).unwrap() {
                let m = prox_grad_point(prob, &y, ll).unwrap();
                let drop = prob.phi_uncounted(&y) - prob.phi_uncounted(&m.point);
                ensure(m.g_norm * m.g_norm / (2.0 * ll) <= drop + 1e-9, || format!("{}: sufficient decrease", hp.name))?;
                ensure(m.g_norm / (2.0 * ll) <= dist_to_opt(hp, &y) + 1e-9, || format!("{}: distance bound", hp.name))?;
            }
        }

        // error-bound inequalities at T_L(y) with the subgradient above
        let t = &map.point;
        let heb = hp.heb().unwrap();
        let d = dist_to_opt(hp, t);
        if d > 0.0 {
            let gap = prob.phi_uncounted(t) - hp.phi_star.unwrap();
            ensure(heb.kappa * d.powf(heb.rho - 1.0) <= s + 1e-8, || format!("{}: κ·dist^(ρ-1) > ‖∂φ‖", hp.name))?;
            ensure(heb.kappa.powf(1.0 / heb.rho) * gap.max(0.0).powf((heb.rho - 1.0) / heb.rho) <= s + 1e-8, || {
                format!("{}: gradient inequality fails", hp.name)
            })?;
        }
        n1 += 1;
    }
    tally.push(format!("mapping/error-bound {n1}"));

    // regularized mapping vs plain mapping
    let mut n3 = 0;
    for i in 0..300 {
        let hp = &beds[i % beds.len()];
        let y = level_set_point(hp, &mut r);
        let x0 = level_set_point(hp, &mut r);
        let sigma: f64 = r.random_range(0.01..5.0);
        let total = sigma + hp.lf_true * r.random_range(0.5..5.0);
        let plain = prox_grad_point(&hp.problem, &y, total).unwrap();
        let term = RegTerm::new(sigma, x0.clone());
        let reg = reg_prox_grad_point(&hp.problem, &term, &y, total - sigma).unwrap();
        let diff = (&plain.point - &reg.point).scale(total).norm();
        ensure(diff <= sigma * y.dist(&x0) + 1e-9, || format!("{}: ‖g − g^σ‖ = {diff:e} too large", hp.name))?;
        n3 += 1;
    }
    for i in 0..100 {
        let hp = &beds[i % beds.len()];
        let x0 = level_set_point(hp, &mut r);
        let sigma: f64 = r.random_range(0.05..2.0);
        let reg = hp.problem.regularized(sigma, x0.clone());
        let (xs_sigma, _) = reference_solve(&reg, &x0, hp.lf_true + sigma, 1e-11).map_err(|e| e.to_string())?;
        ensure(x0.dist(&xs_sigma) <= dist_to_opt(hp, &x0) + 1e-7, || format!("{}: ‖x₀ − x*_σ‖ > dist", hp.name))?;
        n3 += 1;
    }
    tally.push(format!("regularization {n3}"));

    // restart-scheme monotonicity, restart count and objective certificate
    let mut n8 = 0;
    for i in 0..100 {
        let hp = &beds[i % beds.len()];
        let n = hp.dim();
        let scale: f64 = r.random_range(0.2..2.0);
        let x0 = vec_of(&unit(&mut r, n)).scale(scale);
        let inst = with_start(hp, x0);
        let p = inst.params(&base_params());
        let (run, _) = r_ada_apg(&inst.problem.fresh(), &inst.x0, inst.l_init(), 1e-8, &p).map_err(|e| e.to_string())?;
        ensure(run.status == Status::Converged, || format!("{}: rAdaAPG did not converge", inst.name))?;
        let phi0 = inst.problem.phi_uncounted(&inst.x0);
        let mut prev = phi0;
        for rec in &run.records {
            ensure(rec.phi_plus_t <= prev + 1e-12 * (1.0 + prev.abs()), || {
                format!("{}: φ(x₊) increased at t = {}", inst.name, rec.t)
            })?;
            prev = rec.phi_plus_t;
            ensure(rec.t as f64 <= restart_count_bound(run.g0, rec.g_norm_t, p.theta) + 1e-9, || {
                format!("{}: restart count exceeds log bound at t = {}", inst.name, rec.t)
            })?;
            let heb = inst.heb().unwrap();
            if heb.rho >= 2.0 {
                let gap = rec.phi_plus_t - inst.phi_star.unwrap();
                let b = objective_gap_bound(heb, inst.lf_true, inst.l_min, rec.g_norm_t);
                ensure(gap <= b + 1e-7, || format!("{}: objective gap {gap:e} > certificate {b:e}", inst.name))?;
            }
        }
        n8 += 1;
    }
    tally.push(format!("restart runs {n8}"));
    Ok(tally.join(", "))
}

fn split_passes(events: &[Event]) -> (Vec<Event>, Vec<Vec<Event>>) {
    let first = events.iter().position(|e| *e == Event::Grad).unwrap_or(events.len());
    let prefix = events[..first].to_vec();
    let mut passes: Vec<Vec<Event>> = Vec::new();
    let mut grads = 0;
    for e in &events[first..] {
        if *e == Event::Grad {
            if grads % 2 == 0 {
                passes.push(Vec::new());
            }
            grads += 1;
        }
        passes.last_mut().unwrap().push(*e);
    }
    (prefix, passes)
}

fn accounting_case(
    smooth: Arc<dyn SmoothOracle>,
    reg: Arc<dyn Regularizer>,
    x0: Vector,
    l_init: f64,
    sigma: f64,
    monotone: bool,
) -> Result<usize, String> {
    let log = Arc::new(Mutex::new(Vec::new()));
    let prob = CompositeProblem::new(
        Arc::new(LoggedSmooth { inner: smooth, log: log.clone() }),
        Arc::new(LoggedReg { inner: reg, log: log.clone() }),
    );
    let p = SolverParams { l_min: l_init.min(0.05), ..base_params() };
    let mut state = EstimateState::new(x0.clone(), sigma);
    let mut x = x0;
    let mut l = l_init;
    let mut passes_seen = 0;
    for k in 0..40 {
        let start = log.lock().unwrap().len();
        let had_mass = state.a_sum > 0.0;
        let (out, next) = apg_step(&prob, &x, &state, l, &p, monotone).map_err(|e| e.to_string())?;
        let events = log.lock().unwrap()[start..].to_vec();
        let (prefix, passes) = split_passes(&events);
        let want_prefix = if had_mass { vec![Event::Prox] } else { vec![] };
        ensure(prefix == want_prefix, || format!("step {k}: unexpected calls before the first pass {prefix:?}"))?;
        ensure(passes.len() == out.ls_passes as usize, || {
            format!("step {k}: {} passes logged, {} reported", passes.len(), out.ls_passes)
        })?;
        for (i, pass) in passes.iter().enumerate() {
            ensure(count(pass, Event::Grad) == 2, || format!("step {k} pass {i}: {} gradients", count(pass, Event::Grad)))?;
            ensure(count(pass, Event::Value) <= 3, || format!("step {k} pass {i}: {} f evals", count(pass, Event::Value)))?;
            ensure(count(pass, Event::Prox) <= 3, || format!("step {k} pass {i}: {} prox calls", count(pass, Event::Prox)))?;
        }
        passes_seen += passes.len();
        x = out.x_next;
        l = out.l_next;
        state = next;
    }
    let all = log.lock().unwrap().clone();
    let c = prob.counters();
    ensure(
        c.f_evals == count(&all, Event::Value) && c.grad_evals == count(&all, Event::Grad) && c.prox_evals == count(&all, Event::Prox),
        || format!("counters {c:?} disagree with the call log"),
    )?;
    Ok(passes_seen)
}

fn c9_oracle_accounting() -> Outcome {
    let mut passes = 0;
    let quad = || -> Arc<dyn SmoothOracle> {
        Arc::new(DiagonalQuadratic::new(vec_of(&[1.0, 30.0, 4.0]), vec_of(&[0.5, -1.0, 2.0])).without_hint())
    };
    let quad_hint = || -> Arc<dyn SmoothOracle> {
        Arc::new(DiagonalQuadratic::new(vec_of(&[1.0, 30.0, 4.0]), vec_of(&[0.5, -1.0, 2.0])))
    };
    let x0 = vec_of(&[3.0, 3.0, -3.0]);
    for monotone in [false, true] {
        passes += accounting_case(quad(), Arc::new(L1Norm::new(0.3)), x0.clone(), 0.05, 0.5, monotone)?;
        passes += accounting_case(quad_hint(), Arc::new(L1Norm::new(0.3)), x0.clone(), 0.05, 0.5, monotone)?;
        passes += accounting_case(quad(), Arc::new(L2Norm::new(1.0)), x0.clone(), 100.0, 0.1, monotone)?;
        passes += accounting_case(Arc::new(ZeroSmooth::new(1.0)), Arc::new(L1Norm::new(1.0)), x0.clone(), 1.0, 0.3, monotone)?;
        let rows = vec![vec![1.0, 2.0, 0.0], vec![0.0, 1.0, -1.0], vec![3.0, 0.0, 1.0], vec![1.0, 1.0, 1.0]];
        let ls = LeastSquares::new(rows, vec![1.0, 0.0, -2.0, 0.5], None);
        passes += accounting_case(Arc::new(ls), Arc::new(NormPower::new(0.5, 1.5)), x0.clone(), 0.05, 0.2, monotone)?;
    }

    // trace counters reconcile with the wrapper at the end of full runs
    for hp in [
        testbed::make_quadratic(10, 1.0, 20.0, 3).unwrap(),
        testbed::make_lasso(15, 10, 0.3, 4).unwrap(),
    ] {
        let prob = hp.problem.fresh();
        let (_, rows) = r_ada_apg(&prob, &hp.x0, hp.l_init(), 1e-9, &hp.params(&base_params())).map_err(|e| e.to_string())?;
        let last = rows.last().ok_or("empty trace")?;
        let c = prob.counters();
        ensure(
            (last.f_evals, last.grad_evals, last.prox_evals) == (c.f_evals, c.grad_evals, c.prox_evals),
            || format!("{}: trace counters differ from wrapper {c:?}", hp.name),
        )?;
        for w in rows.windows(2) {
            ensure(
                w[1].f_evals >= w[0].f_evals && w[1].grad_evals >= w[0].grad_evals && w[1].prox_evals >= w[0].prox_evals,
                || "counters decreased between rows".into(),
            )?;
        }
    }
    Ok(format!("{passes} line-search passes checked against an independent call log"))
}

fn c10_prox_equivalence() -> Outcome {
    let mut r = rng(10);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for op in 0..7 {
        for inst in 0..20 {
            let n = 1 + inst % 5;
            let y: Vec<f64> = common::normal(&mut r, n).iter().map(|v| 2.0 * v).collect();
            let step: f64 = r.random_range(0.1..2.0);
            let w: f64 = r.random_range(0.1..2.0);
            let yv = vec_of(&y);
            let (reg, start): (Box<dyn Regularizer>, Vec<f64>) = match op {
                0 => (Box::new(ZeroReg), y.clone()),
                1 => (Box::new(L1Norm::new(w)), y.clone()),
                2 => (Box::new(L2Norm::new(w)), y.clone()),
                3 => {
                    let rho = r.random_range(1.1..1.9);
                    (Box::new(NormPower::new(w, rho)), y.clone())
                }
                4 => {
                    let lo = -r.random_range(0.1..1.0);
                    let hi = r.random_range(0.1..1.0);
                    (Box::new(BoxIndicator::new(lo, hi)), vec![0.5 * (lo + hi); n])
                }
                5 => {
                    let c = vec_of(&common::normal(&mut r, n));
                    let s = r.random_range(0.1..3.0);
                    (Box::new(AugmentedRegularizer::new(L1Norm::new(w), RegTerm::new(s, c))), y.clone())
                }
                _ => {
                    let c = vec_of(&common::normal(&mut r, n));
                    let s = r.random_range(0.1..3.0);
                    let rho = r.random_range(1.1..1.9);
                    (Box::new(AugmentedRegularizer::new(NormPower::new(w, rho), RegTerm::new(s, c))), y.clone())
                }
            };
            let got = reg.prox(step, &yv).map_err(|e| e.to_string())?;
            let psi = |x: &[f64]| reg.value(&Vector::from_slice(x).unwrap());
            let want = brute::prox_by_search(&psi, step, &y, &start, 1000 + cases as u64);
            let err = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            ensure(err <= 1e-6, || format!("operator {op} instance {inst}: max deviation {err:e}"))?;
            worst = worst.max(err);
            cases += 1;
        }
    }
    Ok(format!("{cases} instances, max deviation {worst:.2e}"))
}

fn main() {
    // a scalar smoke case first so that gross wiring errors fail fast
    let smoke = CompositeProblem::new(Arc::new(ScaledSquare::new(1.0)), Arc::new(ZeroReg));
    assert!(prox_grad_point(&smoke, &vec_of(&[2.0]), 1.0).unwrap().point.is_zero());
    let _ = HebParams::new(1.0, 2.0).unwrap();
    let _ = LoopExit::Converged;

    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("line-search envelope", c1_line_search_envelope),
        ("estimate-sequence growth", c2_estimate_growth),
        ("AdaAPG termination and bound", c3_adaapg_bound),
        ("rho = 2 linear rate", c4_linear_rate),
        ("rho = 1 finite termination", c5_finite_termination),
        ("rho in (1,2) superlinear", c6_superlinear),
        ("rho > 2 sublinear envelope", c7_sublinear_envelope),
        ("invariant suites", c8_invariants),
        ("oracle accounting", c9_oracle_accounting),
        ("prox oracle equivalence", c10_prox_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} [{name}]: PASS ({secs:.2}s) {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} [{name}]: FAIL ({secs:.2}s) {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
