#![allow(dead_code)]

pub mod brute;
pub mod logging;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use adapg::testbed::{self, HebProblem, OptSet};
use adapg::Vector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn vec_of(xs: &[f64]) -> Vector {
    Vector::from_slice(xs).unwrap()
}

pub fn unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v = normal(rng, n);
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-8 {
            return v.into_iter().map(|x| x / nv).collect();
        }
    }
}

/// Testbed instances with an analytic minimizer, small enough for sweeps.
pub fn analytic_testbed() -> Vec<HebProblem> {
    vec![
        testbed::make_quadratic(6, 0.5, 20.0, 11).unwrap(),
        testbed::make_sharp(5, 2.0).unwrap(),
        testbed::make_norm_power_nonsmooth(4, 1.5).unwrap(),
        testbed::make_norm_power_nonsmooth(3, 1.2).unwrap(),
        testbed::make_smooth_power(3, 4).unwrap(),
        testbed::make_smooth_power(2, 6).unwrap(),
    ]
}

pub fn x_star(hp: &HebProblem) -> Vector {
    match &hp.opt_set {
        OptSet::Point(p) => p.clone(),
        OptSet::NumericOnly => hp.reference.as_ref().unwrap().0.clone(),
    }
}

/// Uniform-radius sample of lev φ(φ(x₀)) along a random ray from x*.
/// The level set is star-shaped about x*, so the largest admissible radius
/// is found by bisection on φ.
pub fn level_set_point(hp: &HebProblem, rng: &mut ChaCha8Rng) -> Vector {
    let xs = x_star(hp);
    let n = xs.len();
    let level = hp.problem.phi_uncounted(&hp.x0);
    let u = vec_of(&unit(rng, n));
    let at = |r: f64| xs.lincomb(1.0, r, &u);
    let mut hi = 1.0;
    while hp.problem.phi_uncounted(&at(hi)) <= level {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if hp.problem.phi_uncounted(&at(mid)) <= level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r: f64 = rng.random_range(0.0..1.0);
    at(lo * r.max(1e-3))
}
