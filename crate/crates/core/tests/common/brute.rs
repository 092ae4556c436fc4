//! Derivative-free minimization of convex, possibly nonsmooth and
//! extended-valued, objectives: exact line searches along coordinate and
//! random directions. Slow but independent of any prox formula.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::unit;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn golden(phi: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = phi(c);
    let mut fd = phi(d);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc.is_infinite() && fd.is_infinite() {
            // the finite part of the domain lies between c and d
            a = c;
            b = d;
        } else if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = phi(c);
            continue;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = phi(d);
            continue;
        }
        c = b - GOLDEN * (b - a);
        d = a + GOLDEN * (b - a);
        fc = phi(c);
        fd = phi(d);
    }
    let m = 0.5 * (a + b);
    if phi(m) <= phi(0.0) {
        m
    } else {
        0.0
    }
}

/// Minimizes the convex function `phi` along x + t·d starting from t = 0.
fn line_min(f: &dyn Fn(&[f64]) -> f64, x: &mut [f64], d: &[f64], scale: f64) -> f64 {
    let at = |t: f64| -> f64 {
        let p: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + t * di).collect();
        f(&p)
    };
    let f0 = at(0.0);
    let mut delta = scale;
    for _ in 0..200 {
        if at(delta) >= f0 && at(-delta) >= f0 {
            break;
        }
        delta *= 2.0;
    }
    let t = golden(&at, -delta, delta);
    for (xi, di) in x.iter_mut().zip(d) {
        *xi += t * di;
    }
    f(x)
}

/// Returns an approximate minimizer of `f` started at the feasible `start`.
pub fn minimize(f: &dyn Fn(&[f64]) -> f64, start: &[f64], seed: u64) -> Vec<f64> {
    let n = start.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = start.to_vec();
    let mut fx = f(&x);
    assert!(fx.is_finite(), "start point must be feasible");
    let mut scale = 1.0;
    let mut quiet = 0;
    for _ in 0..4000 {
        let before = fx;
        let prev = x.clone();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            fx = line_min(f, &mut x, &e, scale);
        }
        for _ in 0..2 * n {
            let d = unit(&mut rng, n);
            fx = line_min(f, &mut x, &d, scale);
        }
        // pattern move along the sweep's net displacement
        let disp: Vec<f64> = x.iter().zip(&prev).map(|(a, b)| a - b).collect();
        let dn = disp.iter().map(|v| v * v).sum::<f64>().sqrt();
        if dn > 0.0 {
            let d: Vec<f64> = disp.iter().map(|v| v / dn).collect();
            fx = line_min(f, &mut x, &d, dn);
            scale = dn.max(1e-12);
        }
        if before - fx <= 1e-16 * (1.0 + fx.abs()) {
            quiet += 1;
            if quiet >= 5 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    x
}

/// argmin_x Ψ(x) + ‖x − y‖²/(2·step) by brute force.
pub fn prox_by_search(psi: &dyn Fn(&[f64]) -> f64, step: f64, y: &[f64], start: &[f64], seed: u64) -> Vec<f64> {
    let obj = |x: &[f64]| -> f64 {
        let q: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        psi(x) + q / (2.0 * step)
    };
    minimize(&obj, start, seed)
}
