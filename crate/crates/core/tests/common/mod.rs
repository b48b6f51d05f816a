#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn log_space(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// Peak of `f` over a log grid on `[1e-4, 1e4]` (mirrored when `both_signs`),
/// `0` and `±1e9`, with golden-section refinement of the best cell.
pub fn grid_peak(f: impl Fn(f64) -> f64, points: usize, both_signs: bool) -> f64 {
    let pos = log_space(1e-4, 1e4, points);
    let mut w = Vec::with_capacity(2 * points + 3);
    if both_signs {
        w.push(-1e9);
        w.extend(pos.iter().rev().map(|x| -x));
    }
    w.push(0.0);
    w.extend(pos.iter().copied());
    w.push(1e9);
    let vals: Vec<f64> = w.iter().map(|&x| f(x)).collect();
    let (i, &best) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    if i == 0 || i + 1 == w.len() {
        return best;
    }
    best.max(golden_max(&f, w[i - 1], w[i + 1]))
}

/// Real coefficients (descending) of `Π(s − r)`; conjugate pairs expected.
pub fn real_poly_from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut p = vec![c(1.0, 0.0)];
    for r in roots {
        let mut next = vec![c(0.0, 0.0); p.len() + 1];
        for (i, &a) in p.iter().enumerate() {
            next[i] += a;
            next[i + 1] -= a * r;
        }
        p = next;
    }
    p.iter().map(|z| z.re).collect()
}

/// Stable roots: real in `[-5, -0.1]` or conjugate pairs with real part in
/// `[-3, -0.05]`.
pub fn random_stable_roots(rng: &mut impl Rng, degree: usize) -> Vec<Complex64> {
    let mut roots = Vec::with_capacity(degree);
    while roots.len() < degree {
        if degree - roots.len() >= 2 && rng.gen_bool(0.5) {
            let z = c(rng.gen_range(-3.0..-0.05), rng.gen_range(0.1..10.0));
            roots.push(z);
            roots.push(z.conj());
        } else {
            roots.push(c(rng.gen_range(-5.0..-0.1), 0.0));
        }
    }
    roots
}

/// `(num, den)` of a random stable proper real rational of degree `1..=max_degree`.
pub fn random_stable_rational(rng: &mut impl Rng, max_degree: usize) -> (Vec<f64>, Vec<f64>) {
    let d = rng.gen_range(1..=max_degree);
    let den = real_poly_from_roots(&random_stable_roots(rng, d));
    let m = rng.gen_range(0..=d);
    let mut num: Vec<f64> = (0..=m).map(|_| rng.gen_range(-2.0..2.0)).collect();
    if num[0].abs() < 0.1 {
        num[0] = 0.5;
    }
    (num, den)
}
