mod common;

use common::c;
use num_complex::Complex64;
use proptest::prelude::*;
use rir_core::{ComplexPoly, RationalFn};

fn complex() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| c(re, im))
}

fn poly(max_len: usize) -> impl Strategy<Value = ComplexPoly> {
    prop::collection::vec(complex(), 1..=max_len).prop_map(ComplexPoly::new)
}

fn matched_distance(got: &[Complex64], want: &[Complex64]) -> f64 {
    let mut used = vec![false; got.len()];
    let mut worst: f64 = 0.0;
    for w in want {
        let (j, d) = got
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, g)| (j, (g - w).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn separated(roots: &[Complex64], gap: f64) -> bool {
    roots
        .iter()
        .enumerate()
        .all(|(i, a)| roots[i + 1..].iter().all(|b| (a - b).norm() >= gap))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn roots_round_trip(roots in prop::collection::vec(complex(), 1..=8)) {
        prop_assume!(separated(&roots, 0.05));
        let p = ComplexPoly::from_roots(&roots);
        let got = p.roots().unwrap();
        prop_assert_eq!(got.len(), roots.len());
        prop_assert!(matched_distance(&got, &roots) <= 1e-7);
        let companion = p.roots_companion().unwrap();
        prop_assert!(matched_distance(&companion, &roots) <= 1e-6);
    }

    #[test]
    fn product_is_commutative_and_associative(a in poly(5), b in poly(5), d in poly(5)) {
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        prop_assert_eq!(ab.degree(), ba.degree());
        for (x, y) in ab.coeffs().iter().zip(ba.coeffs()) {
            prop_assert!((x - y).norm() <= 1e-12 * (1.0 + x.norm()));
        }
        let left = ab.mul(&d);
        let right = a.mul(&b.mul(&d));
        for (x, y) in left.coeffs().iter().zip(right.coeffs()) {
            prop_assert!((x - y).norm() <= 1e-10 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in poly(6), b in poly(6), s in complex()) {
        let (va, vb) = (a.eval(s), b.eval(s));
        let scale = 1.0 + va.norm() * vb.norm() + va.norm() + vb.norm();
        prop_assert!((a.mul(&b).eval(s) - va * vb).norm() <= 1e-10 * scale);
        prop_assert!((a.add(&b).eval(s) - (va + vb)).norm() <= 1e-10 * scale);
        prop_assert!((a.sub(&b).eval(s) - (va - vb)).norm() <= 1e-10 * scale);
    }

    #[test]
    fn derivative_matches_finite_difference(a in poly(6), s in complex()) {
        let (_, d) = a.eval_with_derivative(s);
        prop_assert!((a.derivative().eval(s) - d).norm() <= 1e-10 * (1.0 + d.norm()));
        let h = 1e-6;
        let fd = (a.eval(s + h) - a.eval(s - h)) / (2.0 * h);
        prop_assert!((fd - d).norm() <= 1e-4 * (1.0 + d.norm()));
    }

    #[test]
    fn rational_eval_is_quotient(
        num_roots in prop::collection::vec(complex(), 0..=3),
        den_roots in prop::collection::vec(complex(), 1..=4),
        s in complex(),
    ) {
        prop_assume!(num_roots.iter().all(|z| den_roots.iter().all(|p| (z - p).norm() > 0.1)));
        prop_assume!(den_roots.iter().all(|p| (s - p).norm() > 0.1));
        let num = ComplexPoly::from_roots(&num_roots);
        let den = ComplexPoly::from_roots(&den_roots);
        let g = RationalFn::new(num.clone(), den.clone()).unwrap();
        let want = num.eval(s) / den.eval(s);
        prop_assert!((g.eval(s).unwrap() - want).norm() <= 1e-12 * (1.0 + want.norm()));
        let inv = g.reciprocal();
        prop_assume!(num_roots.iter().all(|z| (s - z).norm() > 0.1));
        if let Ok(inv) = inv {
            let v = inv.eval(s).unwrap();
            prop_assert!((v * want - 1.0).norm() <= 1e-10);
        }
    }

    #[test]
    fn imaginary_axis_substitution(a in poly(6), w in -3.0..3.0f64) {
        let q = a.on_imaginary_axis();
        let want = a.eval(c(0.0, w));
        prop_assert!((q.eval(c(w, 0.0)) - want).norm() <= 1e-10 * (1.0 + want.norm()));
    }
}

#[test]
fn real_polynomials_have_conjugate_roots() {
    let p = ComplexPoly::from_real(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    assert!(p.is_real());
    let roots = p.roots().unwrap();
    for r in &roots {
        assert!(roots.iter().any(|q| (q - r.conj()).norm() < 1e-10));
    }
}
