//! Complex-coefficient polynomials and rational functions.
//!
//! Coefficients are stored in descending powers of `s`: `coeffs[0]` multiplies
//! `s^deg`. Real-coefficient data is stored as complex with zero imaginary
//! parts.
//!
//! Roots come from Aberth–Ehrlich simultaneous iteration (closed forms for
//! degree one and two), followed by a Newton polish. A companion-matrix route
//! ([`ComplexPoly::roots_companion`]) is kept as an independent check.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RirError};

/// Relative threshold for treating a coefficient as cancelled.
pub const TOL_COEFF: f64 = 1e-12;
/// Root residual bound, relative to `max|coeff| * max(1,|r|)^deg`.
pub const TOL_RESIDUAL: f64 = 1e-8;
/// Minimum separation between numerator and denominator roots.
pub const TOL_CANCEL: f64 = 1e-7;

const ABERTH_MAX_ITER: usize = 800;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Univariate polynomial with complex coefficients, descending powers.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for ComplexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexPoly{:?}", self.coeffs)
    }
}

impl ComplexPoly {
    /// Builds a polynomial from descending coefficients; leading exact zeros
    /// are dropped, an empty list is the zero polynomial.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let first = coeffs.iter().position(|z| *z != Complex64::new(0.0, 0.0));
        match first {
            Some(i) => ComplexPoly {
                coeffs: coeffs[i..].to_vec(),
            },
            None => Self::zero(),
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| cr(x)).collect())
    }

    pub fn zero() -> Self {
        ComplexPoly {
            coeffs: vec![cr(0.0)],
        }
    }

    pub fn constant(value: Complex64) -> Self {
        Self::new(vec![value])
    }

    pub fn one() -> Self {
        Self::constant(cr(1.0))
    }

    /// `s - root`
    pub fn linear_factor(root: Complex64) -> Self {
        Self::new(vec![cr(1.0), -root])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots
            .iter()
            .fold(Self::one(), |acc, &r| acc.mul(&Self::linear_factor(r)))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == cr(0.0)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when every imaginary part is below `TOL_COEFF * max|coeff|`.
    pub fn is_real(&self) -> bool {
        let tol = TOL_COEFF * self.max_abs_coeff();
        self.coeffs.iter().all(|z| z.im.abs() <= tol)
    }

    /// Horner evaluation.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(cr(0.0), |acc, &coef| acc * s + coef)
    }

    /// Value together with the first derivative.
    pub fn eval_with_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        let mut p = cr(0.0);
        let mut dp = cr(0.0);
        for &coef in &self.coeffs {
            dp = dp * s + p;
            p = p * s + coef;
        }
        (p, dp)
    }

    /// `sum |coeff_k| |s|^k`, the scale of the rounding error in [`Self::eval`].
    pub fn abs_eval(&self, s: Complex64) -> f64 {
        let r = s.norm();
        self.coeffs.iter().fold(0.0, |acc, z| acc * r + z.norm())
    }

    pub fn derivative(&self) -> Self {
        let d = self.degree();
        if d == 0 {
            return Self::zero();
        }
        Self::new(
            self.coeffs[..d]
                .iter()
                .enumerate()
                .map(|(i, &z)| z * (d - i) as f64)
                .collect(),
        )
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&z| z * k).collect())
    }

    /// Coefficient-wise conjugate.
    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(|z| z.conj()).collect())
    }

    /// Coefficients with imaginary parts dropped.
    pub fn real_part(&self) -> Self {
        Self::new(self.coeffs.iter().map(|z| cr(z.re)).collect())
    }

    /// Polynomial `q(w) = p(j w)`.
    pub fn on_imaginary_axis(&self) -> Self {
        let d = self.degree();
        let jpow = [cr(1.0), c(0.0, 1.0), cr(-1.0), c(0.0, -1.0)];
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &z)| z * jpow[(d - i) % 4])
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn add(&self, other: &Self) -> Self {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (&self.coeffs, &other.coeffs)
        } else {
            (&other.coeffs, &self.coeffs)
        };
        let offset = long.len() - short.len();
        let mut out = long.clone();
        let mut cancelled = vec![false; out.len()];
        for (i, &z) in short.iter().enumerate() {
            let a = out[i + offset];
            let sum = a + z;
            // a coefficient that vanished through cancellation is exactly zero
            cancelled[i + offset] = sum.norm() <= TOL_COEFF * a.norm().max(z.norm());
            out[i + offset] = sum;
        }
        let lead = cancelled
            .iter()
            .zip(&out)
            .position(|(&gone, z)| !gone && z.norm() > 0.0);
        match lead {
            Some(i) => ComplexPoly {
                coeffs: out[i..].to_vec(),
            },
            None => Self::zero(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(cr(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![cr(0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// All `degree` roots with multiplicity.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.degree() == 0 {
            return Err(RirError::NoRoots);
        }
        // exact zero roots come off first
        let trailing = self
            .coeffs
            .iter()
            .rev()
            .take_while(|z| **z == cr(0.0))
            .count();
        let core = ComplexPoly {
            coeffs: self.coeffs[..self.coeffs.len() - trailing].to_vec(),
        };
        let mut roots = vec![cr(0.0); trailing];
        match core.degree() {
            0 => {}
            1 => roots.push(-core.coeffs[1] / core.coeffs[0]),
            2 => roots.extend(quadratic_roots(&core.coeffs)),
            _ => {
                let mut found = aberth(&core);
                for z in found.iter_mut() {
                    *z = newton_polish(&core, *z);
                }
                roots.extend(found);
            }
        }
        self.check_residuals(&roots)?;
        Ok(roots)
    }

    /// Eigenvalues of the (scaled) companion matrix; independent of
    /// [`Self::roots`].
    pub fn roots_companion(&self) -> Result<Vec<Complex64>> {
        let d = self.degree();
        if d == 0 {
            return Err(RirError::NoRoots);
        }
        let lead = self.coeffs[0];
        let tail = self.coeffs[d];
        // s = sigma * t keeps the companion entries near unit size
        let sigma = if tail.norm() > 0.0 {
            (tail.norm() / lead.norm()).powf(1.0 / d as f64)
        } else {
            1.0
        };
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for j in 0..d {
            let k = j + 1;
            m[(0, j)] = -self.coeffs[k] / (lead * sigma.powi(k as i32));
        }
        for i in 1..d {
            m[(i, i - 1)] = cr(1.0);
        }
        let eig = m
            .schur()
            .eigenvalues()
            .ok_or(RirError::RootResidual { ratio: f64::NAN })?;
        let roots: Vec<Complex64> = eig.iter().map(|&t| t * sigma).collect();
        self.check_residuals(&roots)?;
        Ok(roots)
    }

    fn check_residuals(&self, roots: &[Complex64]) -> Result<()> {
        let scale = self.max_abs_coeff();
        let d = self.degree() as i32;
        let mut worst: f64 = 0.0;
        for &r in roots {
            let bound = scale * r.norm().max(1.0).powi(d);
            worst = worst.max(self.eval(r).norm() / bound);
        }
        if worst <= TOL_RESIDUAL && worst.is_finite() {
            Ok(())
        } else {
            Err(RirError::RootResidual { ratio: worst })
        }
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: Self) -> ComplexPoly {
        ComplexPoly::add(self, rhs)
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: Self) -> ComplexPoly {
        ComplexPoly::sub(self, rhs)
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: Self) -> ComplexPoly {
        ComplexPoly::mul(self, rhs)
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        ComplexPoly::neg(self)
    }
}

fn quadratic_roots(c: &[Complex64]) -> [Complex64; 2] {
    let (a, b, k) = (c[0], c[1], c[2]);
    let disc = (b * b - a * k * 4.0).sqrt();
    // pick the sign that avoids cancellation in b + sqrt(disc)
    let q = if (b.conj() * disc).re >= 0.0 {
        -(b + disc) * 0.5
    } else {
        -(b - disc) * 0.5
    };
    if q.norm() == 0.0 {
        return [cr(0.0), cr(0.0)];
    }
    [q / a, k / q]
}

fn aberth(p: &ComplexPoly) -> Vec<Complex64> {
    let n = p.degree();
    let lead = p.coeffs[0];
    let center = -p.coeffs[1] / (lead * n as f64);
    let shifted_tail = p.eval(center).norm() / lead.norm();
    let mut radius = shifted_tail.powf(1.0 / n as f64);
    if !radius.is_finite() || radius == 0.0 {
        radius = 1.0;
    }
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            center + Complex64::from_polar(radius, angle)
        })
        .collect();
    let mut done = vec![false; n];
    for _ in 0..ABERTH_MAX_ITER {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (val, der) = p.eval_with_derivative(z[i]);
            if val.norm() <= 4.0 * f64::EPSILON * p.abs_eval(z[i]) {
                done[i] = true;
                continue;
            }
            all_done = false;
            let ratio = val / der;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (cr(1.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // derivative vanished: nudge off the critical point
                z[i] += Complex64::from_polar(radius * 1e-3 + 1e-12, 0.7 + i as f64);
                continue;
            }
            z[i] -= step;
            if step.norm() <= f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
        if all_done {
            break;
        }
    }
    z
}

fn newton_polish(p: &ComplexPoly, z0: Complex64) -> Complex64 {
    let mut z = z0;
    let mut best = p.eval(z).norm();
    for _ in 0..3 {
        let (val, der) = p.eval_with_derivative(z);
        if der.norm() == 0.0 {
            break;
        }
        let next = z - val / der;
        let r = p.eval(next).norm();
        if r < best && next.re.is_finite() && next.im.is_finite() {
            z = next;
            best = r;
        } else {
            break;
        }
    }
    z
}

/// Ratio of two complex polynomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalFn {
    num: ComplexPoly,
    den: ComplexPoly,
}

impl RationalFn {
    /// Builds `num/den`, rejecting a zero denominator and approximate common
    /// roots (closer than [`TOL_CANCEL`], relative to `max(1,|root|)`).
    pub fn new(num: ComplexPoly, den: ComplexPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(RirError::ZeroDenominator);
        }
        if num.degree() >= 1 && den.degree() >= 1 {
            let zeros = num.roots()?;
            let poles = den.roots()?;
            for &p in &poles {
                for &z in &zeros {
                    if (z - p).norm() <= TOL_CANCEL * p.norm().max(1.0) {
                        return Err(RirError::Cancellation { at: p });
                    }
                }
            }
        }
        Ok(RationalFn { num, den })
    }

    pub fn from_real(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(ComplexPoly::from_real(num), ComplexPoly::from_real(den))
    }

    pub fn constant(value: Complex64) -> Self {
        RationalFn {
            num: ComplexPoly::constant(value),
            den: ComplexPoly::one(),
        }
    }

    pub fn num(&self) -> &ComplexPoly {
        &self.num
    }

    pub fn den(&self) -> &ComplexPoly {
        &self.den
    }

    pub fn is_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() <= self.den.degree()
    }

    pub fn is_real(&self) -> bool {
        self.num.is_real() && self.den.is_real()
    }

    /// `num(s)/den(s)`; errors when `s` is (numerically) a pole.
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let d = self.den.eval(s);
        if d.norm() <= 8.0 * f64::EPSILON * self.den.abs_eval(s) {
            return Err(RirError::Pole { at: s });
        }
        Ok(self.num.eval(s) / d)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        RationalFn {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    /// `den/num`, or an error for the zero function.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(RirError::ZeroDenominator);
        }
        Ok(RationalFn {
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn eval_examples() {
        let p = ComplexPoly::from_real(&[1.0, 0.0, 1.0]);
        assert!(p.eval(c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(ComplexPoly::one().eval(c(5.0, 2.0)), cr(1.0));
        let q = ComplexPoly::from_real(&[1.0, 3.0, 3.0, 9.0]);
        assert!(q.eval(cr(-3.0)).norm() < 1e-12);
    }

    #[test]
    fn arithmetic_examples() {
        let a = ComplexPoly::from_real(&[1.0, 1.0]);
        let b = ComplexPoly::from_real(&[1.0, -1.0]);
        assert_eq!(a.mul(&b), ComplexPoly::from_real(&[1.0, 0.0, -1.0]));
        assert_eq!(a.pow(3), ComplexPoly::from_real(&[1.0, 3.0, 3.0, 1.0]));
        let sum = a.add(&ComplexPoly::from_real(&[-1.0, 2.0]));
        assert_eq!(sum, ComplexPoly::from_real(&[3.0]));
        assert_eq!(sum.degree(), 0);
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.pow(0), ComplexPoly::one());
    }

    #[test]
    fn root_examples() {
        let r = sorted(ComplexPoly::from_real(&[1.0, 0.0, 1.0]).roots().unwrap());
        assert_abs_diff_eq!(r[0].im, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r[1].im, 1.0, epsilon = 1e-14);

        let r = ComplexPoly::from_real(&[1.0, 3.0, 3.0, 9.0])
            .roots()
            .unwrap();
        let s3 = 3f64.sqrt();
        for want in [cr(-3.0), c(0.0, -s3), c(0.0, s3)] {
            assert!(
                r.iter().any(|got| (got - want).norm() < 1e-12),
                "{want} missing from {r:?}"
            );
        }

        let lin = ComplexPoly::new(vec![cr(1.0), c(-2.0, -3.0)]);
        assert_eq!(lin.roots().unwrap(), vec![c(2.0, 3.0)]);
    }

    #[test]
    fn constant_has_no_roots() {
        assert_eq!(ComplexPoly::one().roots(), Err(RirError::NoRoots));
        assert_eq!(ComplexPoly::zero().roots(), Err(RirError::NoRoots));
    }

    #[test]
    fn zero_roots_and_companion_agree() {
        let p = ComplexPoly::from_roots(&[cr(0.0), cr(0.0), c(1.0, 2.0), cr(-4.0), c(0.5, -0.5)]);
        let a = sorted(p.roots().unwrap());
        let b = sorted(p.roots_companion().unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-6, "{x} vs {y}");
        }
    }

    #[test]
    fn wide_dynamic_range_keeps_leading_term() {
        // (s^2+4s+3)^21 + 15^21: leading 1 next to a 1e24 constant
        let den = ComplexPoly::from_real(&[1.0, 4.0, 3.0]);
        let p = den.pow(21).add(&ComplexPoly::constant(cr(15f64.powi(21))));
        assert_eq!(p.degree(), 42);
        let roots = p.roots().unwrap();
        assert_eq!(roots.len(), 42);
        // every root solves s^2 + 4s + 3 = 15 e^{j(2k-1)pi/21}; the expanded
        // form is ill-conditioned (numpy.roots only reaches 6e-4 here)
        for r in roots {
            let w = den.eval(r);
            assert!((w.norm() - 15.0).abs() < 1e-4, "{r}: |den| = {}", w.norm());
        }
    }

    #[test]
    fn rational_eval_and_poles() {
        let h = RationalFn::from_real(&[1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(h.eval(cr(0.0)).unwrap(), cr(1.0));
        assert!(matches!(h.eval(cr(-1.0)), Err(RirError::Pole { .. })));
        let h2 = RationalFn::from_real(&[3.0], &[1.0, 4.0, 3.0]).unwrap();
        assert_abs_diff_eq!(h2.eval(cr(0.0)).unwrap().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rational_rejects_common_roots() {
        let err = RationalFn::from_real(&[1.0, 1.0], &[1.0, 3.0, 2.0]).unwrap_err();
        assert!(matches!(err, RirError::Cancellation { .. }));
        assert_eq!(
            RationalFn::from_real(&[1.0], &[0.0]).unwrap_err(),
            RirError::ZeroDenominator
        );
    }

    #[test]
    fn imaginary_axis_substitution() {
        let p = ComplexPoly::from_real(&[2.0, 3.0, 1.0, 5.0]);
        let q = p.on_imaginary_axis();
        let w = 0.7;
        assert!((p.eval(c(0.0, w)) - q.eval(cr(w))).norm() < 1e-14);
    }
}
