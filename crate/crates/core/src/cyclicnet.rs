//! Cyclic networks of identical agents with per-link gain `-μ`.
//!
//! The interconnection matrix has `-μ` on the subdiagonal and in the top-right
//! corner. For odd `n` its eigenvalues are `μ e^{j(2k-1)π/n}`, so the closed
//! loop splits into scalar modal loops `g_k = λ_k h / (1 - λ_k h)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexpoly::{cr, ComplexPoly, RationalFn};
use crate::error::{Result, RirError};
use crate::specnorm::{
    classify_stability, hinf_norm, is_hurwitz, Classification, StabilityReport, DEFAULT_TOL_AXIS,
};

/// `n` identical agents `h` in a negative-feedback ring of strength `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclicNetwork {
    n: usize,
    mu: f64,
    h: RationalFn,
}

impl CyclicNetwork {
    pub fn new(n: usize, mu: f64, h: RationalFn) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(RirError::InvalidAgentCount(n));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(RirError::InvalidParameter(format!(
                "mu must be positive and finite (got {mu})"
            )));
        }
        if !h.is_real() {
            return Err(RirError::NotReal { what: "agent h(s)" });
        }
        if !h.is_proper() {
            return Err(RirError::Improper {
                num: h.num().degree(),
                den: h.den().degree(),
            });
        }
        if !is_hurwitz(h.den(), DEFAULT_TOL_AXIS)? {
            return Err(RirError::NotStable { what: "agent h(s)" });
        }
        Ok(CyclicNetwork { n, mu, h })
    }

    /// Network with first-order agents `K/(τs+1)`.
    pub fn first_order(n: usize, mu: f64, gain: f64, tau: f64) -> Result<Self> {
        if !(gain > 0.0 && tau > 0.0) {
            return Err(RirError::InvalidParameter(format!(
                "K and tau must be positive (got K={gain}, tau={tau})"
            )));
        }
        Self::new(n, mu, RationalFn::from_real(&[gain], &[tau, 1.0])?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn h(&self) -> &RationalFn {
        &self.h
    }

    /// `(K, τ)` when `h = K/(τs+1)` with `K, τ > 0`.
    pub fn first_order_params(&self) -> Option<(f64, f64)> {
        let (num, den) = (self.h.num(), self.h.den());
        if num.degree() != 0 || den.degree() != 1 || num.is_zero() {
            return None;
        }
        let b = num.coeffs()[0].re;
        let (d1, d0) = (den.coeffs()[0].re, den.coeffs()[1].re);
        if d0 == 0.0 {
            return None;
        }
        let (gain, tau) = (b / d0, d1 / d0);
        (gain > 0.0 && tau > 0.0).then_some((gain, tau))
    }
}

/// Cyclic interconnection matrix: `-μ` below the diagonal and top-right.
pub fn build_interconnection(net: &CyclicNetwork) -> DMatrix<f64> {
    let n = net.n();
    let mut a = DMatrix::zeros(n, n);
    a[(0, n - 1)] = -net.mu();
    for i in 1..n {
        a[(i, i - 1)] = -net.mu();
    }
    a
}

/// `μ e^{j(2k-1)π/n}` for `k = 1..n`.
pub fn circulant_eigenvalues(n: usize, mu: f64) -> Result<Vec<Complex64>> {
    if n.is_multiple_of(2) {
        return Err(RirError::InvalidAgentCount(n));
    }
    Ok((1..=n)
        .map(|k| Complex64::from_polar(mu, (2 * k - 1) as f64 * PI / n as f64))
        .collect())
}

/// `g = λ h / (1 - λ h)` as `λ num / (den - λ num)`.
pub fn modal_subsystem(h: &RationalFn, lambda: Complex64) -> Result<RationalFn> {
    let num = h.num().scale(lambda);
    let den = h.den().sub(&num);
    if den.is_zero() {
        return Err(RirError::UnreliableModal(
            "1 - lambda*h vanishes identically".into(),
        ));
    }
    RationalFn::new(num, den).map_err(|e| match e {
        RirError::Cancellation { at } => {
            RirError::UnreliableModal(format!("pole-zero cancellation near {}{:+}j", at.re, at.im))
        }
        other => other,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalSet {
    pub lambdas: Vec<Complex64>,
    pub subsystems: Vec<RationalFn>,
    pub classifications: Vec<Classification>,
    /// 1-based indices of modes with an open right-half-plane pole.
    pub unstable_indices: Vec<usize>,
    /// 1-based indices of modes with axis poles and none in the open RHP.
    pub marginal_indices: Vec<usize>,
}

pub fn modal_set(net: &CyclicNetwork, tol_axis: f64) -> Result<ModalSet> {
    let lambdas = circulant_eigenvalues(net.n(), net.mu())?;
    let mut subsystems = Vec::with_capacity(lambdas.len());
    let mut classifications = Vec::with_capacity(lambdas.len());
    let mut unstable_indices = Vec::new();
    let mut marginal_indices = Vec::new();
    for (i, &lambda) in lambdas.iter().enumerate() {
        let g = modal_subsystem(net.h(), lambda)?;
        let class = if g.den().degree() == 0 {
            Classification::Stable
        } else {
            classify_stability(g.den(), tol_axis)?.classification
        };
        match class {
            Classification::StrictlyUnstable => unstable_indices.push(i + 1),
            Classification::Marginal => marginal_indices.push(i + 1),
            Classification::Stable => {}
        }
        subsystems.push(g);
        classifications.push(class);
    }
    Ok(ModalSet {
        lambdas,
        subsystems,
        classifications,
        unstable_indices,
        marginal_indices,
    })
}

/// Diagonal perturbation `diag(δ_1, …, δ_n)` of stable real rational entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagPerturbation {
    deltas: Vec<RationalFn>,
    norms: Vec<f64>,
}

impl DiagPerturbation {
    pub fn new(deltas: Vec<RationalFn>) -> Result<Self> {
        let mut norms = Vec::with_capacity(deltas.len());
        for (i, d) in deltas.iter().enumerate() {
            if !d.is_real() {
                return Err(RirError::NotReal {
                    what: "perturbation",
                });
            }
            let norm = hinf_norm(d).map_err(|e| match e {
                RirError::HinfUndefined => RirError::PerturbationNotStable { index: i + 1 },
                other => other,
            })?;
            norms.push(norm);
        }
        Ok(DiagPerturbation { deltas, norms })
    }

    /// `δ I` with `n` copies.
    pub fn homogeneous(delta: RationalFn, n: usize) -> Result<Self> {
        Self::new(vec![delta; n])
    }

    pub fn deltas(&self) -> &[RationalFn] {
        &self.deltas
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// `‖Δ‖_{H∞} = max_i ‖δ_i‖_{H∞}`.
    pub fn norm(&self) -> f64 {
        self.norms.iter().copied().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }
}

/// Numerator of `1 + μⁿ h(s)ⁿ Π(1+δ_i(s))` over its common denominator:
/// `den_hⁿ Π den_i + μⁿ num_hⁿ Π(den_i + num_i)`.
pub fn characteristic_poly(
    net: &CyclicNetwork,
    delta: Option<&DiagPerturbation>,
) -> Result<ComplexPoly> {
    let n = net.n();
    let (num_h, den_h) = (net.h().num(), net.h().den());
    let mut den_prod = ComplexPoly::one();
    let mut pert_prod = ComplexPoly::one();
    if let Some(d) = delta {
        if d.len() != n {
            return Err(RirError::LengthMismatch {
                expected: n,
                got: d.len(),
            });
        }
        for di in d.deltas() {
            den_prod = den_prod.mul(di.den());
            pert_prod = pert_prod.mul(&di.den().add(di.num()));
        }
    }
    let gain = cr(net.mu().powi(n as i32));
    let p = den_h
        .pow(n as u32)
        .mul(&den_prod)
        .add(&num_h.pow(n as u32).mul(&pert_prod).scale(gain));

    // a closed-loop root sitting on a denominator root would be hidden from
    // 1 + L; only an unstable one makes the polynomial indeterminate
    let mut denominators = vec![den_h.clone()];
    if let Some(d) = delta {
        denominators.extend(d.deltas().iter().map(|x| x.den().clone()));
    }
    for q in denominators.iter().filter(|q| q.degree() >= 1) {
        for r in q.roots()? {
            let vanishes = p.eval(r).norm() <= 1e3 * f64::EPSILON * p.abs_eval(r);
            if vanishes && r.re >= -DEFAULT_TOL_AXIS {
                return Err(RirError::IndeterminateCharPoly { at: r });
            }
        }
    }
    Ok(p)
}

/// Modal factor `den_h den_δ − λ num_h (den_δ + num_δ)` of the homogeneous
/// closed loop; its roots are those of `1 − δ g_λ`.
pub fn homogeneous_modal_factor(
    h: &RationalFn,
    lambda: Complex64,
    delta: &RationalFn,
) -> ComplexPoly {
    h.den()
        .mul(delta.den())
        .sub(&h.num().mul(&delta.den().add(delta.num())).scale(lambda))
}

/// Nominal closed-loop roots, taken from the modal factors `den_h − λ_k num_h`.
///
/// `expanded_deviation` is the largest distance from a root of the expanded
/// characteristic polynomial to the modal root set; `analytic_deviation` the
/// same against `(Kμ e^{jθ_k} − 1)/τ` for first-order agents.
#[derive(Debug, Clone, PartialEq)]
pub struct NominalReport {
    pub stability: StabilityReport,
    pub expanded_deviation: f64,
    pub analytic_deviation: Option<f64>,
}

fn max_distance(from: &[Complex64], to: &[Complex64]) -> f64 {
    from.iter()
        .map(|r| {
            to.iter()
                .map(|e| (r - e).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

pub fn nominal_roots(net: &CyclicNetwork, tol_axis: f64) -> Result<NominalReport> {
    let (num, den) = (net.h().num(), net.h().den());
    let lambdas = circulant_eigenvalues(net.n(), net.mu())?;
    let mut roots = Vec::with_capacity(net.n() * den.degree());
    for &lambda in &lambdas {
        let factor = den.sub(&num.scale(lambda));
        if factor.degree() >= 1 {
            roots.extend(factor.roots()?);
        }
    }
    let expanded = characteristic_poly(net, None)?.roots()?;
    let expanded_deviation = max_distance(&expanded, &roots);
    let analytic_deviation = net.first_order_params().map(|(gain, tau)| {
        let expected: Vec<Complex64> = lambdas.iter().map(|&l| (l * gain - 1.0) / tau).collect();
        max_distance(&roots, &expected)
    });
    Ok(NominalReport {
        stability: StabilityReport::from_roots(roots, tol_axis),
        expanded_deviation,
        analytic_deviation,
    })
}
