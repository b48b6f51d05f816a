//! Root-location classification and frequency-domain norms of rational
//! functions.
//!
//! The L∞ norm is computed from critical points: with `|g(jω)|² = A(ω)/B(ω)`
//! the extrema are real roots of `A'B − AB'`. Modal subsystems have complex
//! coefficients, so both signs of ω are scanned.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexpoly::{c, ComplexPoly, RationalFn};
use crate::error::{Result, RirError};

/// Default absolute tolerance on the real part of a root for "on the axis".
pub const DEFAULT_TOL_AXIS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    StrictlyUnstable,
    Marginal,
    Stable,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::StrictlyUnstable => "strictly_unstable",
            Classification::Marginal => "marginal",
            Classification::Stable => "stable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub roots: Vec<Complex64>,
    pub classification: Classification,
    /// Roots with real part above `+tol_axis`.
    pub n_crhp: usize,
    /// Roots with `|real part| <= tol_axis`.
    pub n_axis: usize,
    /// Largest real part over all roots.
    pub stability_margin: f64,
}

impl StabilityReport {
    pub fn from_roots(roots: Vec<Complex64>, tol_axis: f64) -> Self {
        let n_crhp = roots.iter().filter(|r| r.re > tol_axis).count();
        let n_axis = roots.iter().filter(|r| r.re.abs() <= tol_axis).count();
        let stability_margin = roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);
        let classification = if n_crhp >= 1 {
            Classification::StrictlyUnstable
        } else if n_axis >= 1 {
            Classification::Marginal
        } else {
            Classification::Stable
        };
        StabilityReport {
            roots,
            classification,
            n_crhp,
            n_axis,
            stability_margin,
        }
    }

    pub fn is_stable(&self) -> bool {
        self.classification == Classification::Stable
    }
}

pub fn classify_stability(p: &ComplexPoly, tol_axis: f64) -> Result<StabilityReport> {
    Ok(StabilityReport::from_roots(p.roots()?, tol_axis))
}

/// True when a polynomial of degree zero (no roots) or all of whose roots lie
/// left of `-tol_axis`.
pub fn is_hurwitz(p: &ComplexPoly, tol_axis: f64) -> Result<bool> {
    if p.degree() == 0 {
        return Ok(!p.is_zero());
    }
    Ok(classify_stability(p, tol_axis)?.is_stable())
}

/// An L∞ norm value; `Infinite` marks a pole on the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LinfNorm {
    Finite(f64),
    Infinite,
}

impl LinfNorm {
    /// `1/‖g‖`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            LinfNorm::Finite(x) if x > 0.0 => 1.0 / x,
            LinfNorm::Finite(_) => f64::INFINITY,
            LinfNorm::Infinite => 0.0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            LinfNorm::Finite(x) => x,
            LinfNorm::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, LinfNorm::Finite(_))
    }
}

/// Peak of `|g(jω)|` together with where it is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakGain {
    pub norm: LinfNorm,
    /// Frequency of the peak; `None` for the `|ω| → ∞` limit or an axis pole.
    pub omega: Option<f64>,
}

pub fn linf_norm(g: &RationalFn) -> Result<LinfNorm> {
    linf_norm_with(g, DEFAULT_TOL_AXIS)
}

pub fn linf_norm_with(g: &RationalFn, tol_axis: f64) -> Result<LinfNorm> {
    Ok(peak_gain(g, tol_axis)?.norm)
}

pub fn peak_gain(g: &RationalFn, tol_axis: f64) -> Result<PeakGain> {
    if !g.is_proper() {
        return Err(RirError::Improper {
            num: g.num().degree(),
            den: g.den().degree(),
        });
    }
    if g.num().is_zero() {
        return Ok(PeakGain {
            norm: LinfNorm::Finite(0.0),
            omega: Some(0.0),
        });
    }
    if g.den().degree() >= 1 {
        let poles = g.den().roots()?;
        if let Some(p) = poles.iter().find(|p| p.re.abs() <= tol_axis) {
            return Ok(PeakGain {
                norm: LinfNorm::Infinite,
                omega: Some(p.im),
            });
        }
    }

    let gain = |w: f64| -> f64 {
        let s = c(0.0, w);
        (g.num().eval(s) / g.den().eval(s)).norm()
    };

    let tail = if g.num().degree() == g.den().degree() {
        (g.num().leading() / g.den().leading()).norm()
    } else {
        0.0
    };
    let mut best_w: Option<f64> = None;
    let mut best = tail;
    let consider = |w: f64, best: &mut f64, best_w: &mut Option<f64>| {
        let v = gain(w);
        if v > *best {
            *best = v;
            *best_w = Some(w);
        }
    };
    consider(0.0, &mut best, &mut best_w);

    let crit = critical_polynomial(g);
    let mut candidates = Vec::new();
    if !crit.is_zero() && crit.degree() >= 1 {
        let roots = crit.roots().or_else(|_| crit.roots_companion())?;
        candidates.extend(roots.iter().map(|r| r.re).filter(|w| w.is_finite()));
    }
    for &w in &candidates {
        consider(w, &mut best, &mut best_w);
    }
    if let Some(w0) = best_w {
        let polished = polish_peak(&crit, w0, &gain);
        consider(polished, &mut best, &mut best_w);
    }
    Ok(PeakGain {
        norm: LinfNorm::Finite(best),
        omega: best_w,
    })
}

/// `A'B − AB'` for `|g(jω)|² = A(ω)/B(ω)`, real coefficients.
fn critical_polynomial(g: &RationalFn) -> ComplexPoly {
    let n = g.num().on_imaginary_axis();
    let d = g.den().on_imaginary_axis();
    let a = n.mul(&n.conj()).real_part();
    let b = d.mul(&d.conj()).real_part();
    let crit = a.derivative().mul(&b).sub(&a.mul(&b.derivative()));

    // Same chain on coefficient magnitudes bounds the rounding in each
    // coefficient; anything below that bound is noise. A stray leading term
    // would otherwise push one root to ~1e18 and wreck the rest.
    let abs =
        |p: &ComplexPoly| ComplexPoly::new(p.coeffs().iter().map(|z| c(z.norm(), 0.0)).collect());
    let (na, da) = (abs(&n), abs(&d));
    let aa = na.mul(&na);
    let ba = da.mul(&da);
    let bound = aa.derivative().mul(&ba).add(&aa.mul(&ba.derivative()));
    let (cc, bc) = (crit.coeffs(), bound.coeffs());
    let off = bc.len().saturating_sub(cc.len());
    ComplexPoly::new(
        cc.iter()
            .enumerate()
            .map(|(i, &z)| {
                let m = bc.get(i + off).map_or(0.0, |b| b.re);
                if z.norm() <= 64.0 * f64::EPSILON * m {
                    c(0.0, 0.0)
                } else {
                    z
                }
            })
            .collect(),
    )
}

fn polish_peak(crit: &ComplexPoly, w0: f64, gain: &impl Fn(f64) -> f64) -> f64 {
    if crit.is_zero() || crit.degree() == 0 {
        return w0;
    }
    let dcrit = crit.derivative();
    let mut w = w0;
    let mut best = gain(w);
    for _ in 0..4 {
        let f = crit.eval(c(w, 0.0)).re;
        let df = dcrit.eval(c(w, 0.0)).re;
        if df == 0.0 || !f.is_finite() {
            break;
        }
        let next = w - f / df;
        let v = gain(next);
        if v.is_finite() && v >= best {
            w = next;
            best = v;
        } else {
            break;
        }
    }
    w
}

/// H∞ norm; defined only for stable `g`.
pub fn hinf_norm(g: &RationalFn) -> Result<f64> {
    hinf_norm_with(g, DEFAULT_TOL_AXIS)
}

pub fn hinf_norm_with(g: &RationalFn, tol_axis: f64) -> Result<f64> {
    if !g.is_proper() {
        return Err(RirError::Improper {
            num: g.num().degree(),
            den: g.den().degree(),
        });
    }
    if !is_hurwitz(g.den(), tol_axis)? {
        return Err(RirError::HinfUndefined);
    }
    Ok(linf_norm_with(g, tol_axis)?.value())
}
