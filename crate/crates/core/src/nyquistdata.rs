//! Frequency-response data for inverse Nyquist plots: `φ(jω) = 1/h(jω)`, the
//! value-set band `{φ(jω)/(1+δ) : |δ| ≤ ρ}` and the interconnection
//! eigenvalue markers.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexpoly::{c, cr, ComplexPoly, RationalFn};
use crate::cyclicnet::{circulant_eigenvalues, modal_subsystem};
use crate::error::{Result, RirError};
use crate::rirbounds::log_grid;
use crate::specnorm::{linf_norm_with, DEFAULT_TOL_AXIS};

pub const DEFAULT_GRID_POINTS: usize = 2001;
pub const DEFAULT_ALPHAS: usize = 256;

/// Strictly increasing, finite frequencies in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    omegas: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(omegas: Vec<f64>) -> Result<Self> {
        if omegas.iter().any(|w| !w.is_finite()) {
            return Err(RirError::InvalidParameter(
                "frequency grid has non-finite entries".into(),
            ));
        }
        if omegas.windows(2).any(|p| p[1] <= p[0]) {
            return Err(RirError::InvalidParameter(
                "frequency grid must be strictly increasing".into(),
            ));
        }
        Ok(FrequencyGrid { omegas })
    }

    /// `points` log-spaced frequencies over `[lo, hi]`, optionally led by 0.
    pub fn log_spaced(lo: f64, hi: f64, points: usize, include_zero: bool) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) {
            return Err(RirError::InvalidParameter(format!(
                "bad grid range [{lo}, {hi}]"
            )));
        }
        let mut omegas = Vec::with_capacity(points + 1);
        if include_zero {
            omegas.push(0.0);
        }
        omegas.extend(log_grid(lo, hi, points));
        Self::new(omegas)
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self::log_spaced(1e-3, 1e3, DEFAULT_GRID_POINTS, true).expect("static grid")
    }
}

fn axis_zero_check(h: &RationalFn) -> Result<()> {
    if h.num().is_zero() {
        return Err(RirError::AxisZero { omega: 0.0 });
    }
    if h.num().degree() >= 1 {
        if let Some(z) = h
            .num()
            .roots()?
            .iter()
            .find(|z| z.re.abs() <= DEFAULT_TOL_AXIS)
        {
            return Err(RirError::AxisZero { omega: z.im });
        }
    }
    Ok(())
}

/// `(ω, φ(jω))` along the grid.
pub fn inverse_nyquist_curve(
    h: &RationalFn,
    grid: &FrequencyGrid,
) -> Result<Vec<(f64, Complex64)>> {
    axis_zero_check(h)?;
    let phi = h.reciprocal()?;
    grid.omegas()
        .iter()
        .map(|&w| {
            phi.eval(c(0.0, w))
                .map(|v| (w, v))
                .map_err(|_| RirError::AxisZero { omega: w })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSlice {
    pub omega: f64,
    pub center: Complex64,
    /// `φ(jω)/(1 + ρ e^{jα})` for each α.
    pub boundary: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueSetBand {
    pub rho: f64,
    pub alphas: Vec<f64>,
    pub slices: Vec<BandSlice>,
}

pub fn value_set_band(
    h: &RationalFn,
    rho: f64,
    grid: &FrequencyGrid,
    alphas: usize,
) -> Result<ValueSetBand> {
    if !(0.0..1.0).contains(&rho) {
        return Err(RirError::InvalidParameter(format!(
            "value-set radius must lie in [0, 1), got {rho}"
        )));
    }
    if alphas == 0 {
        return Err(RirError::InvalidParameter("alphas must be positive".into()));
    }
    let angles: Vec<f64> = (0..alphas)
        .map(|i| 2.0 * PI * i as f64 / alphas as f64)
        .collect();
    let scales: Vec<Complex64> = angles
        .iter()
        .map(|&a| (cr(1.0) + Complex64::from_polar(rho, a)).inv())
        .collect();
    let slices = inverse_nyquist_curve(h, grid)?
        .into_iter()
        .map(|(omega, center)| BandSlice {
            omega,
            center,
            boundary: scales.iter().map(|s| center * s).collect(),
        })
        .collect();
    Ok(ValueSetBand {
        rho,
        alphas: angles,
        slices,
    })
}

/// Interconnection eigenvalues `λ_k`.
pub fn eigen_markers(n: usize, mu: f64) -> Result<Vec<Complex64>> {
    circulant_eigenvalues(n, mu)
}

/// Whether `|φ(jω)|` is nondecreasing along the samples (1e-12 slack per step).
pub fn monotone_gain_check(phi_samples: &[(f64, Complex64)]) -> bool {
    phi_samples
        .windows(2)
        .all(|p| p[1].1.norm() >= p[0].1.norm() - 1e-12)
}

/// `inf_ω |φ(jω)/λ − 1|`: the smallest ρ whose value set reaches `λ`, equal to
/// `1/‖λh/(1−λh)‖_{L∞}`.
pub fn value_set_distance(h: &RationalFn, lambda: Complex64) -> Result<f64> {
    let g = modal_subsystem(h, lambda)?;
    Ok(linf_norm_with(&g, DEFAULT_TOL_AXIS)?.reciprocal())
}

/// Positive frequencies where `|φ(jω)| = μ`, i.e. where the inverse Nyquist
/// curve crosses the eigenvalue circle.
pub fn gain_crossing_frequencies(h: &RationalFn, mu: f64) -> Result<Vec<f64>> {
    let n = h.num().on_imaginary_axis();
    let d = h.den().on_imaginary_axis();
    let a = n.mul(&n.conj()).real_part();
    let b = d.mul(&d.conj()).real_part();
    let f: ComplexPoly = b.sub(&a.scale(cr(mu * mu)));
    if f.degree() == 0 {
        return Ok(vec![]);
    }
    let mut out: Vec<f64> = f
        .roots()?
        .into_iter()
        .filter(|r| r.im.abs() <= 1e-7 * r.norm().max(1.0) && r.re > 0.0)
        .map(|r| r.re)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * y.abs().max(1.0));
    Ok(out)
}
