//! Robust instability radius quantities for cyclic networks.
//!
//! Lower bounds come from modal L∞ norms: `rho_p` takes the minimum of
//! `1/‖g_k‖` over every mode, `rho_plus` the maximum over the unstable ones.
//! Upper bounds come from verified stabilizers: a homogeneous first-order
//! all-pass `δ(s) = ±ρ(s−a)/(s+a)` found by bisection, and a constant complex
//! gain estimate for the parametric radius.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexpoly::{cr, ComplexPoly, RationalFn};
use crate::cyclicnet::{
    characteristic_poly, circulant_eigenvalues, homogeneous_modal_factor, modal_set,
    modal_subsystem, nominal_roots, CyclicNetwork, DiagPerturbation, ModalSet, NominalReport,
};
use crate::error::{Result, RirError};
use crate::specnorm::{linf_norm_with, peak_gain, Classification, DEFAULT_TOL_AXIS};

pub const DEFAULT_MARGIN_REQ: f64 = 1e-6;
pub const DEFAULT_RHO_BISECT_TOL: f64 = 1e-4;
pub const DEFAULT_A_GRID_LEN: usize = 200;
/// Phase grid used by the parametric estimate.
pub const RHO_C_PHASES: usize = 720;
/// Relative agreement required between the two first-order values.
const FIRST_ORDER_AGREE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol_axis: f64,
    pub margin_req: f64,
    pub rho_bisect_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_axis: DEFAULT_TOL_AXIS,
            margin_req: DEFAULT_MARGIN_REQ,
            rho_bisect_tol: DEFAULT_RHO_BISECT_TOL,
        }
    }
}

fn inverse_norms(modes: &ModalSet, tol_axis: f64) -> Result<Vec<f64>> {
    // modes k and n+1-k are conjugate and share a norm
    let n = modes.subsystems.len();
    let half = n.div_ceil(2);
    let mut inv = vec![0.0; n];
    for k in 0..half {
        let v = linf_norm_with(&modes.subsystems[k], tol_axis)?.reciprocal();
        inv[k] = v;
        inv[n - 1 - k] = v;
    }
    Ok(inv)
}

/// `min_k 1/‖g_k‖_{L∞}` over all modes.
pub fn rho_p(net: &CyclicNetwork, tol_axis: f64) -> Result<f64> {
    let modes = modal_set(net, tol_axis)?;
    Ok(inverse_norms(&modes, tol_axis)?
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// `max_{k∈U} 1/‖g_k‖_{L∞}` and the unstable index set `U`.
pub fn rho_plus(net: &CyclicNetwork, tol_axis: f64) -> Result<(f64, Vec<usize>)> {
    let modes = modal_set(net, tol_axis)?;
    rho_plus_from(&modes, &inverse_norms(&modes, tol_axis)?)
}

fn rho_plus_from(modes: &ModalSet, inv: &[f64]) -> Result<(f64, Vec<usize>)> {
    if modes.unstable_indices.is_empty() {
        return Err(RirError::NotStrictlyUnstable);
    }
    let value = modes
        .unstable_indices
        .iter()
        .map(|&k| inv[k - 1])
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((value, modes.unstable_indices.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderRir {
    /// `1 − K/(μ cos(π/n))`
    pub closed_form: f64,
    /// `1/‖g_1‖_{L∞}`, computed numerically.
    pub norm_based: f64,
    pub agree: bool,
}

impl FirstOrderRir {
    pub fn closed_form_positive(&self) -> bool {
        self.closed_form > 0.0
    }
}

/// Both first-order values, side by side.
pub fn rho_exact_first_order(gain: f64, tau: f64, mu: f64, n: usize) -> Result<FirstOrderRir> {
    let net = CyclicNetwork::first_order(n, mu, gain, tau)?;
    let nominal = nominal_roots(&net, DEFAULT_TOL_AXIS)?;
    if nominal.stability.classification != Classification::StrictlyUnstable {
        return Err(RirError::NotStrictlyUnstable);
    }
    let theta = PI / n as f64;
    let closed_form = 1.0 - gain / (mu * theta.cos());
    let lambda1 = Complex64::from_polar(mu, theta);
    let g1 = modal_subsystem(net.h(), lambda1)?;
    let norm_based = linf_norm_with(&g1, DEFAULT_TOL_AXIS)?.reciprocal();
    let agree =
        (closed_form - norm_based).abs() <= FIRST_ORDER_AGREE_TOL * closed_form.abs().max(1.0);
    Ok(FirstOrderRir {
        closed_form,
        norm_based,
        agree,
    })
}

/// Homogeneous replacement `δ` with `(1+δ)ⁿ = Π(1+δ_i)`, via the mean of
/// principal logarithms.
pub fn homogenize(deltas: &[Complex64], r: f64) -> Result<Complex64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(RirError::OutsideLemmaHypothesis(format!(
            "radius must lie in (0, 1), got {r}"
        )));
    }
    if deltas.is_empty() {
        return Err(RirError::OutsideLemmaHypothesis(
            "empty perturbation list".into(),
        ));
    }
    if let Some((i, d)) = deltas.iter().enumerate().find(|(_, d)| d.norm() > r) {
        return Err(RirError::OutsideLemmaHypothesis(format!(
            "|delta_{}| = {} exceeds r = {r}",
            i + 1,
            d.norm()
        )));
    }
    let mean: Complex64 =
        deltas.iter().map(|d| (cr(1.0) + d).ln()).sum::<Complex64>() / deltas.len() as f64;
    Ok(mean.exp() - 1.0)
}

/// Whether `t u + (1−t) v` stays in `log(1 + disk(r))`.
pub fn convexity_witness(u: Complex64, v: Complex64, t: f64, r: f64) -> Result<bool> {
    if !(r > 0.0 && r < 1.0) {
        return Err(RirError::OutsideLemmaHypothesis(format!(
            "radius must lie in (0, 1), got {r}"
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(RirError::OutsideLemmaHypothesis(format!(
            "t = {t} outside [0, 1]"
        )));
    }
    let in_set = |z: Complex64| (z.exp() - 1.0).norm() <= r + 1e-12;
    if !in_set(u) || !in_set(v) {
        return Err(RirError::OutsideLemmaHypothesis(
            "witness endpoints must lie in log(1 + disk)".into(),
        ));
    }
    Ok(in_set(u * t + v * (1.0 - t)))
}

/// Homogeneous stabilizer candidate `δ(s) = sign·ρ(s−a)/(s+a)`, or the
/// constant `sign·ρ` when `a` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilizerCandidate {
    pub rho: f64,
    pub a: Option<f64>,
    pub sign: i8,
    pub verified: bool,
    /// Largest real part of the perturbed closed-loop roots.
    pub stability_margin: f64,
}

impl StabilizerCandidate {
    pub fn delta(&self) -> RationalFn {
        shape_delta(self.rho, self.a, self.sign)
    }

    // smaller ρ, then smaller a (constants last), then positive sign
    fn order(&self, other: &Self) -> Ordering {
        self.rho
            .total_cmp(&other.rho)
            .then_with(|| {
                let a = self.a.unwrap_or(f64::INFINITY);
                let b = other.a.unwrap_or(f64::INFINITY);
                a.total_cmp(&b)
            })
            .then_with(|| other.sign.cmp(&self.sign))
    }
}

fn shape_delta(rho: f64, a: Option<f64>, sign: i8) -> RationalFn {
    let k = rho * f64::from(sign);
    match a {
        Some(a) => RationalFn::from_real(&[k, -k * a], &[1.0, a])
            .unwrap_or_else(|_| RationalFn::constant(cr(0.0))),
        None => RationalFn::constant(cr(k)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub rho_bracket: (f64, f64),
    pub a_grid: Vec<f64>,
    pub margin_req: f64,
    pub bisect_tol: f64,
    pub tol_axis: f64,
}

impl SearchConfig {
    /// Bracket `[rho_plus, 1]` (or `[0, 1]` without unstable modes) and the
    /// default all-pass grid.
    pub fn for_network(net: &CyclicNetwork, tol: &Tolerances) -> Result<Self> {
        let low = match rho_plus(net, tol.tol_axis) {
            Ok((v, _)) => v,
            Err(RirError::NotStrictlyUnstable) => 0.0,
            Err(e) => return Err(e),
        };
        Ok(SearchConfig {
            rho_bracket: (low, 1.0),
            a_grid: default_a_grid(net, DEFAULT_A_GRID_LEN, tol.tol_axis)?,
            margin_req: tol.margin_req,
            bisect_tol: tol.rho_bisect_tol,
            tol_axis: tol.tol_axis,
        })
    }
}

/// `len` log-spaced values over `[1e-3, 1e3]`, scaled by the peak frequency
/// of `|g_1(jω)|`.
pub fn default_a_grid(net: &CyclicNetwork, len: usize, tol_axis: f64) -> Result<Vec<f64>> {
    let lambda1 = circulant_eigenvalues(net.n(), net.mu())?[0];
    let g1 = modal_subsystem(net.h(), lambda1)?;
    let wc = peak_gain(&g1, tol_axis)?
        .omega
        .map(f64::abs)
        .filter(|w| *w > 0.0 && w.is_finite())
        .unwrap_or(1.0);
    Ok(log_grid(1e-3 * wc, 1e3 * wc, len))
}

pub fn log_grid(lo: f64, hi: f64, len: usize) -> Vec<f64> {
    match len {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..len)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (len - 1) as f64))
                .collect()
        }
    }
}

/// Largest closed-loop root real part under `δ I`, from the modal factors.
pub fn homogeneous_margin(net: &CyclicNetwork, delta: &RationalFn) -> Result<f64> {
    let lambdas = circulant_eigenvalues(net.n(), net.mu())?;
    let half = net.n().div_ceil(2);
    let mut worst = f64::NEG_INFINITY;
    for &lambda in &lambdas[..half] {
        let factor = homogeneous_modal_factor(net.h(), lambda, delta);
        worst = worst.max(max_real_part(&factor)?);
    }
    Ok(worst)
}

fn max_real_part(p: &ComplexPoly) -> Result<f64> {
    if p.is_zero() {
        return Ok(f64::INFINITY);
    }
    if p.degree() == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(p.roots()?
        .iter()
        .map(|r| r.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Minimal verified `ρ` in the bracket for one shape; `None` if the top of
/// the bracket does not stabilize. The returned `ρ` always verifies.
fn bisect_shape(
    net: &CyclicNetwork,
    (low, high): (f64, f64),
    a: Option<f64>,
    sign: i8,
    cfg: &SearchConfig,
) -> Result<Option<StabilizerCandidate>> {
    let margin_at = |rho: f64| homogeneous_margin(net, &shape_delta(rho, a, sign));
    let make = |rho: f64, m: f64| StabilizerCandidate {
        rho,
        a,
        sign,
        verified: true,
        stability_margin: m,
    };
    let m_low = margin_at(low)?;
    if m_low < -cfg.margin_req {
        return Ok(Some(make(low, m_low)));
    }
    let mut m_high = margin_at(high)?;
    if m_high >= -cfg.margin_req {
        return Ok(None);
    }
    let (mut lo, mut hi) = (low, high);
    while hi - lo > cfg.bisect_tol {
        let mid = 0.5 * (lo + hi);
        let m = margin_at(mid)?;
        if m < -cfg.margin_req {
            hi = mid;
            m_high = m;
        } else {
            lo = mid;
        }
    }
    Ok(Some(make(hi, m_high)))
}

/// Searches homogeneous first-order all-pass and constant stabilizers; the
/// best verified `ρ` upper-bounds the homogeneous and dynamic radii.
pub fn search_stabilizer_allpass(
    net: &CyclicNetwork,
    cfg: &SearchConfig,
) -> Result<Option<StabilizerCandidate>> {
    let (mut low, high) = cfg.rho_bracket;
    if !(low >= 0.0 && low <= high && high.is_finite()) {
        return Err(RirError::InvalidParameter(format!(
            "invalid rho bracket [{low}, {high}]"
        )));
    }
    if cfg.a_grid.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(RirError::InvalidParameter("a_grid must be positive".into()));
    }
    let modes = modal_set(net, cfg.tol_axis)?;
    if !modes.unstable_indices.is_empty() {
        let (floor, _) = rho_plus_from(&modes, &inverse_norms(&modes, cfg.tol_axis)?)?;
        if high < floor {
            return Err(RirError::BracketBelowFloor { low, high, floor });
        }
        low = low.max(floor);
    } else if modes.marginal_indices.is_empty() {
        return Err(RirError::NotStrictlyUnstable);
    }

    let mut shapes: Vec<(Option<f64>, i8)> = Vec::with_capacity(2 * cfg.a_grid.len() + 2);
    for &a in &cfg.a_grid {
        shapes.push((Some(a), 1));
        shapes.push((Some(a), -1));
    }
    shapes.push((None, 1));
    shapes.push((None, -1));

    let found: Vec<StabilizerCandidate> = shapes
        .par_iter()
        .map(|&(a, sign)| bisect_shape(net, (low, high), a, sign, cfg))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(found.into_iter().min_by(|x, y| x.order(y)))
}

/// Re-checks a candidate on the full characteristic polynomial with the
/// companion-matrix root route; returns the largest root real part.
pub fn reverify_candidate(net: &CyclicNetwork, cand: &StabilizerCandidate) -> Result<f64> {
    let delta = DiagPerturbation::homogeneous(cand.delta(), net.n())?;
    let p = characteristic_poly(net, Some(&delta))?;
    Ok(p.roots_companion()?
        .iter()
        .map(|r| r.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoCEstimate {
    /// Smallest verified `|δ|` for a common complex constant `δ`.
    pub homogeneous: f64,
    /// Grid brute force over independent complex channel gains.
    pub brute_force: Option<f64>,
}

fn constant_margin(net: &CyclicNetwork, lambdas: &[Complex64], w: Complex64) -> Result<f64> {
    let (num, den) = (net.h().num(), net.h().den());
    let mut worst = f64::NEG_INFINITY;
    for &lambda in lambdas {
        worst = worst.max(max_real_part(&den.sub(&num.scale(lambda * w)))?);
    }
    Ok(worst)
}

fn rho_c_at_phase(
    net: &CyclicNetwork,
    lambdas: &[Complex64],
    alpha: f64,
    tol: &Tolerances,
) -> Result<Option<f64>> {
    let ok = |rho: f64| -> Result<bool> {
        let w = cr(1.0) + Complex64::from_polar(rho, alpha);
        Ok(constant_margin(net, lambdas, w)? < -tol.margin_req)
    };
    if !ok(1.0)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    if ok(lo)? {
        return Ok(Some(lo));
    }
    while hi - lo > tol.rho_bisect_tol {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Parametric (complex constant) radius estimate. With `per_mode = false` a
/// coarse brute force over independent channel gains runs as well.
pub fn rho_c_estimate(
    net: &CyclicNetwork,
    per_mode: bool,
    tol: &Tolerances,
) -> Result<RhoCEstimate> {
    if !per_mode && net.n() > 5 {
        return Err(RirError::BruteForceLimit(net.n()));
    }
    let modes = modal_set(net, tol.tol_axis)?;
    if modes.unstable_indices.is_empty() && modes.marginal_indices.is_empty() {
        return Err(RirError::NotStrictlyUnstable);
    }
    let lambdas = modes.lambdas;
    let step = 2.0 * PI / RHO_C_PHASES as f64;
    let per_phase: Vec<Option<f64>> = (0..RHO_C_PHASES)
        .into_par_iter()
        .map(|i| rho_c_at_phase(net, &lambdas, i as f64 * step, tol))
        .collect::<Result<_>>()?;
    let (best_i, best) = per_phase
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .ok_or_else(|| RirError::InvalidParameter("no stabilizing complex gain found".into()))?;

    // parabolic (Newton) step over neighbouring phases
    let mut homogeneous = best;
    let prev = per_phase[(best_i + RHO_C_PHASES - 1) % RHO_C_PHASES];
    let next = per_phase[(best_i + 1) % RHO_C_PHASES];
    if let (Some(fm), Some(fp)) = (prev, next) {
        let curv = fp - 2.0 * best + fm;
        if curv > 0.0 {
            let shift = 0.5 * step * (fm - fp) / curv;
            let alpha = best_i as f64 * step + shift.clamp(-step, step);
            if let Some(v) = rho_c_at_phase(net, &lambdas, alpha, tol)? {
                homogeneous = homogeneous.min(v);
            }
        }
    }

    let brute_force = if per_mode {
        None
    } else {
        brute_force_channels(net, tol)?
    };
    Ok(RhoCEstimate {
        homogeneous,
        brute_force,
    })
}

/// Smallest grid magnitude level at which some combination of independent
/// complex channel gains stabilizes the full characteristic polynomial.
fn brute_force_channels(net: &CyclicNetwork, tol: &Tolerances) -> Result<Option<f64>> {
    let n = net.n();
    let (levels, phases) = if n <= 3 { (10usize, 12usize) } else { (3, 5) };
    let per_channel = levels * phases;
    let gain_at = |idx: usize| -> (usize, Complex64) {
        let level = idx / phases;
        let mag = (level + 1) as f64 / levels as f64;
        let ang = 2.0 * PI * (idx % phases) as f64 / phases as f64;
        (level, Complex64::from_polar(mag, ang))
    };
    let den_pow = net.h().den().pow(n as u32);
    let num_pow = net
        .h()
        .num()
        .pow(n as u32)
        .scale(cr(net.mu().powi(n as i32)));
    let feasible = |combo: &[usize]| -> Result<bool> {
        let prod: Complex64 = combo.iter().map(|&i| cr(1.0) + gain_at(i).1).product();
        let p = den_pow.add(&num_pow.scale(prod));
        Ok(max_real_part(&p)? < -tol.margin_req)
    };
    for level in 0..levels {
        // combinations whose largest level is exactly `level`
        let hit = (0..per_channel)
            .into_par_iter()
            .map(|first| -> Result<bool> {
                let mut combo = vec![first; n];
                let total = per_channel.pow((n - 1) as u32);
                for rest in 0..total {
                    let mut r = rest;
                    for slot in combo.iter_mut().skip(1) {
                        *slot = r % per_channel;
                        r /= per_channel;
                    }
                    let top = combo.iter().map(|&i| gain_at(i).0).max().unwrap_or(0);
                    if top != level {
                        continue;
                    }
                    if feasible(&combo)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            })
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .any(|b| b);
        if hit {
            return Ok(Some((level + 1) as f64 / levels as f64));
        }
    }
    Ok(None)
}

/// Everything computed for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct RirReport {
    pub nominal: NominalReport,
    pub rho_p: f64,
    pub rho_plus: Option<f64>,
    pub unstable_indices: Vec<usize>,
    pub marginal_indices: Vec<usize>,
    pub first_order: Option<FirstOrderRir>,
    pub stabilizer: Option<StabilizerCandidate>,
    pub rho_upper_homogeneous: Option<f64>,
    pub rho_c_estimate: Option<f64>,
    pub consistency_flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub tolerances: Tolerances,
    pub search_stabilizer: bool,
    pub estimate_rho_c: bool,
    pub a_grid_len: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            tolerances: Tolerances::default(),
            search_stabilizer: true,
            estimate_rho_c: true,
            a_grid_len: DEFAULT_A_GRID_LEN,
        }
    }
}

pub fn analyze(net: &CyclicNetwork, opts: &AnalysisOptions) -> Result<RirReport> {
    let tol = &opts.tolerances;
    let nominal = nominal_roots(net, tol.tol_axis)?;
    let modes = modal_set(net, tol.tol_axis)?;
    let inv = inverse_norms(&modes, tol.tol_axis)?;
    let rho_p = inv.iter().copied().fold(f64::INFINITY, f64::min);
    let mut flags = Vec::new();

    let rho_plus = match rho_plus_from(&modes, &inv) {
        Ok((v, _)) => Some(v),
        Err(RirError::NotStrictlyUnstable) => {
            flags.push(format!(
                "not_strictly_unstable: {}",
                RirError::NotStrictlyUnstable
            ));
            None
        }
        Err(e) => return Err(e),
    };
    if !modes.marginal_indices.is_empty() {
        flags.push(format!(
            "marginal_modes: modes {:?} have imaginary-axis poles and are excluded from U",
            modes.marginal_indices
        ));
    }
    let nominal_unstable = nominal.stability.classification == Classification::StrictlyUnstable;
    if nominal_unstable != rho_plus.is_some() {
        flags.push(format!(
            "modal_nominal_mismatch: nominal classification {} but U = {:?}",
            nominal.stability.classification.as_str(),
            modes.unstable_indices
        ));
    }
    if let Some(dev) = nominal.analytic_deviation.filter(|d| *d > 1e-6) {
        flags.push(format!(
            "nominal_root_deviation: computed roots deviate from (K mu e^(j theta_k) - 1)/tau by {dev:.3e}"
        ));
    }

    let mut first_order = None;
    if let Some((gain, tau)) = net.first_order_params() {
        let cos_n = (PI / net.n() as f64).cos();
        let stated = gain < net.mu() * cos_n;
        let by_roots = gain * net.mu() * cos_n > 1.0;
        if stated != by_roots || by_roots != nominal_unstable {
            flags.push(format!(
                "instability_predicate_mismatch: K < mu cos(pi/n) is {stated}, K mu cos(pi/n) > 1 is {by_roots}, roots say {}",
                nominal.stability.classification.as_str()
            ));
        }
        if nominal_unstable {
            let fo = rho_exact_first_order(gain, tau, net.mu(), net.n())?;
            if !fo.agree {
                flags.push(format!(
                    "closed_form_mismatch: 1 - K/(mu cos(pi/n)) = {:.10} but 1/||g_1||_Linf = {:.10}",
                    fo.closed_form, fo.norm_based
                ));
            }
            if !fo.closed_form_positive() {
                flags.push(format!("closed_form_nonpositive: {:.10}", fo.closed_form));
            }
            first_order = Some(fo);
        }
    }

    let mut stabilizer = None;
    if opts.search_stabilizer && rho_plus.is_some() {
        let mut cfg = SearchConfig::for_network(net, tol)?;
        cfg.a_grid = default_a_grid(net, opts.a_grid_len, tol.tol_axis)?;
        stabilizer = search_stabilizer_allpass(net, &cfg)?;
        match (&stabilizer, rho_plus) {
            (Some(s), Some(floor)) => flags.push(stabilizer_position(s, floor, first_order.as_ref())),
            (None, _) => flags.push(
                "no_verified_stabilizer: no first-order all-pass or constant stabilizer in [rho_plus, 1]".into(),
            ),
            _ => {}
        }
    }

    let rho_c = if opts.estimate_rho_c && rho_plus.is_some() {
        Some(rho_c_estimate(net, true, tol)?.homogeneous)
    } else {
        None
    };

    Ok(RirReport {
        nominal,
        rho_p,
        rho_plus,
        unstable_indices: modes.unstable_indices,
        marginal_indices: modes.marginal_indices,
        first_order,
        rho_upper_homogeneous: stabilizer.map(|s| s.rho),
        stabilizer,
        rho_c_estimate: rho_c,
        consistency_flags: flags,
    })
}

fn stabilizer_position(s: &StabilizerCandidate, floor: f64, fo: Option<&FirstOrderRir>) -> String {
    let shape = match s.a {
        Some(a) => format!(
            "delta(s) = {:+} * {:.10} * (s - {a:.10})/(s + {a:.10})",
            s.sign, s.rho
        ),
        None => format!("delta(s) = {:+} * {:.10}", s.sign, s.rho),
    };
    let rel = |name: &str, v: f64| {
        let side = if s.rho >= v { "above" } else { "below" };
        format!("{side} {name} {v:.10} by {:.3e}", (s.rho - v).abs())
    };
    let mut parts = vec![rel("rho_plus", floor)];
    if let Some(fo) = fo {
        parts.push(rel("norm_based_first_order", fo.norm_based));
        parts.push(rel("closed_form_first_order", fo.closed_form));
    }
    format!(
        "stabilizer_position: rho_hat = {:.10} is {}; {shape}",
        s.rho,
        parts.join(", ")
    )
}
