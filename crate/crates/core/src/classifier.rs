//! Power-law fits near the origin and at infinity, and the regime table they
//! are checked against:
//!
//! | regime     | condition    | `u ~`                                     |
//! |------------|--------------|-------------------------------------------|
//! | nu         | `q < q*`     | `r^{-nu}`                                 |
//! | absorption | `q > q*`     | `r^{-2/(q-1)}`                            |
//! | critical   | `q = q*`     | `(alpha nu/2)^{nu/2} r^{-nu} |log r|^{-nu/2}` |
//! | far field  | entire       | `r^{-nu'}` (`v ~ r^{-alpha}`)             |

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::constants::{q_star, Hardy, ProblemParams};
use crate::error::{domain, Error, Result};
use crate::radial_ode::{v_to_u, Meaning, RadialProfile};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    /// `m` in `u ~ A r^{-m}`.
    pub exponent: f64,
    pub amplitude: f64,
    pub window: (f64, f64),
    /// RMS of the residual of `log u`.
    pub rms_residual: f64,
    pub log_corrected: bool,
    /// `k` in `|log r|^{-k}` when log corrected.
    pub log_power: Option<f64>,
    pub nodes: usize,
}

const MIN_FIT_NODES: usize = 4;

fn window_nodes(p: &RadialProfile, window: (f64, f64)) -> Vec<(f64, f64)> {
    p.radii().iter().zip(&p.values).filter(|(r, _)| **r >= window.0 && **r <= window.1).map(|(r, v)| (*r, *v)).collect()
}

fn least_squares(rows: &[Vec<f64>], rhs: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (m, n) = (rows.len(), rows[0].len());
    let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(rhs);
    let x = a.clone().svd(true, true).solve(&b, 1e-14).map_err(|e| domain(format!("least squares failed: {e}")))?;
    let res = &a * &x - &b;
    Ok((x.iter().copied().collect(), (res.norm_squared() / m as f64).sqrt()))
}

/// Regress `log u = log A - m log r [- k log|log r|]` over the nodes in `window`.
pub fn fit_power_law(profile: &RadialProfile, window: (f64, f64), with_log_correction: bool) -> Result<FitResult> {
    let pts = window_nodes(profile, window);
    if pts.len() < MIN_FIT_NODES {
        return Err(Error::DegenerateWindow { nodes: pts.len(), needed: MIN_FIT_NODES });
    }
    if pts.iter().any(|(r, v)| !(*v > 0.0) || !(*r > 0.0)) {
        return Err(domain("power-law fit needs positive radii and values"));
    }
    if with_log_correction && pts.iter().any(|(r, _)| r.ln().abs() < 1e-3) {
        return Err(domain("log-corrected fit needs the window away from r = 1"));
    }
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .map(|(r, _)| {
            let mut row = vec![1.0, -r.ln()];
            if with_log_correction {
                row.push(-r.ln().abs().ln());
            }
            row
        })
        .collect();
    let rhs: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let (x, rms) = least_squares(&rows, &rhs)?;
    Ok(FitResult {
        exponent: x[1],
        amplitude: x[0].exp(),
        window,
        rms_residual: rms,
        log_corrected: with_log_correction,
        log_power: with_log_correction.then(|| x[2]),
        nodes: pts.len(),
    })
}

/// Amplitude of `u = A r^{-m} |log r|^{-k}` with the exponents held fixed:
/// geometric mean of `u r^m |log r|^k` over the window.
pub fn fit_amplitude(profile: &RadialProfile, window: (f64, f64), m: f64, k: f64) -> Result<f64> {
    let pts = window_nodes(profile, window);
    if pts.len() < MIN_FIT_NODES {
        return Err(Error::DegenerateWindow { nodes: pts.len(), needed: MIN_FIT_NODES });
    }
    let s: f64 = pts.iter().map(|(r, v)| v.ln() + m * r.ln() + k * r.ln().abs().ln()).sum();
    Ok((s / pts.len() as f64).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NuRegime,
    AbsorptionRegime,
    CriticalLogRegime,
    FarField,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeVerdict {
    pub regime: Regime,
    pub expected_exponent: f64,
    pub expected_amplitude: Option<f64>,
    pub fitted: FitResult,
    /// Amplitude with the expected exponents held fixed (critical regime).
    pub fixed_exponent_amplitude: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyOptions {
    /// Defaults to the two innermost decades past the first three nodes.
    pub window: Option<(f64, f64)>,
    pub exponent_tol: f64,
    pub amplitude_tol: f64,
    pub log_corrected: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { window: None, exponent_tol: 0.02, amplitude_tol: 0.05, log_corrected: false }
    }
}

pub fn inner_window(p: &RadialProfile) -> (f64, f64) {
    let r = p.radii();
    let lo = r[3.min(r.len() - 1)];
    (lo, (100.0 * lo).min(p.grid.last()))
}

pub fn outer_window(p: &RadialProfile) -> (f64, f64) {
    let hi = p.grid.last();
    (0.1 * hi, hi)
}

fn as_u(h: &Hardy, p: &RadialProfile) -> Result<RadialProfile> {
    match p.meaning {
        Meaning::U => Ok(p.clone()),
        Meaning::V => v_to_u(h, p),
        m => Err(domain(format!("cannot classify a {m:?} profile"))),
    }
}

/// Expected regime for `params` near the origin.
pub fn expected_regime(params: &ProblemParams) -> (Regime, f64) {
    let nu = params.hardy.nu;
    let q = params.q;
    let qs = q_star(nu);
    if (q - qs).abs() <= 1e-9 * qs {
        (Regime::CriticalLogRegime, nu)
    } else if q < qs {
        (Regime::NuRegime, nu)
    } else {
        (Regime::AbsorptionRegime, 2.0 / (q - 1.0))
    }
}

/// Fit `u` (or `v`, converted) near the origin and compare with the table.
pub fn classify(params: &ProblemParams, profile: &RadialProfile, opts: &ClassifyOptions) -> Result<RegimeVerdict> {
    let h = &params.hardy;
    let u = as_u(h, profile)?;
    let window = opts.window.unwrap_or_else(|| inner_window(&u));
    let (regime, expected) = expected_regime(params);
    let rel = |a: f64, b: f64| if b == 0.0 { a.abs() } else { (a - b).abs() / b.abs() };
    if regime == Regime::CriticalLogRegime {
        if !opts.log_corrected {
            return Err(Error::AmbiguousRegime);
        }
        let nu = h.nu;
        let amp = (h.alpha() * nu / 2.0).powf(nu / 2.0);
        let fitted = fit_power_law(&u, window, true)?;
        let fixed = fit_amplitude(&u, window, nu, nu / 2.0)?;
        let pass = rel(fitted.exponent, expected) <= opts.exponent_tol && rel(fixed, amp) <= opts.amplitude_tol;
        return Ok(RegimeVerdict {
            regime,
            expected_exponent: expected,
            expected_amplitude: Some(amp),
            fitted,
            fixed_exponent_amplitude: Some(fixed),
            pass,
        });
    }
    let fitted = fit_power_law(&u, window, opts.log_corrected)?;
    let pass = rel(fitted.exponent, expected) <= opts.exponent_tol;
    Ok(RegimeVerdict {
        regime,
        expected_exponent: expected,
        expected_amplitude: None,
        fitted,
        fixed_exponent_amplitude: None,
        pass,
    })
}

/// Fit the outer decade. The expected exponent is `alpha` for weighted
/// profiles (`v`, `z`) and `nu'` for `u`.
pub fn far_field_decay(
    h: &Hardy,
    profile: &RadialProfile,
    window: Option<(f64, f64)>,
    tol: f64,
) -> Result<RegimeVerdict> {
    let window = window.unwrap_or_else(|| outer_window(profile));
    let expected = if profile.meaning == Meaning::U { h.nu_prime() } else { h.alpha() };
    let fitted = fit_power_law(profile, window, false)?;
    let pass = (fitted.exponent - expected).abs() <= tol * expected;
    Ok(RegimeVerdict {
        regime: Regime::FarField,
        expected_exponent: expected,
        expected_amplitude: None,
        fitted,
        fixed_exponent_amplitude: None,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientVerdict {
    pub kappa: f64,
    /// `(annulus outer radius, sup |u'| r^kappa)` over dyadic annuli, outermost first.
    pub annulus_sups: Vec<(f64, f64)>,
    /// max/min of the sups over the innermost half of the annuli.
    pub spread: f64,
    pub pass: bool,
}

/// `sup |u'(r)| r^kappa` over dyadic annuli of `(0, rho]`, with
/// `kappa = nu + 1` below `q*` and `(q+1)/(q-1)` at or above it. Passes when
/// every sup is finite and the innermost half agree to `1 + tol`.
pub fn gradient_bound_check(
    params: &ProblemParams,
    profile: &RadialProfile,
    rho: f64,
    tol: f64,
) -> Result<GradientVerdict> {
    let h = &params.hardy;
    let u = as_u(h, profile)?;
    let Some(du) = &u.derivs else {
        return Err(domain("gradient check needs derivative samples"));
    };
    let q = params.q;
    let kappa = if q < q_star(h.nu) * (1.0 - 1e-9) { h.nu + 1.0 } else { (q + 1.0) / (q - 1.0) };
    let r = u.radii();
    let mut sups = Vec::new();
    let mut hi = rho;
    while hi / 2.0 >= r[0] {
        let lo = hi / 2.0;
        let s = r
            .iter()
            .zip(du)
            .filter(|(x, _)| **x > lo && **x <= hi)
            .map(|(x, d)| d.abs() * x.powf(kappa))
            .fold(f64::NAN, f64::max);
        if !s.is_nan() {
            sups.push((hi, s));
        }
        hi = lo;
    }
    if sups.len() < 4 {
        return Err(Error::DegenerateWindow { nodes: sups.len(), needed: 4 });
    }
    let inner = &sups[sups.len() / 2..];
    let max = inner.iter().map(|s| s.1).fold(0.0, f64::max);
    let min = inner.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let spread = if min > 0.0 { max / min } else { f64::INFINITY };
    let pass = sups.iter().all(|s| s.1.is_finite()) && spread <= 1.0 + tol;
    Ok(GradientVerdict { kappa, annulus_sups: sups, spread, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderReport {
    /// `v(0+)` by Aitken extrapolation over three geometrically spaced inner nodes.
    pub v0: f64,
    pub exponent: f64,
    pub theta: f64,
    pub pass: bool,
}

/// Exponent of `v(r) - v(0+)` near the origin against `theta = 2 + 2nu - (q+1)nu`.
/// Expects a geometric grid so that the Aitken step is exact for `a + b r^c`.
pub fn holder_exponent(h: &Hardy, q: f64, v: &RadialProfile, window: (f64, f64), tol: f64) -> Result<HolderReport> {
    let x = &v.values;
    let r = v.radii();
    // nodes 0, k, 2k with r_k ~ 10 r_0, so the differences rise above roundoff
    let k = r.iter().position(|&t| t >= 10.0 * r[0]).unwrap_or(1).max(1);
    if 2 * k >= x.len() || !(r[0] > 0.0) {
        return Err(Error::InsufficientPoints { got: x.len(), needed: 2 * k + 1 });
    }
    let (a, b, c) = (x[0], x[k], x[2 * k]);
    let den = a + c - 2.0 * b;
    let v0 = if den == 0.0 { a } else { (a * c - b * b) / den };
    let grid = v.grid.clone();
    let diff: Vec<f64> = x.iter().map(|x| (x - v0).abs()).collect();
    let shifted = RadialProfile::new(grid, diff, None, v.meaning)?;
    let fit = fit_power_law(&shifted, window, false)?;
    let exponent = -fit.exponent;
    let theta = 2.0 + 2.0 * h.nu - (q + 1.0) * h.nu;
    Ok(HolderReport { v0, exponent, theta, pass: exponent >= theta - tol })
}
