//! Pohozaev identities for radial profiles on balls.
//!
//! Plain form, for `-Δu - μu/r^2 = λu^p - εu^q + f` on `B_R`, multiplier
//! `x·∇u + (N-2)/2 u`:
//!
//! ```text
//! -ω R^{N-1} [ R u'^2/2 + (N-2)/2 u u' + μ u^2/(2R) ]
//!     = λ c_p ∫u^{p+1} + λ ω R^N u^{p+1}/(p+1)
//!     - ε c_q ∫u^{q+1} - ε ω R^N u^{q+1}/(q+1) + ∫ f (x·∇u + (N-2)/2 u)
//! ```
//!
//! with `c_m = (N-2)/2 - N/(m+1)`. The Hardy term leaves only a boundary
//! contribution. The weighted form for `v = r^ν u` uses the multiplier
//! `x·∇v + α/2 v`; its boundary bracket is `R^{-2ν}[R v'^2/2 + α/2 v v']`,
//! which equals the plain one term by term after `ν^2 + αν = μ`.

use serde::Serialize;

use crate::constants::{Hardy, ProblemParams};
use crate::error::{domain, Error, Result};
use crate::quad::{self, Coordinate};
use crate::radial_ode::{Meaning, RadialGrid, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PohozaevReport {
    pub boundary_gradient_term: f64,
    pub boundary_trace_term: f64,
    pub boundary_hardy_term: f64,
    pub volume_p_term: f64,
    pub volume_q_term: f64,
    pub boundary_p_term: f64,
    pub boundary_q_term: f64,
    pub forcing_term: f64,
    /// `-(gradient + trace + hardy)`
    pub lhs: f64,
    /// `volume_p + boundary_p - volume_q - boundary_q + forcing`
    pub rhs: f64,
    pub residual: f64,
    /// Residual over the largest term magnitude.
    pub relative_residual: f64,
}

impl PohozaevReport {
    fn assemble(b: [f64; 3], vp: f64, vq: f64, bp: f64, bq: f64, forcing: f64) -> Self {
        let lhs = -(b[0] + b[1] + b[2]);
        let rhs = vp + bp - vq - bq + forcing;
        let residual = lhs - rhs;
        let scale = [b[0], b[1], b[2], vp, vq, bp, bq, forcing].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Self {
            boundary_gradient_term: b[0],
            boundary_trace_term: b[1],
            boundary_hardy_term: b[2],
            volume_p_term: vp,
            volume_q_term: vq,
            boundary_p_term: bp,
            boundary_q_term: bq,
            forcing_term: forcing,
            lhs,
            rhs,
            residual,
            relative_residual: if scale > 0.0 { residual / scale } else { 0.0 },
        }
    }
}

/// `c_m = (N-2)/2 - N/(m+1)`; zero at the critical Sobolev power.
pub fn pohozaev_coefficient(n: f64, m: f64) -> f64 {
    0.5 * (n - 2.0) - n / (m + 1.0)
}

/// `ω ∫_0^R g(r) r^{N-1} dr` by the sampled rule with a power-law head.
fn ball_integral(h: &Hardy, radii: &[f64], g: &[f64]) -> Result<f64> {
    let n = h.dim();
    let vals: Vec<f64> = radii.iter().zip(g).map(|(r, x)| x * r.powf(n - 1.0)).collect();
    Ok(h.omega() * quad::samples(radii, &vals, Coordinate::Log, true)?)
}

fn check(p: &RadialProfile, m: Meaning, forcing: Option<&[f64]>) -> Result<Vec<f64>> {
    if p.meaning != m {
        return Err(domain(format!("expected a {m:?} profile, got {:?}", p.meaning)));
    }
    if !(p.grid.first() > 0.0) {
        return Err(domain("Pohozaev quadrature needs positive radii"));
    }
    if forcing.is_some_and(|f| f.len() != p.len()) {
        return Err(domain("forcing samples do not match the grid"));
    }
    Ok(p.derivative())
}

fn dirichlet_ok(values: &[f64]) -> Result<()> {
    let sup = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if values.last().unwrap().abs() > 1e-12 * sup.max(1e-300) {
        return Err(domain("Dirichlet form requested but the profile does not vanish at R"));
    }
    Ok(())
}

/// Plain identity for `u` on the ball of radius `grid.last()`. `forcing`
/// holds samples of `f`; `lambda` multiplies the `p` term.
pub fn pohozaev_u(
    params: &ProblemParams,
    lambda: f64,
    u: &RadialProfile,
    forcing: Option<&[f64]>,
    dirichlet: bool,
) -> Result<PohozaevReport> {
    let du = check(u, Meaning::U, forcing)?;
    if dirichlet {
        dirichlet_ok(&u.values)?;
    }
    let h = &params.hardy;
    let (n, w) = (h.dim(), h.omega());
    let (p, q, eps) = (params.p, params.q, params.eps);
    let r = u.radii();
    let big_r = u.grid.last();
    let (ur, dur) =
        if dirichlet { (0.0, *du.last().unwrap()) } else { (*u.values.last().unwrap(), *du.last().unwrap()) };
    let area = w * big_r.powf(n - 1.0);
    let b = [area * 0.5 * big_r * dur * dur, area * 0.5 * (n - 2.0) * ur * dur, area * 0.5 * h.mu / big_r * ur * ur];
    let up: Vec<f64> = u.values.iter().map(|x| x.abs().powf(p + 1.0)).collect();
    let uq: Vec<f64> = u.values.iter().map(|x| x.abs().powf(q + 1.0)).collect();
    let vp = lambda * pohozaev_coefficient(n, p) * ball_integral(h, r, &up)?;
    let vq = eps * pohozaev_coefficient(n, q) * ball_integral(h, r, &uq)?;
    let bp = lambda * w * big_r.powf(n) * ur.abs().powf(p + 1.0) / (p + 1.0);
    let bq = eps * w * big_r.powf(n) * ur.abs().powf(q + 1.0) / (q + 1.0);
    let forcing_term = match forcing {
        Some(f) => {
            let g: Vec<f64> = f
                .iter()
                .zip(r)
                .zip(u.values.iter().zip(&du))
                .map(|((f, r), (u, du))| f * (r * du + 0.5 * (n - 2.0) * u))
                .collect();
            ball_integral(h, r, &g)?
        }
        None => 0.0,
    };
    Ok(PohozaevReport::assemble(b, vp, vq, bp, bq, forcing_term))
}

/// Weighted identity for `v`; `forcing` holds samples of the weighted-form
/// forcing `g = r^{-ν} f`. The Hardy slot is identically zero.
pub fn pohozaev_v_weighted(
    params: &ProblemParams,
    lambda: f64,
    v: &RadialProfile,
    forcing: Option<&[f64]>,
    dirichlet: bool,
) -> Result<PohozaevReport> {
    let dv = check(v, Meaning::V, forcing)?;
    if dirichlet {
        dirichlet_ok(&v.values)?;
    }
    let h = &params.hardy;
    let (n, w, nu, a) = (h.dim(), h.omega(), h.nu, h.alpha());
    let (p, q, eps) = (params.p, params.q, params.eps);
    let r = v.radii();
    let big_r = v.grid.last();
    let (vr, dvr) =
        if dirichlet { (0.0, *dv.last().unwrap()) } else { (*v.values.last().unwrap(), *dv.last().unwrap()) };
    let b = boundary_bracket(h, big_r, vr, dvr);
    let wp: Vec<f64> = r.iter().zip(&v.values).map(|(r, x)| r.powf(-(p + 1.0) * nu) * x.abs().powf(p + 1.0)).collect();
    let wq: Vec<f64> = r.iter().zip(&v.values).map(|(r, x)| r.powf(-(q + 1.0) * nu) * x.abs().powf(q + 1.0)).collect();
    let vp = lambda * pohozaev_coefficient(n, p) * ball_integral(h, r, &wp)?;
    let vq = eps * pohozaev_coefficient(n, q) * ball_integral(h, r, &wq)?;
    let bp = lambda * w * big_r.powf(n - (p + 1.0) * nu) * vr.abs().powf(p + 1.0) / (p + 1.0);
    let bq = eps * w * big_r.powf(n - (q + 1.0) * nu) * vr.abs().powf(q + 1.0) / (q + 1.0);
    let forcing_term = match forcing {
        Some(g) => {
            let s: Vec<f64> = g
                .iter()
                .zip(r)
                .zip(v.values.iter().zip(&dv))
                .map(|((g, r), (v, dv))| g * (r * dv + 0.5 * a * v))
                .collect();
            ball_integral(h, r, &s)?
        }
        None => 0.0,
    };
    Ok(PohozaevReport::assemble([b[0], b[1], 0.0], vp, vq, bp, bq, forcing_term))
}

/// `[gradient, trace]` boundary terms of the weighted identity on the sphere
/// of radius `rho`: `ω ρ^{N-1-2ν} (ρ v'^2/2, α/2 v v')`.
pub fn boundary_bracket(h: &Hardy, rho: f64, v: f64, dv: f64) -> [f64; 2] {
    let area = h.omega() * rho.powf(h.dim() - 1.0 - 2.0 * h.nu);
    [area * 0.5 * rho * dv * dv, area * 0.5 * h.alpha() * v * dv]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Obstruction {
    /// `(N-2)/2 - N/(q+1)`
    pub prefactor: f64,
    /// `∫_{R^N} u^{q+1}`, including a power-law tail past the last node.
    pub integral: f64,
    pub value: f64,
}

/// `((N-2)/2 - N/(q+1)) ∫ u^{q+1}` for a decaying candidate. Positive for
/// `q > 2*-1` and a positive candidate, which rules it out as a solution.
pub fn nonexistence_obstruction(params: &ProblemParams, u: &RadialProfile) -> Result<Obstruction> {
    if u.meaning != Meaning::U {
        return Err(domain("obstruction needs a u profile"));
    }
    let h = &params.hardy;
    let n = h.dim();
    let q = params.q;
    let prefactor = pohozaev_coefficient(n, q);
    let r = u.radii();
    let g: Vec<f64> = u.values.iter().map(|x| x.abs().powf(q + 1.0)).collect();
    if g.iter().all(|&x| x == 0.0) {
        return Ok(Obstruction { prefactor, integral: 0.0, value: 0.0 });
    }
    let body = ball_integral(h, r, &g)?;
    // tail: f r^{N-1} ~ c r^m past the last node
    let k = r.len();
    let f1 = g[k - 2] * r[k - 2].powf(n - 1.0);
    let f2 = g[k - 1] * r[k - 1].powf(n - 1.0);
    let m = (f2 / f1).ln() / (r[k - 1] / r[k - 2]).ln();
    if !(m < -1.0) {
        return Err(Error::NonIntegrableTail { exponent: m });
    }
    let tail = h.omega() * f2 * r[k - 1] / (-m - 1.0);
    let integral = body + tail;
    Ok(Obstruction { prefactor, integral, value: prefactor * integral })
}

/// Plain-identity reports on balls of the given radii for an analytic
/// profile `u(r) -> (u, u')`, sampled on `nodes` log-spaced radii from `r_min`.
pub fn ball_residuals(
    params: &ProblemParams,
    lambda: f64,
    u: impl Fn(f64) -> (f64, f64),
    radii: &[f64],
    r_min: f64,
    nodes: usize,
) -> Result<Vec<(f64, PohozaevReport)>> {
    radii
        .iter()
        .map(|&big_r| {
            let prof = RadialProfile::from_fn(RadialGrid::log(r_min, big_r, nodes)?, Meaning::U, &u);
            Ok((big_r, pohozaev_u(params, lambda, &prof, None, false)?))
        })
        .collect()
}
