//! The borderline exponent `q = q*`. In log time the absorption equation
//! becomes autonomous, `x'' - x' - A x^q = 0`, and decaying solutions follow
//! `x ~ (A(q-1)s)^{-1/(q-1)} (1 + q/(q-1)^2 log s / s)`.

use serde::Serialize;

use super::integrator::{solve, OdeTolerance, Stop};
use super::profile::{Meaning, RadialGrid, RadialProfile, Spacing};
use crate::constants::{q_star, Hardy};
use crate::error::{domain, Error, Result};

/// Two-term asymptotic `(x, x')` at large `s`.
pub fn critical_asymptotic(q: f64, a: f64, s: f64) -> (f64, f64) {
    let m = 1.0 / (q - 1.0);
    let k = (a * (q - 1.0)).powf(-m);
    let c = m * (m + 1.0);
    let g = c * s.ln() / s;
    let dg = c * (1.0 - s.ln()) / (s * s);
    let x = k * s.powf(-m) * (1.0 + g);
    let dx = k * (-m * s.powf(-m - 1.0) * (1.0 + g) + s.powf(-m) * dg);
    (x, dx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalRun {
    /// `x(s)` in increasing `s`.
    pub profile: RadialProfile,
    pub steps: usize,
}

/// Integrate backward from `s_start` (two-term asymptotic data) down to
/// `s_end`, recording `nodes` log-spaced points.
pub fn critical_emden_solve(
    h: &Hardy,
    q: f64,
    a: f64,
    s_start: f64,
    s_end: f64,
    nodes: usize,
    tol: &OdeTolerance,
) -> Result<CriticalRun> {
    let qs = q_star(h.nu);
    if !((q - qs).abs() <= 1e-9 * qs) {
        return Err(domain(format!("q = {q} is not the critical exponent {qs}")));
    }
    if !(s_start > s_end && s_end > 1.0) {
        return Err(domain(format!("need s_start > s_end > 1, got {s_start}, {s_end}")));
    }
    let grid = RadialGrid::log(s_end, s_start, nodes)?;
    let targets: Vec<f64> = grid.points().iter().rev().copied().collect();
    let f = |_s: f64, y: &[f64; 2]| [y[1], y[1] + a * y[0].abs().powf(q - 1.0) * y[0]];
    let (x0, dx0) = critical_asymptotic(q, a, s_start);
    let path = solve(&f, s_start, [x0, dx0], &targets, tol, None);
    match path.stop {
        Stop::Done => {}
        Stop::Underflow { x, .. } | Stop::Cap { x_lo: x, .. } => return Err(Error::BlowUpBackward { s: x }),
    }
    for (s, y) in path.xs.iter().zip(&path.ys) {
        let lead = critical_asymptotic(q, a, *s).0;
        if !(y[0] > 0.0 && y[0] < 10.0 * lead) {
            return Err(Error::BlowUpBackward { s: *s });
        }
    }
    let mut values: Vec<f64> = path.ys.iter().map(|y| y[0]).collect();
    let mut derivs: Vec<f64> = path.ys.iter().map(|y| y[1]).collect();
    values.reverse();
    derivs.reverse();
    let profile = RadialProfile::new(grid, values, Some(derivs), Meaning::X)?;
    Ok(CriticalRun { profile, steps: path.steps })
}

/// `u r^nu |log r|^{nu/2}` along an `x(s)` profile, evaluated in log space
/// (the radii `alpha e^{-s/alpha}` underflow for large `s`). Tends to
/// `(alpha nu/2)^{nu/2}` for the unit absorption coefficient.
pub fn critical_amplitude(h: &Hardy, x: &RadialProfile) -> Result<Vec<(f64, f64)>> {
    if x.meaning != Meaning::X {
        return Err(domain("critical amplitude needs an x(s) profile"));
    }
    let a = h.alpha();
    let nu = h.nu;
    let mut out = Vec::with_capacity(x.len());
    for (&s, &xv) in x.radii().iter().zip(&x.values) {
        let log_inv_r = s / a - a.ln();
        if log_inv_r > 0.0 {
            out.push((s, a.powf(nu) * xv * log_inv_r.powf(0.5 * nu)));
        }
    }
    Ok(out)
}

/// The `u` profile on the radii that are representable in double precision.
pub fn critical_u_profile(h: &Hardy, x: &RadialProfile) -> Result<RadialProfile> {
    let a = h.alpha();
    let nu = h.nu;
    let mut rs = Vec::new();
    let mut us = Vec::new();
    let mut dus = Vec::new();
    let dx = x.derivative();
    for ((&s, &xv), &dxv) in x.radii().iter().zip(&x.values).zip(&dx).rev() {
        let r = a * (-s / a).exp();
        if r < 1e-300 {
            continue;
        }
        let v = a.powf(nu) * xv;
        // ds/dr = -alpha/r
        let dv = -a.powf(nu) * dxv * a / r;
        rs.push(r);
        us.push(r.powf(-nu) * v);
        dus.push(r.powf(-nu) * (dv - nu * v / r));
    }
    RadialProfile::new(RadialGrid::new(rs, Spacing::Log)?, us, Some(dus), Meaning::U)
}
