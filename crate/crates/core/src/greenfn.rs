//! Green function of `-div(|x|^{-2nu} grad)` on a ball with pole at the
//! center, its regular part, and the weighted measure `|y|^{-2nu} dy`.

use serde::Serialize;

use std::f64::consts::{FRAC_PI_2, PI};

use statrs::function::beta::beta_reg;

use crate::constants::{beta_function, sphere_area, Hardy};
use crate::error::{domain, Result};
use crate::quad;

/// `G(r) = (r^{-alpha} - R^{-alpha}) / (alpha omega_N)`; the regular part is
/// the constant `-1/(alpha omega_N R^alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenBall {
    pub hardy: Hardy,
    pub radius: f64,
}

impl GreenBall {
    pub fn g(&self, r: f64) -> f64 {
        let a = self.hardy.alpha();
        (r.powf(-a) - self.radius.powf(-a)) / (a * self.hardy.omega())
    }

    pub fn dg(&self, r: f64) -> f64 {
        let a = self.hardy.alpha();
        -r.powf(-a - 1.0) / self.hardy.omega()
    }

    /// Fundamental solution `-1/(alpha omega_N r^alpha)`.
    pub fn fundamental(&self, r: f64) -> f64 {
        let a = self.hardy.alpha();
        -r.powf(-a) / (a * self.hardy.omega())
    }

    /// `H = G + F`, constant in `r`.
    pub fn regular_part(&self, r: f64) -> f64 {
        self.g(r) + self.fundamental(r)
    }
}

pub fn green_ball(h: &Hardy, radius: f64) -> Result<GreenBall> {
    if !(radius > 0.0) {
        return Err(domain(format!("ball radius {radius} must be positive")));
    }
    Ok(GreenBall { hardy: *h, radius })
}

/// `R(0) = H(0, 0)`.
pub fn robin_function(h: &Hardy, radius: f64) -> Result<f64> {
    let a = h.alpha();
    green_ball(h, radius)?;
    Ok(-1.0 / (a * h.omega() * radius.powf(a)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxCheck {
    /// `int_{dB} |x|^{-2nu} <x,n> |grad G|^2`
    pub lhs: f64,
    /// `alpha |R(0)|`
    pub rhs: f64,
    pub rel_error: f64,
}

pub fn robin_flux_identity(h: &Hardy, radius: f64) -> Result<FluxCheck> {
    let g = green_ball(h, radius)?;
    let dg = g.dg(radius);
    let lhs = radius.powf(1.0 - 2.0 * h.nu) * dg * dg * h.omega() * radius.powf(h.dim() - 1.0);
    let rhs = h.alpha() * robin_function(h, radius)?.abs();
    Ok(FluxCheck { lhs, rhs, rel_error: (lhs - rhs).abs() / rhs })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenBound {
    /// Smallest `C` with `G(r) <= 2C r^{-alpha}` on the sampled radii.
    pub c_min: f64,
    /// `1/(alpha omega_N)`, the value the construction gives.
    pub c_theory: f64,
    pub holds: bool,
}

pub fn green_bound_check(h: &Hardy, radius: f64, radii: &[f64]) -> Result<GreenBound> {
    let g = green_ball(h, radius)?;
    let a = h.alpha();
    let c_min =
        radii.iter().filter(|&&r| r > 0.0 && r < radius).map(|&r| 0.5 * g.g(r) * r.powf(a)).fold(0.0f64, f64::max);
    let c_theory = 1.0 / (a * h.omega());
    Ok(GreenBound { c_min, c_theory, holds: c_min <= c_theory * (1.0 + 1e-12) })
}

/// `int_0^theta sin^n`, through the regularized incomplete Beta function so
/// that small angles keep their relative accuracy.
fn sin_power_integral(n: u32, theta: f64) -> f64 {
    let a = 0.5 * (n as f64 + 1.0);
    let full = beta_function(a, 0.5).unwrap_or(f64::NAN);
    let part = |th: f64| {
        let s = th.sin();
        0.5 * full * beta_reg(a, 0.5, (s * s).min(1.0))
    };
    if theta <= FRAC_PI_2 {
        part(theta)
    } else {
        full - part(PI - theta)
    }
}

/// `w(B_t(x)) = int_{|y-x|<t} |y|^{-2nu} dy` for `|x| = d`.
///
/// Spheres `|y| = s` inside the ball contribute in closed form; the rest are
/// caps of half-angle `theta(s)`, integrated in `s` by tanh-sinh.
pub fn weighted_ball_measure(h: &Hardy, d: f64, t: f64) -> Result<f64> {
    if !(d >= 0.0 && t > 0.0) {
        return Err(domain(format!("need |x| >= 0 and radius > 0, got {d}, {t}")));
    }
    let n = h.dim();
    let e = n - 2.0 * h.nu;
    let w = h.omega();
    let full = if t > d { w * (t - d).powf(e) / e } else { 0.0 };
    if d == 0.0 {
        return Ok(full);
    }
    let w_lower = sphere_area(h.n - 1);
    // integrate over the offset `sigma = s - |t - d|`; the half-angle of the
    // cap comes from factored differences, exact on thin shells and tiny caps
    let lo = (t - d).abs();
    let cap = |sigma: f64| -> f64 {
        let s = lo + sigma;
        if s <= 0.0 {
            return 0.0;
        }
        // 1 - cos = a b / (2 s d), 1 + cos = e (s + d + t) / (2 s d)
        let (a, b, e) = if t >= d {
            (2.0 * d - sigma, 2.0 * (t - d) + sigma, sigma)
        } else {
            (2.0 * t - sigma, sigma, 2.0 * (d - t) + sigma)
        };
        let theta = 2.0 * (a * b).max(0.0).sqrt().atan2((e * (s + d + t)).max(0.0).sqrt());
        w_lower * s.powf(n - 1.0 - 2.0 * h.nu) * sin_power_integral(h.n - 2, theta)
    };
    Ok(full + quad::integrate(cap, 0.0, 2.0 * t.min(d), 1e-11)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingReport {
    /// Smallest `w(B_{2^k r}(x)) / (2^{k(N-2nu)} w(B_r(x)))` over all pairs and `k`.
    pub c_required: f64,
    /// Same, over the `(r, k)` with `2^k r >= |x|/10`.
    pub c_required_near: f64,
    /// Same, over the `(r, k)` with `2^k r < |x|/10`.
    pub c_required_far: f64,
    /// Largest `w(B_r(x)) / w(B_{r/2}(x))`.
    pub doubling_constant: f64,
    /// `D^{-4}`: four doublings cover the factor 10 in the near case.
    pub near_proof_constant: f64,
    /// `(11/9)^{-2nu}`: `|y|` stays within `[9|x|/10, 11|x|/10]` in the far case.
    pub far_proof_constant: f64,
    /// Both required constants clear the proof constants.
    pub holds: bool,
}

pub fn doubling_check(h: &Hardy, pairs: &[(f64, f64)], k_max: u32) -> Result<DoublingReport> {
    let e = h.dim() - 2.0 * h.nu;
    let mut near = f64::INFINITY;
    let mut far = f64::INFINITY;
    let mut dbl = 0.0f64;
    for &(d, r) in pairs {
        let base = weighted_ball_measure(h, d, r)?;
        let half = weighted_ball_measure(h, d, 0.5 * r)?;
        dbl = dbl.max(base / half);
        for k in 1..=k_max {
            let t = 2f64.powi(k as i32) * r;
            let big = weighted_ball_measure(h, d, t)?;
            let ratio = big / (2f64.powf(k as f64 * e) * base);
            if t >= d / 10.0 {
                near = near.min(ratio);
            } else {
                far = far.min(ratio);
            }
        }
    }
    let near_proof_constant = dbl.powi(-4);
    let far_proof_constant = (11.0f64 / 9.0).powf(-2.0 * h.nu);
    let holds = near >= near_proof_constant * (1.0 - 1e-12) && far >= far_proof_constant * (1.0 - 1e-12);
    Ok(DoublingReport {
        c_required: near.min(far),
        c_required_near: near,
        c_required_far: far,
        doubling_constant: dbl,
        near_proof_constant,
        far_proof_constant,
        holds,
    })
}
