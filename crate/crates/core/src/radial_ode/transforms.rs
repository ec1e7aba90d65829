//! Changes of variables between the Hardy form, the weighted form, the
//! Emden-Fowler variable and log time, plus the weighted Kelvin transform.
//!
//! Emden-Fowler: `t = (alpha/r)^alpha`, `y(t) = alpha^{-nu} v(r)`. With this
//! scaling `v'' + (N-1-2nu)/r v' = A r^{-(q-1)nu} v^q` becomes
//! `y'' = A t^{(-2alpha-2+(q-1)nu)/alpha} y^q` with no leftover constant.

use super::profile::{Meaning, RadialProfile, Spacing};
use crate::constants::Hardy;
use crate::error::{domain, Result};

pub fn t_of_r(alpha: f64, r: f64) -> f64 {
    (alpha / r).powf(alpha)
}

pub fn r_of_t(alpha: f64, t: f64) -> f64 {
    alpha * t.powf(-1.0 / alpha)
}

fn expect(p: &RadialProfile, m: Meaning) -> Result<()> {
    if p.meaning != m {
        return Err(domain(format!("expected a {m:?} profile, got {:?}", p.meaning)));
    }
    Ok(())
}

fn positive_radii(p: &RadialProfile) -> Result<()> {
    if p.grid.first() <= 0.0 {
        return Err(domain("transform needs strictly positive radii"));
    }
    Ok(())
}

fn reversed(mut v: Vec<f64>) -> Vec<f64> {
    v.reverse();
    v
}

/// `v = r^nu u`
pub fn u_to_v(h: &Hardy, u: &RadialProfile) -> Result<RadialProfile> {
    expect(u, Meaning::U)?;
    positive_radii(u)?;
    let nu = h.nu;
    let r = u.radii();
    let values = r.iter().zip(&u.values).map(|(r, u)| r.powf(nu) * u).collect();
    let derivs = u
        .derivs
        .as_ref()
        .map(|d| r.iter().zip(&u.values).zip(d).map(|((r, u), du)| r.powf(nu) * (du + nu * u / r)).collect());
    RadialProfile::new(u.grid.clone(), values, derivs, Meaning::V)
}

/// `u = r^{-nu} v`
pub fn v_to_u(h: &Hardy, v: &RadialProfile) -> Result<RadialProfile> {
    expect(v, Meaning::V)?;
    positive_radii(v)?;
    let nu = h.nu;
    let r = v.radii();
    let values = r.iter().zip(&v.values).map(|(r, v)| r.powf(-nu) * v).collect();
    let derivs = v
        .derivs
        .as_ref()
        .map(|d| r.iter().zip(&v.values).zip(d).map(|((r, v), dv)| r.powf(-nu) * (dv - nu * v / r)).collect());
    RadialProfile::new(v.grid.clone(), values, derivs, Meaning::U)
}

/// `y(t) = alpha^{-nu} v(r)` on `t = (alpha/r)^alpha`, returned in increasing `t`.
pub fn emden_fowler_forward(h: &Hardy, v: &RadialProfile) -> Result<RadialProfile> {
    expect(v, Meaning::V)?;
    positive_radii(v)?;
    let a = h.alpha();
    let s = a.powf(-h.nu);
    let grid = v.grid.map(|r| t_of_r(a, r), Spacing::Custom)?;
    let values = reversed(v.values.iter().map(|x| s * x).collect());
    // dy/dt = alpha^{-nu} v'(r) dr/dt, dr/dt = -r/(alpha t)
    let derivs = v
        .derivs
        .as_ref()
        .map(|d| reversed(v.radii().iter().zip(d).map(|(&r, dv)| -s * dv * r / (a * t_of_r(a, r))).collect()));
    RadialProfile::new(grid, values, derivs, Meaning::Y)
}

pub fn emden_fowler_inverse(h: &Hardy, y: &RadialProfile) -> Result<RadialProfile> {
    expect(y, Meaning::Y)?;
    positive_radii(y)?;
    let a = h.alpha();
    let s = a.powf(h.nu);
    let grid = y.grid.map(|t| r_of_t(a, t), Spacing::Custom)?;
    let values = reversed(y.values.iter().map(|x| s * x).collect());
    // dv/dr = alpha^nu y'(t) dt/dr, dt/dr = -alpha t / r
    let derivs = y
        .derivs
        .as_ref()
        .map(|d| reversed(y.radii().iter().zip(d).map(|(&t, dy)| -s * dy * a * t / r_of_t(a, t)).collect()));
    RadialProfile::new(grid, values, derivs, Meaning::V)
}

/// `x(s) = y(e^s)`
pub fn log_time_forward(y: &RadialProfile) -> Result<RadialProfile> {
    expect(y, Meaning::Y)?;
    positive_radii(y)?;
    let grid = y.grid.map(f64::ln, Spacing::Custom)?;
    let derivs = y.derivs.as_ref().map(|d| y.radii().iter().zip(d).map(|(t, dy)| t * dy).collect());
    RadialProfile::new(grid, y.values.clone(), derivs, Meaning::X)
}

pub fn log_time_inverse(x: &RadialProfile) -> Result<RadialProfile> {
    expect(x, Meaning::X)?;
    let grid = x.grid.map(f64::exp, Spacing::Custom)?;
    let derivs = x.derivs.as_ref().map(|d| x.radii().iter().zip(d).map(|(s, dx)| dx / s.exp()).collect());
    RadialProfile::new(grid, x.values.clone(), derivs, Meaning::Y)
}

/// `r^{-alpha} z(1/r)` on the inverted grid.
pub fn kelvin_transform(h: &Hardy, z: &RadialProfile) -> Result<RadialProfile> {
    positive_radii(z)?;
    let a = h.alpha();
    let grid = z.grid.map(|r| 1.0 / r, Spacing::Custom)?;
    let values = reversed(z.radii().iter().zip(&z.values).map(|(&r, v)| r.powf(a) * v).collect());
    // at rho = 1/r: d/drho [rho^{-a} z(1/rho)] = -a rho^{-a-1} z - rho^{-a-2} z'
    let derivs = z.derivs.as_ref().map(|d| {
        reversed(
            z.radii()
                .iter()
                .zip(&z.values)
                .zip(d)
                .map(|((&r, v), dz)| -a * r.powf(a + 1.0) * v - r.powf(a + 2.0) * dz)
                .collect(),
        )
    });
    RadialProfile::new(grid, values, derivs, z.meaning)
}
