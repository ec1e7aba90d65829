//! Radial reduction of the weighted equation and its changes of variables.
//!
//! In the weighted form a radial `v` satisfies
//! `v'' + (N-1-2nu)/r v' = rhs(r, v)`, where `rhs` is a sum of power terms
//! `c r^{-sigma} |v|^{m-1} v`.

mod barrier;
mod critical;
mod integrator;
mod profile;
mod transforms;

pub use barrier::{barrier_annulus, barrier_supersolution_margin, exact_subsolution, Barrier, ExactSubsolution};
pub use critical::{critical_amplitude, critical_asymptotic, critical_emden_solve, critical_u_profile, CriticalRun};
pub use integrator::{solve as solve_ode, Cap, OdeTolerance, Path, Stop};
pub use profile::{finite_difference, Meaning, RadialGrid, RadialProfile, Spacing, MIN_NODES};
pub use transforms::{
    emden_fowler_forward, emden_fowler_inverse, kelvin_transform, log_time_forward, log_time_inverse, r_of_t, t_of_r,
    u_to_v, v_to_u,
};

use serde::Serialize;

use crate::constants::Hardy;
use crate::error::{domain, Error, Result};

/// Right-hand side of the radial ODE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Rhs {
    Zero,
    /// `+a r^{-(q-1)nu} v^q`
    Absorption {
        q: f64,
        a: f64,
    },
    /// `-lambda r^{-(p-1)nu} v^p`
    Source {
        p: f64,
        lambda: f64,
    },
    /// `-lambda r^{-(p-1)nu} v^p + eps r^{-(q-1)nu} v^q`
    Full {
        p: f64,
        q: f64,
        lambda: f64,
        eps: f64,
    },
}

/// One term `coef * r^{-sigma} * |v|^{power-1} v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coef: f64,
    pub sigma: f64,
    pub power: f64,
}

impl Rhs {
    pub fn terms(&self, nu: f64) -> Vec<PowerTerm> {
        match *self {
            Rhs::Zero => vec![],
            Rhs::Absorption { q, a } => vec![PowerTerm { coef: a, sigma: (q - 1.0) * nu, power: q }],
            Rhs::Source { p, lambda } => vec![PowerTerm { coef: -lambda, sigma: (p - 1.0) * nu, power: p }],
            Rhs::Full { p, q, lambda, eps } => vec![
                PowerTerm { coef: -lambda, sigma: (p - 1.0) * nu, power: p },
                PowerTerm { coef: eps, sigma: (q - 1.0) * nu, power: q },
            ],
        }
    }

    pub fn eval(&self, nu: f64, r: f64, v: f64) -> f64 {
        self.terms(nu).iter().map(|t| t.coef * r.powf(-t.sigma) * spow(v, t.power)).sum()
    }
}

/// `|v|^{m-1} v`
pub fn spow(v: f64, m: f64) -> f64 {
    v.abs().powf(m - 1.0) * v
}

/// `v'' + (N-1-2nu)/r v' - rhs(r, v)` for an analytic profile; used to check
/// closed-form solutions.
pub fn operator_residual(h: &Hardy, rhs: &Rhs, r: f64, v: f64, dv: f64, d2v: f64) -> f64 {
    let k = h.dim() - 1.0 - 2.0 * h.nu;
    d2v + k * dv / r - rhs.eval(h.nu, r, v)
}

/// Result of a radial integration: samples at the nodes reached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialRun {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    pub blew_up: bool,
    /// Radius where `|v|` crossed the cap.
    pub cap_radius: Option<f64>,
}

impl RadialRun {
    pub fn into_profile(self, meaning: Meaning) -> Result<RadialProfile> {
        let grid = RadialGrid::new(self.radii, Spacing::Custom)?;
        RadialProfile::new(grid, self.values, Some(self.derivs), meaning)
    }
}

/// Integrate the radial ODE from `(r0, v0, v0')` through the grid nodes on the
/// far side of `r0` (outward if the grid ends beyond `r0`, inward otherwise).
pub fn integrate_radial(
    h: &Hardy,
    rhs: &Rhs,
    r0: f64,
    init: (f64, f64),
    grid: &RadialGrid,
    tol: &OdeTolerance,
    cap: f64,
) -> Result<RadialRun> {
    if !(r0 > 0.0) {
        return Err(domain(format!("start radius {r0} must be positive")));
    }
    let outward = grid.last() > r0;
    let targets: Vec<f64> = if outward {
        grid.points().iter().copied().filter(|&r| r >= r0).collect()
    } else {
        grid.points().iter().rev().copied().filter(|&r| r <= r0 && r > 0.0).collect()
    };
    let k = h.dim() - 1.0 - 2.0 * h.nu;
    let terms = rhs.terms(h.nu);
    let f = |r: f64, y: &[f64; 2]| -> [f64; 2] {
        let mut s = -k * y[1] / r;
        for t in &terms {
            s += t.coef * r.powf(-t.sigma) * spow(y[0], t.power);
        }
        [y[1], s]
    };
    let path = solve_ode(&f, r0, [init.0, init.1], &targets, tol, Some(Cap { index: 0, value: cap }));
    let (blew_up, cap_radius) = match path.stop {
        Stop::Done => (false, None),
        Stop::Cap { x_lo, x_hi, .. } => (true, Some(0.5 * (x_lo + x_hi))),
        Stop::Underflow { x, .. } => return Err(Error::StepUnderflow { r: x }),
    };
    let mut radii = path.xs;
    let mut values: Vec<f64> = path.ys.iter().map(|y| y[0]).collect();
    let mut derivs: Vec<f64> = path.ys.iter().map(|y| y[1]).collect();
    if !outward {
        radii.reverse();
        values.reverse();
        derivs.reverse();
    }
    Ok(RadialRun { radii, values, derivs, blew_up, cap_radius })
}

/// Value and derivative at small `r0` of the solution regular at the origin
/// with `v(0) = v0`.
///
/// A single power term is expanded as a series in `r^{2-sigma}`:
/// `v = sum_k c_k r^{k(2-sigma)}` with
/// `c_{k+1} = coef d_k / ((N - 2nu - sigma + k(2-sigma)) (k+1)(2-sigma))`,
/// where `d_k` are the coefficients of `v^m`. Several terms get the first
/// correction of each.
pub fn frobenius_start(h: &Hardy, rhs: &Rhs, v0: f64, r0: f64) -> Result<(f64, f64)> {
    let terms = rhs.terms(h.nu);
    let base = h.dim() - 2.0 * h.nu;
    for t in &terms {
        if !(t.sigma < 2.0 && base - t.sigma > 0.0) {
            return Err(domain(format!(
                "no regular expansion at the origin: weight exponent {} is too strong",
                t.sigma
            )));
        }
    }
    match terms.as_slice() {
        [] => Ok((v0, 0.0)),
        [t] => Ok(series_single(base, t, v0, r0, 12)),
        _ => {
            let mut v = v0;
            let mut dv = 0.0;
            for t in &terms {
                let b = 2.0 - t.sigma;
                let c1 = t.coef * spow(v0, t.power) / ((base - t.sigma) * b);
                v += c1 * r0.powf(b);
                dv += c1 * b * r0.powf(b - 1.0);
            }
            Ok((v, dv))
        }
    }
}

/// Coefficients `c_0..c_K` of the single-term series (in powers of `r^beta`).
pub fn series_coefficients(base: f64, t: &PowerTerm, v0: f64, order: usize) -> Vec<f64> {
    let beta = 2.0 - t.sigma;
    let mut c = vec![v0];
    let mut d = vec![spow(v0, t.power)];
    for k in 0..order {
        c.push(t.coef * d[k] / ((base - t.sigma + k as f64 * beta) * (k as f64 + 1.0) * beta));
        // power-series power (J.C.P. Miller): d_j = 1/(j c0) sum_i ((m+1) i - j) c_i d_{j-i}
        let j = k + 1;
        let mut s = 0.0;
        for i in 1..=j {
            s += ((t.power + 1.0) * i as f64 - j as f64) * c[i] * d[j - i];
        }
        d.push(if v0 == 0.0 { 0.0 } else { s / (j as f64 * v0) });
    }
    c
}

fn series_single(base: f64, t: &PowerTerm, v0: f64, r0: f64, order: usize) -> (f64, f64) {
    let beta = 2.0 - t.sigma;
    let c = series_coefficients(base, t, v0, order);
    let x = r0.powf(beta);
    let mut v = 0.0;
    let mut dv = 0.0;
    let mut xp = 1.0;
    for (k, ck) in c.iter().enumerate() {
        v += ck * xp;
        if k > 0 {
            dv += ck * k as f64 * beta * xp / r0;
        }
        xp *= x;
    }
    (v, dv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hardy() -> Hardy {
        Hardy::new(4, 0.75).unwrap()
    }

    #[test]
    fn zero_rhs_is_harmonic() {
        // v = a + b r^{-alpha}
        let h = hardy();
        let a = h.alpha();
        let grid = RadialGrid::uniform(2.0, 40).unwrap();
        let r0 = 0.05;
        let v = |r: f64| 1.0 + 0.3 * r.powf(-a);
        let dv = |r: f64| -0.3 * a * r.powf(-a - 1.0);
        let run =
            integrate_radial(&h, &Rhs::Zero, r0, (v(r0), dv(r0)), &grid, &OdeTolerance::uniform(1e-12), 1e8).unwrap();
        for (r, val) in run.radii.iter().zip(&run.values) {
            assert!((val - v(*r)).abs() < 1e-9 * v(*r));
        }
    }

    #[test]
    fn talenti_solves_critical_source() {
        let h = Hardy::new(5, 1.2).unwrap();
        let p = h.two_star() - 1.0;
        let rhs = Rhs::Source { p, lambda: 1.0 };
        let (n, a) = (h.dim(), h.alpha());
        let m = 2.0 * a / (n - 2.0);
        let e = 0.5 * (n - 2.0);
        let c = (n * a * a / (n - 2.0)).powf(0.5 * e);
        for r in [0.05, 0.5, 1.0, 3.0, 20.0] {
            let (u, du) = crate::constants::talenti_profile(&h, r);
            let w = 1.0 + r.powf(m);
            let d2 = -c
                * e
                * m
                * ((m - 1.0) * r.powf(m - 2.0) * w.powf(-e - 1.0)
                    - (e + 1.0) * m * r.powf(2.0 * m - 2.0) * w.powf(-e - 2.0));
            let res = operator_residual(&h, &rhs, r, u, du, d2);
            assert!(res.abs() < 1e-12 * rhs.eval(h.nu, r, u).abs(), "r={r} res={res}");
        }
    }

    #[test]
    fn frobenius_series_matches_integration() {
        let h = hardy();
        let rhs = Rhs::Absorption { q: 4.0, a: 1.0 };
        let r0 = 1e-6;
        let (v, dv) = frobenius_start(&h, &rhs, 0.8, r0).unwrap();
        let grid = RadialGrid::log(1e-4, 0.3, 16).unwrap();
        let run = integrate_radial(&h, &rhs, r0, (v, dv), &grid, &OdeTolerance::uniform(1e-13), 1e8).unwrap();
        let base = h.dim() - 2.0 * h.nu;
        for (r, val) in run.radii.iter().zip(&run.values) {
            let (s, _) = series_single(base, &rhs.terms(h.nu)[0], 0.8, *r, 80);
            assert!((val - s).abs() < 1e-10, "r={r}: {val} vs {s}");
        }
    }

    #[test]
    fn frobenius_rejects_strong_weight() {
        let h = hardy();
        assert!(frobenius_start(&h, &Rhs::Absorption { q: 6.0, a: 1.0 }, 1.0, 1e-6).is_err());
    }
}
