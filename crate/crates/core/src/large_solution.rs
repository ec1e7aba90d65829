//! Boundary blow-up solutions of `-div(|x|^{-2nu} grad u) + |x|^{-(q+1)nu} u^q = 0`
//! on balls, their similarity family and the Liouville comparison built on it.
//!
//! Radially the equation is `u'' + (N-1-2nu)/r u' = r^{-(q-1)nu} u^q`, the
//! absorption equation with unit coefficient. The similarity map
//! `T_l u(x) = l^{2/(q-1)-nu} u(l x)` preserves it.

use serde::Serialize;

use crate::constants::Hardy;
use crate::error::{domain, Error, Result};
use crate::radial_ode::{
    frobenius_start, integrate_radial, Meaning, OdeTolerance, RadialGrid, RadialProfile, Rhs, Spacing,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LargeSolution {
    pub q: f64,
    /// `u` on `(0, r_cap]`, where `r_cap` is the first radius with `u = cap`.
    pub profile: RadialProfile,
    /// Blow-up radius extrapolated from the runs at `cap` and `2 cap`.
    pub blowup_radius: f64,
    pub cap_radius: f64,
    /// `|r_cap(2 cap) - r_cap(cap)| / r*`; below 1e-4 counts as a certified blow-up.
    pub cap_sensitivity: f64,
    /// `(base blow-up radius, scale factor)` when produced by [`rescale_large`].
    pub scaled_from: Option<(f64, f64)>,
}

impl LargeSolution {
    pub fn certified(&self) -> bool {
        self.cap_sensitivity < 1e-4
    }

    /// `2/(q-1) - nu`, the similarity exponent.
    pub fn similarity_exponent(&self, h: &Hardy) -> f64 {
        2.0 / (self.q - 1.0) - h.nu
    }

    /// `u(r)`; constant continuation below the first node, `None` past the cap.
    pub fn eval(&self, r: f64) -> Option<f64> {
        let first = self.profile.grid.first();
        if r < first {
            return Some(self.profile.values[0]);
        }
        self.profile.interpolate(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootConfig {
    pub cap: f64,
    pub r_limit: f64,
    pub nodes: usize,
    pub tol: OdeTolerance,
}

impl Default for ShootConfig {
    fn default() -> Self {
        Self { cap: 1e8, r_limit: 1e3, nodes: 2000, tol: OdeTolerance::uniform(1e-12) }
    }
}

fn check_range(h: &Hardy, q: f64) -> Result<()> {
    let upper = (1.0 + h.nu) / h.nu;
    if !(q > 1.0 && q < upper) {
        return Err(domain(format!("large solutions need 1 < q < (1+nu)/nu = {upper}, got {q}")));
    }
    Ok(())
}

fn shoot_once(h: &Hardy, q: f64, u0: f64, cap: f64, cfg: &ShootConfig) -> Result<(RadialProfile, f64)> {
    let sigma = (q - 1.0) * h.nu;
    // natural length of the solution with u(0) = u0
    let len = u0.powf(-(q - 1.0) / (2.0 - sigma));
    let r0 = 1e-4 * len.min(cfg.r_limit);
    let rhs = Rhs::Absorption { q, a: 1.0 };
    let init = frobenius_start(h, &rhs, u0, r0)?;
    let grid = RadialGrid::log(r0, cfg.r_limit, cfg.nodes)?;
    let run = integrate_radial(h, &rhs, r0, init, &grid, &cfg.tol, cap)?;
    let Some(r_cap) = run.cap_radius else {
        return Err(Error::NoBlowUp { r_limit: cfg.r_limit });
    };
    // second pass with nodes accumulating at the cap radius
    let mut pts: Vec<f64> = RadialGrid::log(r0, 0.5 * r_cap, cfg.nodes / 2)?.points().to_vec();
    pts.extend((2..48).map(|k| r_cap * (1.0 - 0.5f64.powi(k))));
    let grid = RadialGrid::new(pts, Spacing::Custom)?;
    let run = integrate_radial(h, &rhs, r0, init, &grid, &cfg.tol, cap)?;
    let grid = RadialGrid::new(run.radii, Spacing::Custom)?;
    Ok((RadialProfile::new(grid, run.values, Some(run.derivs), Meaning::V)?, r_cap))
}

/// Shoot from `u(0) = u0`, `u'(0) = 0` until `u` crosses the cap.
///
/// Near `r*` the solution behaves like `K (r* - r)^{-2/(q-1)}`, so the cap
/// radius misses `r*` by `C cap^{-(q-1)/2}`; two caps eliminate `C`.
pub fn shoot_large(h: &Hardy, q: f64, u0: f64, cfg: &ShootConfig) -> Result<LargeSolution> {
    check_range(h, q)?;
    if !(u0 > 0.0) {
        return Err(domain(format!("initial value {u0} must be positive")));
    }
    let (profile, r1) = shoot_once(h, q, u0, cfg.cap, cfg)?;
    let (_, r2) = shoot_once(h, q, u0, 2.0 * cfg.cap, cfg)?;
    let kappa = 0.5 * (q - 1.0);
    let gap = (r2 - r1) / (1.0 - 2f64.powf(-kappa));
    let blowup_radius = r1 + gap;
    Ok(LargeSolution {
        q,
        profile,
        blowup_radius,
        cap_radius: r1,
        cap_sensitivity: (r2 - r1).abs() / blowup_radius,
        scaled_from: None,
    })
}

/// `U_R(x) = R^{nu - 2/(q-1)} U(x/R)`; blows up at `R r*`.
pub fn rescale_large(h: &Hardy, sol: &LargeSolution, big_r: f64) -> Result<LargeSolution> {
    if !(big_r > 0.0) {
        return Err(domain(format!("scale {big_r} must be positive")));
    }
    let g = -sol.similarity_exponent(h);
    let f = big_r.powf(g);
    let grid = sol.profile.grid.map(|r| big_r * r, sol.profile.grid.spacing())?;
    let values = sol.profile.values.iter().map(|v| f * v).collect();
    let derivs = sol.profile.derivs.as_ref().map(|d| d.iter().map(|v| f / big_r * v).collect());
    let base = sol.scaled_from.map_or(sol.blowup_radius, |(b, _)| b);
    let factor = sol.scaled_from.map_or(big_r, |(_, s)| s * big_r);
    Ok(LargeSolution {
        q: sol.q,
        profile: RadialProfile::new(grid, values, derivs, Meaning::V)?,
        blowup_radius: big_r * sol.blowup_radius,
        cap_radius: big_r * sol.cap_radius,
        cap_sensitivity: sol.cap_sensitivity,
        scaled_from: Some((base, factor)),
    })
}

/// The member of the family that blows up on the unit sphere.
pub fn unit_ball_large(h: &Hardy, sol: &LargeSolution) -> Result<LargeSolution> {
    rescale_large(h, sol, 1.0 / sol.blowup_radius)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    /// `max candidate / U_R` over the candidate nodes inside `B_R`, per `R`.
    pub worst_ratio: Vec<(f64, f64)>,
    /// `U_R(x)` at the probe point, per `R`.
    pub envelope: Vec<(f64, f64)>,
}

/// Check `candidate <= U_R` on each `B_R`, with `U_R` built from the unit-ball
/// member of `base`. Nodes past the cap radius of `U_R` pass trivially.
pub fn liouville_domination_check(
    h: &Hardy,
    base: &LargeSolution,
    candidate: &RadialProfile,
    radii: &[f64],
    probe: f64,
) -> Result<DominationReport> {
    let unit = unit_ball_large(h, base)?;
    let mut worst_ratio = Vec::with_capacity(radii.len());
    let mut envelope = Vec::with_capacity(radii.len());
    for &big_r in radii {
        let u_r = rescale_large(h, &unit, big_r)?;
        let mut worst = 0.0f64;
        for (&r, &c) in candidate.radii().iter().zip(&candidate.values) {
            if r >= big_r {
                break;
            }
            let Some(bound) = u_r.eval(r) else { continue };
            if c > bound * (1.0 + 1e-9) {
                return Err(Error::DominationViolated { radius: big_r, at: r });
            }
            if bound > 0.0 {
                worst = worst.max(c / bound);
            }
        }
        worst_ratio.push((big_r, worst));
        if probe < big_r {
            if let Some(v) = u_r.eval(probe) {
                envelope.push((big_r, v));
            }
        }
    }
    Ok(DominationReport { worst_ratio, envelope })
}

/// `psi(a) = int_a^inf ds / sqrt(H(s))` for `H(s) = M s^{q+1}/(q+1)`:
/// `2 sqrt((q+1)/M) a^{-(q-1)/2} / (q-1)`.
pub fn vazquez_psi(q: f64, m: f64, a: f64) -> Result<f64> {
    if !(q > 1.0 && m > 0.0 && a > 0.0) {
        return Err(domain("psi needs q > 1, M > 0, a > 0"));
    }
    Ok(2.0 * ((q + 1.0) / m).sqrt() * a.powf(-0.5 * (q - 1.0)) / (q - 1.0))
}
