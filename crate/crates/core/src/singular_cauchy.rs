//! Solutions of the absorption equation regular at the origin, built by
//! Picard iteration of
//! `w(r) = delta + int_0^r s^{2nu+1-N} int_0^s t^{N-1-(q+1)nu} w(t)^q dt ds`.
//!
//! Swapping the order of integration gives
//! `w(r) = delta + (I_1(r) - r^{-alpha} I_2(r)) / alpha` with
//! `I_1 = int_0^r t^{1-(q-1)nu} w^q` and `I_2 = int_0^r t^{N-1-(q+1)nu} w^q`,
//! both convergent exactly when `q < q*`.

use serde::Serialize;

use crate::constants::{q_star, Hardy};
use crate::error::{domain, Error, Result};
use crate::quad::{self, Coordinate};
use crate::radial_ode::{integrate_radial, Meaning, OdeTolerance, RadialGrid, RadialProfile, Rhs};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PicardConfig {
    pub grid_points: usize,
    pub r_max: f64,
    /// Innermost node is `r_max * r_min_ratio`; `(0, r_min)` is handled in closed form.
    pub r_min_ratio: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub max_halvings: usize,
    /// Coefficient of the absorption term (1 for the equation itself).
    pub coupling: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            grid_points: 2000,
            r_max: 1.0,
            r_min_ratio: 1e-10,
            tol: 1e-13,
            max_iters: 500,
            max_halvings: 20,
            coupling: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardResult {
    pub delta: f64,
    pub q: f64,
    /// `w` with `w'` from the integral representation.
    pub profile: RadialProfile,
    pub iterations: usize,
    /// Ratio of the last two successive sup-distances.
    pub contraction_estimate: f64,
    pub r_max: f64,
    pub halvings: usize,
    /// Every iterate dominated the previous one.
    pub monotone: bool,
    pub distances: Vec<f64>,
}

const GL: [(f64, f64); 6] = [
    (-0.932_469_514_203_152, 0.171_324_492_379_170_35),
    (-0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (-0.238_619_186_083_196_9, 0.467_913_934_572_691),
    (0.238_619_186_083_196_9, 0.467_913_934_572_691),
    (0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (0.932_469_514_203_152, 0.171_324_492_379_170_35),
];

/// Linear map `g (at nodes) -> int_{r_j}^{r_{j+1}} t^e g(t) dt` for each cell,
/// with `g` interpolated by cubics in `log t`.
struct CellRule {
    /// per cell: (first stencil node, four weights)
    cells: Vec<(usize, [f64; 4])>,
}

impl CellRule {
    fn new(r: &[f64], e: f64) -> Self {
        let n = r.len();
        let s: Vec<f64> = r.iter().map(|x| x.ln()).collect();
        let mut cells = Vec::with_capacity(n - 1);
        for j in 0..n - 1 {
            let st = j.saturating_sub(1).min(n - 4);
            let xs = &s[st..st + 4];
            let half = 0.5 * (s[j + 1] - s[j]);
            let mid = 0.5 * (s[j + 1] + s[j]);
            let mut w = [0.0; 4];
            for (x, gw) in GL {
                let sg = mid + half * x;
                // dt = t ds, so the weight is t^{e+1}
                let fac = half * gw * ((e + 1.0) * sg).exp();
                for (k, wk) in w.iter_mut().enumerate() {
                    let mut l = 1.0;
                    for m in 0..4 {
                        if m != k {
                            l *= (sg - xs[m]) / (xs[k] - xs[m]);
                        }
                    }
                    *wk += fac * l;
                }
            }
            cells.push((st, w));
        }
        Self { cells }
    }

    /// Cumulative integrals at every node, starting from `head` at node 0.
    fn cumulative(&self, g: &[f64], head: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(g.len());
        let mut acc = head;
        out.push(acc);
        for (st, w) in &self.cells {
            acc += w[0] * g[*st] + w[1] * g[st + 1] + w[2] * g[st + 2] + w[3] * g[st + 3];
            out.push(acc);
        }
        out
    }
}

struct Attempt {
    w: Vec<f64>,
    dw: Vec<f64>,
    iterations: usize,
    distances: Vec<f64>,
    monotone: bool,
}

fn iterate(h: &Hardy, q: f64, delta: f64, r: &[f64], cfg: &PicardConfig) -> Option<Attempt> {
    let nu = h.nu;
    let alpha = h.alpha();
    let e1 = 1.0 - (q - 1.0) * nu;
    let e2 = h.dim() - 1.0 - (q + 1.0) * nu;
    let rule1 = CellRule::new(r, e1);
    let rule2 = CellRule::new(r, e2);
    let r0 = r[0];
    let c = cfg.coupling;
    let mut w = vec![delta; r.len()];
    let mut distances = Vec::new();
    let mut monotone = true;
    for it in 1..=cfg.max_iters {
        let g: Vec<f64> = w.iter().map(|x| x.powf(q)).collect();
        let head = delta.powf(q);
        let i1 = rule1.cumulative(&g, head * r0.powf(e1 + 1.0) / (e1 + 1.0));
        let i2 = rule2.cumulative(&g, head * r0.powf(e2 + 1.0) / (e2 + 1.0));
        let next: Vec<f64> = r
            .iter()
            .zip(i1.iter().zip(&i2))
            .map(|(&ri, (a, b))| delta + c * (a - ri.powf(-alpha) * b) / alpha)
            .collect();
        if next.iter().any(|x| !x.is_finite() || x.abs() > 1e12 * delta.abs().max(1.0)) {
            return None;
        }
        let scale = next.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut dist = 0.0f64;
        for (a, b) in next.iter().zip(&w) {
            dist = dist.max((a - b).abs());
            if c >= 0.0 && *a < *b - 1e-13 * scale {
                monotone = false;
            }
        }
        distances.push(dist);
        w = next;
        if dist <= cfg.tol * scale {
            // w' = c r^{2nu+1-N} I_2(r)
            let dw = r.iter().zip(&i2).map(|(&ri, b)| c * ri.powf(2.0 * nu + 1.0 - h.dim()) * b).collect();
            return Some(Attempt { w, dw, iterations: it, distances, monotone });
        }
    }
    None
}

pub fn solve_picard(h: &Hardy, q: f64, delta: f64, cfg: &PicardConfig) -> Result<PicardResult> {
    let qs = q_star(h.nu);
    if !(q > 1.0 && q < qs) {
        return Err(domain(format!("Picard map needs 1 < q < q* = {qs}, got {q}")));
    }
    if !(h.dim() - 1.0 - (q + 1.0) * h.nu > -1.0) {
        return Err(domain("inner integral diverges at the origin"));
    }
    if !(delta > 0.0) {
        return Err(domain(format!("delta = {delta} must be positive")));
    }
    let mut r_max = cfg.r_max;
    for halvings in 0..=cfg.max_halvings {
        let grid = RadialGrid::log(r_max * cfg.r_min_ratio, r_max, cfg.grid_points)?;
        // The exact map is order preserving, so iterates that fail to increase
        // mean the window is too close to blow-up for the grid.
        if let Some(a) = iterate(h, q, delta, grid.points(), cfg).filter(|a| a.monotone) {
            let k = a.distances.len();
            let contraction_estimate =
                if k >= 2 && a.distances[k - 2] > 0.0 { a.distances[k - 1] / a.distances[k - 2] } else { 0.0 };
            let profile = RadialProfile::new(grid, a.w, Some(a.dw), Meaning::V)?;
            return Ok(PicardResult {
                delta,
                q,
                profile,
                iterations: a.iterations,
                contraction_estimate,
                r_max,
                halvings,
                monotone: a.monotone,
                distances: a.distances,
            });
        }
        r_max *= 0.5;
    }
    Err(Error::NoContraction { halvings: cfg.max_halvings })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    /// `int_{B} |x|^{-2nu} |grad w|^2`
    pub dirichlet: f64,
    /// `int_{B} |x|^{-(q+1)nu} w^{q+1}`
    pub absorption: f64,
    /// Largest relative change when every other node is dropped.
    pub refinement_change: f64,
}

fn energies(h: &Hardy, q: f64, r: &[f64], w: &[f64], dw: &[f64]) -> Result<(f64, f64)> {
    let n = h.dim();
    let nu = h.nu;
    let fd: Vec<f64> = r.iter().zip(dw).map(|(r, d)| d * d * r.powf(n - 1.0 - 2.0 * nu)).collect();
    let fa: Vec<f64> = r.iter().zip(w).map(|(r, x)| x.powf(q + 1.0) * r.powf(n - 1.0 - (q + 1.0) * nu)).collect();
    let om = h.omega();
    Ok((om * quad::samples(r, &fd, Coordinate::Log, true)?, om * quad::samples(r, &fa, Coordinate::Log, true)?))
}

pub fn energy_check(h: &Hardy, res: &PicardResult) -> Result<EnergyReport> {
    let r = res.profile.radii();
    let w = &res.profile.values;
    let dw = res.profile.derivative();
    let (d, a) = energies(h, res.q, r, w, &dw)?;
    // keep the last node so both rules span the same interval
    let pick = |v: &[f64]| -> Vec<f64> {
        let mut out: Vec<f64> = v.iter().rev().step_by(2).copied().collect();
        out.reverse();
        out
    };
    let (dc, ac) = energies(h, res.q, &pick(r), &pick(w), &pick(&dw))?;
    let change = ((d - dc) / d).abs().max(((a - ac) / a).abs());
    if !(change < 1e-2) || !d.is_finite() || !a.is_finite() {
        return Err(Error::DivergentEnergy { change });
    }
    Ok(EnergyReport { dirichlet: d, absorption: a, refinement_change: change })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossValidation {
    pub r0: f64,
    pub max_rel_deviation: f64,
    pub nodes: usize,
}

/// Restart the radial ODE from the Picard solution at the first node beyond
/// `r0_fraction * r_max` and compare on the rest of the grid.
pub fn cross_validate_ode(
    h: &Hardy,
    res: &PicardResult,
    r0_fraction: f64,
    tol: &OdeTolerance,
    coupling: f64,
) -> Result<CrossValidation> {
    let r = res.profile.radii();
    let i0 = r.iter().position(|&x| x >= r0_fraction * res.r_max).unwrap_or(0);
    let dw = res.profile.derivative();
    let grid = RadialGrid::new(r[i0..].to_vec(), crate::radial_ode::Spacing::Log)?;
    let run = integrate_radial(
        h,
        &Rhs::Absorption { q: res.q, a: coupling },
        r[i0],
        (res.profile.values[i0], dw[i0]),
        &grid,
        tol,
        1e12,
    )?;
    let mut dev = 0.0f64;
    for (k, v) in run.values.iter().enumerate() {
        let w = res.profile.values[i0 + k];
        dev = dev.max((v - w).abs() / w.abs());
    }
    Ok(CrossValidation { r0: r[i0], max_rel_deviation: dev, nodes: run.values.len() })
}

/// First radius (among `upper`'s nodes inside `lower`'s range) where
/// `upper < lower`, if any.
pub fn domination_failure(upper: &RadialProfile, lower: &RadialProfile, rel_tol: f64) -> Option<f64> {
    for (&r, &u) in upper.radii().iter().zip(&upper.values) {
        if let Some(l) = lower.interpolate(r) {
            if u < l - rel_tol * l.abs() {
                return Some(r);
            }
        }
    }
    None
}
