//! Explicit sub- and supersolutions of the absorption equation
//! `v'' + (N-1-2nu)/r v' = A r^{-(q-1)nu} v^q`.

use serde::Serialize;

use super::RadialGrid;
use crate::constants::{q_star, Hardy};
use crate::error::{domain, Result};

/// `V = c2 r^gamma`, `gamma = nu - 2/(q-1)`, an exact solution for `q > q*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactSubsolution {
    pub c2: f64,
    pub gamma: f64,
}

impl ExactSubsolution {
    /// `(V, V', V'')` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let g = self.gamma;
        let v = self.c2 * r.powf(g);
        (v, g * v / r, g * (g - 1.0) * v / (r * r))
    }
}

pub fn exact_subsolution(h: &Hardy, q: f64, a: f64) -> Result<ExactSubsolution> {
    let qs = q_star(h.nu);
    if !(q > qs) {
        return Err(domain(format!("exact power solution needs q > q* = {qs}, got {q}")));
    }
    if !(a > 0.0) {
        return Err(domain("absorption coefficient must be positive"));
    }
    let alpha = h.alpha();
    let g = h.nu - 2.0 / (q - 1.0);
    let c2 = (alpha * g * (g / alpha + 1.0) / a).powf(1.0 / (q - 1.0));
    Ok(ExactSubsolution { c2, gamma: g })
}

/// `W = c [(9/16 - r^2)(r^2 - 1/16)]^{-beta}` on the annulus `1/4 < r < 3/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Barrier {
    pub c: f64,
    pub beta: f64,
}

pub const ANNULUS: (f64, f64) = (0.25, 0.75);

impl Barrier {
    /// `(W, W', W'')` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let (a, b) = (9.0 / 16.0, 1.0 / 16.0);
        let r2 = r * r;
        let phi = (a - r2) * (r2 - b);
        let dphi = 2.0 * r * (a + b - 2.0 * r2);
        let d2phi = 2.0 * (a + b) - 12.0 * r2;
        let be = self.beta;
        let w = self.c * phi.powf(-be);
        let dw = -be * w * dphi / phi;
        let d2w = w * (be * (be + 1.0) * dphi * dphi / (phi * phi) - be * d2phi / phi);
        (w, dw, d2w)
    }
}

/// `W'' + k W'/r - A r^{-(q-1)nu} W^q`; a supersolution has it `<= 0`.
pub fn barrier_supersolution_margin(b: &Barrier, h: &Hardy, q: f64, a: f64, r: f64) -> f64 {
    let k = h.dim() - 1.0 - 2.0 * h.nu;
    let (w, dw, d2w) = b.eval(r);
    d2w + k * dw / r - a * r.powf(-(q - 1.0) * h.nu) * w.powf(q)
}

/// Smallest `c` (to relative 1e-12, by bisection) making `W` a supersolution
/// at every grid node inside the annulus.
pub fn barrier_annulus(h: &Hardy, q: f64, a: f64, beta: f64, grid: &RadialGrid) -> Result<Barrier> {
    if !(beta > 2.0 / (q - 1.0)) {
        return Err(domain(format!("beta = {beta} must exceed 2/(q-1) = {}", 2.0 / (q - 1.0))));
    }
    let nodes: Vec<f64> = grid.points().iter().copied().filter(|&r| r > ANNULUS.0 && r < ANNULUS.1).collect();
    if nodes.is_empty() {
        return Err(domain("grid has no nodes inside the annulus"));
    }
    let ok = |c: f64| {
        let b = Barrier { c, beta };
        nodes.iter().all(|&r| barrier_supersolution_margin(&b, h, q, a, r) <= 0.0)
    };
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(domain("no supersolution constant found"));
        }
    }
    let mut lo = hi;
    while ok(lo) && lo > 1e-300 {
        lo *= 0.5;
    }
    if ok(lo) {
        return Ok(Barrier { c: lo, beta });
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Barrier { c: hi, beta })
}
