use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quad::{self, Coordinate};

/// How the nodes were laid out; decides the interpolation coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Spacing {
    Uniform,
    Log,
    Custom,
}

/// Strictly increasing abscissae, at least 8 of them.
///
/// For radial profiles these are radii and the first may be 0 (finite element
/// meshes keep the center node). The log-time variable `s` may be negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid {
    points: Vec<f64>,
    spacing: Spacing,
}

pub const MIN_NODES: usize = 8;

impl RadialGrid {
    pub fn new(points: Vec<f64>, spacing: Spacing) -> Result<Self> {
        if points.len() < MIN_NODES {
            return Err(Error::InsufficientPoints { got: points.len(), needed: MIN_NODES });
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(domain("grid contains a non-finite node"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("grid must be strictly increasing"));
        }
        Ok(Self { points, spacing })
    }

    /// `n` nodes `r_max * i / n`, `i = 1..=n`.
    pub fn uniform(r_max: f64, n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| r_max * i as f64 / n as f64).collect(), Spacing::Uniform)
    }

    /// `n` geometrically spaced nodes from `r_min` to `r_max`.
    pub fn log(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min) {
            return Err(domain(format!("log grid needs 0 < r_min < r_max, got {r_min}, {r_max}")));
        }
        let step = (r_max / r_min).ln() / (n as f64 - 1.0);
        let mut pts: Vec<f64> = (0..n).map(|i| r_min * (step * i as f64).exp()).collect();
        pts[n - 1] = r_max;
        Self::new(pts, Spacing::Log)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Map every node through `f`; reverses order if `f` is decreasing.
    pub fn map(&self, f: impl Fn(f64) -> f64, spacing: Spacing) -> Result<Self> {
        let mut pts: Vec<f64> = self.points.iter().map(|&x| f(x)).collect();
        if pts.len() > 1 && pts[1] < pts[0] {
            pts.reverse();
        }
        Self::new(pts, spacing)
    }

    pub(crate) fn coordinate(&self) -> Coordinate {
        if self.spacing == Spacing::Log && self.points[0] > 0.0 {
            Coordinate::Log
        } else {
            Coordinate::Linear
        }
    }
}

/// Which function a profile holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Meaning {
    /// Solution of the Hardy form, singular like `r^{-nu}`.
    U,
    /// Weighted form `v = r^nu u`.
    V,
    /// Emden-Fowler variable `y(t)`, `t = (alpha/r)^alpha`.
    Y,
    /// Log time `x(s) = y(e^s)`.
    X,
    /// Variational profile on a dilated ball.
    W,
    /// Blow-up rescaling.
    Z,
}

/// Samples of a radial function, optionally with its derivative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub derivs: Option<Vec<f64>>,
    pub meaning: Meaning,
}

impl RadialProfile {
    pub fn new(grid: RadialGrid, values: Vec<f64>, derivs: Option<Vec<f64>>, meaning: Meaning) -> Result<Self> {
        if values.len() != grid.len() || derivs.as_ref().is_some_and(|d| d.len() != grid.len()) {
            return Err(domain("profile length does not match grid"));
        }
        Ok(Self { grid, values, derivs, meaning })
    }

    /// Tabulate `f(r) -> (value, derivative)` on `grid`.
    pub fn from_fn(grid: RadialGrid, meaning: Meaning, f: impl Fn(f64) -> (f64, f64)) -> Self {
        let (values, derivs): (Vec<f64>, Vec<f64>) = grid.points().iter().map(|&r| f(r)).unzip();
        Self { grid, values, derivs: Some(derivs), meaning }
    }

    pub fn radii(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Value at `r` by cubic Hermite (with derivatives) or four-point Lagrange
    /// interpolation; `None` outside the grid.
    pub fn interpolate(&self, r: f64) -> Option<f64> {
        let x = self.radii();
        let n = x.len();
        if !(r >= x[0] && r <= x[n - 1]) {
            return None;
        }
        let i = match x.binary_search_by(|p| p.partial_cmp(&r).unwrap()) {
            Ok(i) => return Some(self.values[i]),
            Err(i) => i - 1,
        };
        if let Some(d) = &self.derivs {
            let h = x[i + 1] - x[i];
            let t = (r - x[i]) / h;
            let (t2, t3) = (t * t, t * t * t);
            let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
            let h10 = t3 - 2.0 * t2 + t;
            let h01 = -2.0 * t3 + 3.0 * t2;
            let h11 = t3 - t2;
            return Some(h00 * self.values[i] + h10 * h * d[i] + h01 * self.values[i + 1] + h11 * h * d[i + 1]);
        }
        let s = i.saturating_sub(1).min(n - 4);
        let (xs, rr): (Vec<f64>, f64) = match self.grid.coordinate() {
            Coordinate::Log => (x[s..s + 4].iter().map(|v| v.ln()).collect(), r.ln()),
            Coordinate::Linear => (x[s..s + 4].to_vec(), r),
        };
        Some(quad::lagrange4(&xs, &self.values[s..s + 4], rr))
    }

    /// Derivative by the stored column, or centered differences otherwise.
    pub fn derivative(&self) -> Vec<f64> {
        if let Some(d) = &self.derivs {
            return d.clone();
        }
        finite_difference(self.radii(), &self.values)
    }
}

/// Second-order derivative on a non-uniform grid (one-sided at the ends).
pub fn finite_difference(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = vec![0.0; n];
    for i in 0..n {
        let (a, b, c) = if i == 0 {
            (0, 1, 2)
        } else if i == n - 1 {
            (n - 3, n - 2, n - 1)
        } else {
            (i - 1, i, i + 1)
        };
        let (x0, x1, x2) = (x[a], x[b], x[c]);
        let t = x[i];
        d[i] = y[a] * (2.0 * t - x1 - x2) / ((x0 - x1) * (x0 - x2))
            + y[b] * (2.0 * t - x0 - x2) / ((x1 - x0) * (x1 - x2))
            + y[c] * (2.0 * t - x0 - x1) / ((x2 - x0) * (x2 - x1));
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::new(vec![1.0; 8], Spacing::Custom).is_err());
        assert!(RadialGrid::uniform(1.0, 7).is_err());
        let g = RadialGrid::log(1e-3, 1.0, 20).unwrap();
        assert_eq!(g.last(), 1.0);
        assert!((g.first() - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let g = RadialGrid::uniform(2.0, 16).unwrap();
        let f = |r: f64| 1.0 + r - 0.5 * r * r + 0.1 * r * r * r;
        let p = RadialProfile::new(g.clone(), g.points().iter().map(|&r| f(r)).collect(), None, Meaning::V).unwrap();
        for r in [0.13, 0.77, 1.5, 1.99] {
            assert!((p.interpolate(r).unwrap() - f(r)).abs() < 1e-13);
        }
        assert!(p.interpolate(2.5).is_none());
    }

    #[test]
    fn finite_difference_exact_for_quadratics() {
        let x = vec![0.1, 0.3, 0.35, 0.9, 1.4, 2.0, 2.2, 3.0];
        let y: Vec<f64> = x.iter().map(|t| 2.0 * t * t - t).collect();
        let d = finite_difference(&x, &y);
        for (t, dv) in x.iter().zip(d) {
            assert!((dv - (4.0 * t - 1.0)).abs() < 1e-12);
        }
    }
}
