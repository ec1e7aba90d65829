//! Quadrature helpers.
//!
//! `integrate` is a tanh-sinh rule with a relative error check;
//! `samples` integrates tabulated data on a radial grid (cubic interpolation
//! per cell, power-law head on `(0, r0)`).

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Tanh-sinh integral of `f` over `[a, b]`. Endpoint singularities of power
/// type are fine; interior features should be split out by the caller.
///
/// Nodes are placed by their distance to the nearer endpoint, so a singular
/// endpoint at the origin is sampled without cancellation.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, rel_tol).map(|v| -v);
    }
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        // distance from the endpoint: half * (1 - tanh|u|)
        let d = (b - a) / ((2.0 * u.abs()).exp() + 1.0);
        let c = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (c * c);
        if d == 0.0 || !w.is_finite() || w == 0.0 {
            return 0.0;
        }
        let x = if t < 0.0 { a + d } else { b - d };
        let y = f(x);
        if y.is_finite() {
            w * y
        } else {
            0.0
        }
    };
    let tmax = 6.5;
    let mut h = 1.0;
    let mut sum = eval(0.0);
    let mut k = 1.0;
    while k * h <= tmax {
        sum += eval(k * h) + eval(-k * h);
        k += 1.0;
    }
    let mut prev = sum * h;
    let tol = rel_tol.max(1e-15);
    for _level in 0..9 {
        h *= 0.5;
        let mut add = 0.0;
        let mut t = h;
        while t <= tmax {
            add += eval(t) + eval(-t);
            t += 2.0 * h;
        }
        sum += add;
        let cur = sum * h;
        let diff = (cur - prev).abs();
        if diff <= tol * cur.abs() || (cur == 0.0 && diff == 0.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!("[{a}, {b}]: no convergence, last estimate {prev}")))
}

/// Sum of `integrate` over consecutive breakpoints.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rel_tol: f64) -> Result<f64> {
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += integrate(&f, w[0], w[1], rel_tol)?;
    }
    Ok(total)
}

/// Integral over `[a, inf)`, split at `a + scale`; the tail uses `x = a + scale / t`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, rel_tol: f64) -> Result<f64> {
    let head = integrate(&f, a, a + scale, rel_tol)?;
    let tail = integrate(
        |t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            let x = a + scale / t;
            f(x) * scale / (t * t)
        },
        0.0,
        1.0,
        rel_tol,
    )?;
    Ok(head + tail)
}

/// Abscissa used for interpolation on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    Linear,
    Log,
}

const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
    (-0.339_981_043_584_856_26, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_26, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
];

/// Integral of tabulated `values` over `[radii[0], radii[last]]`, plus the
/// head `(0, radii[0])` when `with_head` is set. The head assumes a pure
/// power law through the first two nodes.
pub fn samples(radii: &[f64], values: &[f64], coord: Coordinate, with_head: bool) -> Result<f64> {
    let n = radii.len();
    if n != values.len() || n < 4 {
        return Err(Error::InsufficientPoints { got: n.min(values.len()), needed: 4 });
    }
    if coord == Coordinate::Log && radii[0] <= 0.0 {
        return Err(Error::Domain("log coordinate needs positive radii".into()));
    }
    let x: Vec<f64> = match coord {
        Coordinate::Linear => radii.to_vec(),
        Coordinate::Log => radii.iter().map(|r| r.ln()).collect(),
    };
    // In log coordinates the integrand picks up the Jacobian dr = r ds.
    let g: Vec<f64> = match coord {
        Coordinate::Linear => values.to_vec(),
        Coordinate::Log => values.iter().zip(radii).map(|(v, r)| v * r).collect(),
    };
    let mut total = 0.0;
    for i in 0..n - 1 {
        let s = i.saturating_sub(1).min(n - 4);
        let (xa, xb) = (x[i], x[i + 1]);
        let half = 0.5 * (xb - xa);
        let mid = 0.5 * (xa + xb);
        let mut cell = 0.0;
        for (t, w) in GL4 {
            let xt = mid + half * t;
            cell += w * lagrange4(&x[s..s + 4], &g[s..s + 4], xt);
        }
        total += half * cell;
    }
    if with_head && radii[0] > 0.0 {
        total += power_head(radii[0], values[0], radii[1], values[1])?;
    }
    Ok(total)
}

/// `int_0^{r0} f` for `f = c r^m` fitted through two nodes.
pub fn power_head(r0: f64, f0: f64, r1: f64, f1: f64) -> Result<f64> {
    if f0 == 0.0 {
        return Ok(0.0);
    }
    if f1 == 0.0 || f0.signum() != f1.signum() {
        return Ok(0.5 * f0 * r0);
    }
    let m = (f1 / f0).ln() / (r1 / r0).ln();
    if m <= -1.0 {
        return Err(Error::NonIntegrableTail { exponent: m });
    }
    Ok(f0 * r0 / (m + 1.0))
}

pub(crate) fn lagrange4(x: &[f64], y: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..4 {
        let mut l = 1.0;
        for k in 0..4 {
            if k != j {
                l *= (t - x[k]) / (x[j] - x[k]);
            }
        }
        acc += l * y[j];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_sinh_handles_endpoint_power() {
        let v = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_rational() {
        let v = integrate_to_infinity(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn samples_fourth_order_on_uniform_grid() {
        let err = |m: usize| {
            let r: Vec<f64> = (1..=m).map(|i| i as f64 / m as f64).collect();
            let v: Vec<f64> = r.iter().map(|x| x.sin()).collect();
            (samples(&r, &v, Coordinate::Linear, true).unwrap() - (1.0 - 1f64.cos())).abs()
        };
        let ratio = err(40) / err(80);
        assert!(ratio > 10.0, "ratio {ratio}");
    }

    #[test]
    fn samples_exact_for_power_on_log_grid_head() {
        let r: Vec<f64> = (0..800).map(|i| 1e-6 * 1.02f64.powi(i)).collect();
        let v: Vec<f64> = r.iter().map(|x| x.powf(0.3)).collect();
        let top = *r.last().unwrap();
        let exact = top.powf(1.3) / 1.3;
        let got = samples(&r, &v, Coordinate::Log, true).unwrap();
        assert!((got / exact - 1.0).abs() < 1e-8, "{}", got / exact - 1.0);
    }

    #[test]
    fn head_rejects_non_integrable() {
        assert!(matches!(power_head(1e-3, 1e3, 2e-3, 1e3 * 2f64.powf(-1.5)), Err(Error::NonIntegrableTail { .. })));
    }
}
