//! Dormand-Prince 5(4) with step control, landing exactly on output nodes.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeTolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for OdeTolerance {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-8 }
    }
}

impl OdeTolerance {
    pub fn uniform(tol: f64) -> Self {
        Self { abs: tol, rel: tol }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stop<const D: usize> {
    Done,
    /// Component crossed the cap between `x_lo` and `x_hi`; `y_lo` is below it.
    Cap {
        x_lo: f64,
        x_hi: f64,
        y_lo: [f64; D],
    },
    Underflow {
        x: f64,
        y: [f64; D],
    },
}

#[derive(Debug, Clone)]
pub struct Path<const D: usize> {
    pub xs: Vec<f64>,
    pub ys: Vec<[f64; D]>,
    pub stop: Stop<D>,
    pub steps: usize,
}

/// Stop when `|y[index]| > value`.
#[derive(Debug, Clone, Copy)]
pub struct Cap {
    pub index: usize,
    pub value: f64,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

fn step<const D: usize, F: Fn(f64, &[f64; D]) -> [f64; D]>(
    f: &F,
    x: f64,
    y: &[f64; D],
    h: f64,
    tol: &OdeTolerance,
) -> ([f64; D], f64) {
    let mut k = [[0.0; D]; 7];
    k[0] = f(x, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for d in 0..D {
                    ys[d] += h * a * kj[d];
                }
            }
        }
        if s == 6 {
            // the last stage is evaluated at the new solution
            k[6] = f(x + h, &ys);
            let mut err = 0.0f64;
            for d in 0..D {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[d];
                }
                let sc = tol.abs + tol.rel * y[d].abs().max(ys[d].abs());
                err = err.max((h * e / sc).abs());
            }
            if ys.iter().any(|v| !v.is_finite()) {
                err = f64::INFINITY;
            }
            return (ys, err);
        }
        k[s] = f(x + C[s] * h, &ys);
    }
    unreachable!()
}

/// Integrate from `(x0, y0)` through `targets` (monotone, on one side of `x0`).
pub fn solve<const D: usize, F: Fn(f64, &[f64; D]) -> [f64; D]>(
    f: &F,
    x0: f64,
    y0: [f64; D],
    targets: &[f64],
    tol: &OdeTolerance,
    cap: Option<Cap>,
) -> Path<D> {
    let mut xs = Vec::with_capacity(targets.len());
    let mut ys = Vec::with_capacity(targets.len());
    let mut steps = 0usize;
    if targets.is_empty() {
        return Path { xs, ys, stop: Stop::Done, steps };
    }
    let dir = if targets[targets.len() - 1] >= x0 { 1.0 } else { -1.0 };
    let mut x = x0;
    let mut y = y0;
    let span = (targets[targets.len() - 1] - x0).abs();
    let mut h = (1e-3 * span).max(1e-6 * x0.abs()).max(1e-300);
    for &xt in targets {
        if (xt - x) * dir < 0.0 {
            continue;
        }
        if xt == x {
            xs.push(x);
            ys.push(y);
            continue;
        }
        loop {
            let remaining = (xt - x).abs();
            let last = h >= remaining;
            let hs = if last { remaining } else { h };
            let floor = 1e-14 * x.abs().max(1e-300);
            if hs < floor && !last {
                return Path { xs, ys, stop: Stop::Underflow { x, y }, steps };
            }
            let (yn, err) = step(f, x, &y, dir * hs, tol);
            steps += 1;
            if err <= 1.0 {
                if let Some(c) = cap {
                    if yn[c.index].abs() > c.value || !yn[c.index].is_finite() {
                        let (lo, hi, ylo) = bracket_cap(f, x, y, dir * hs, tol, c);
                        return Path { xs, ys, stop: Stop::Cap { x_lo: lo, x_hi: hi, y_lo: ylo }, steps };
                    }
                }
                x = if last { xt } else { x + dir * hs };
                y = yn;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || fac < 1.0 {
                    h = hs * fac;
                }
                if last {
                    break;
                }
            } else {
                let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h = hs * fac;
                if h < floor {
                    return Path { xs, ys, stop: Stop::Underflow { x, y }, steps };
                }
            }
        }
        xs.push(x);
        ys.push(y);
    }
    Path { xs, ys, stop: Stop::Done, steps }
}

/// Shrink the step that crossed the cap until the crossing is bracketed to
/// relative width 1e-12.
fn bracket_cap<const D: usize, F: Fn(f64, &[f64; D]) -> [f64; D]>(
    f: &F,
    x: f64,
    y: [f64; D],
    h: f64,
    tol: &OdeTolerance,
    cap: Cap,
) -> (f64, f64, [f64; D]) {
    let (mut lo, mut hi) = (0.0f64, h);
    let mut xl = x;
    let mut yl = y;
    while (hi - lo).abs() > 1e-12 * (x + hi).abs().max(1e-300) {
        let mid = 0.5 * (lo + hi);
        // sub-steps of an accepted step are at least as accurate
        let (ym, _) = step(f, xl, &yl, mid - lo, tol);
        if ym[cap.index].abs() > cap.value || !ym[cap.index].is_finite() {
            hi = mid;
        } else {
            xl = x + mid;
            yl = ym;
            lo = mid;
        }
    }
    let (a, b) = if h > 0.0 { (x + lo, x + hi) } else { (x + hi, x + lo) };
    (a, b, yl)
}
