//! The blow-up family for `p = 2*-1` on a ball.
//!
//! For `-div(|x|^{-2nu} grad v) = |x|^{-(p+1)nu} v^p - eps |x|^{-(q+1)nu} v^q`
//! on `B_R` with `v = 0` on the sphere, the solutions concentrate at the origin
//! as `eps -> 0`. With `gamma = |v|_inf^{-2/alpha}` the rescaled profile
//! `z(x) = gamma^{alpha/2} v(gamma x)` tends to the bubble `Z` with `Z(0) = 1`.
//!
//! Each member is seeded by the constrained minimizer of the variational
//! module and then polished by shooting: `z(0) = 1` solves
//! `z'' + (N-1-2nu)/r z' = -r^{-(p-1)nu} z^p + delta r^{-(q-1)nu} z^q`,
//! its first zero `R_z` fixes the dilation `R / R_z`, and `delta` is tuned
//! until the dilated solution carries the requested `eps`.

use serde::Serialize;

use crate::constants::{limit_z_profile, Hardy, ProblemParams};
use crate::error::{domain, Error, Result};
use crate::extended;
use crate::greenfn::{green_ball, robin_function};
use crate::pohozaev::{pohozaev_coefficient, pohozaev_v_weighted};
use crate::quad;
use crate::radial_ode::{
    frobenius_start, solve_ode, spow, Cap, Meaning, OdeTolerance, RadialGrid, RadialProfile, Rhs, Spacing, Stop,
};
use crate::variational::{minimize_on_manifold, FunctionalKind, FunctionalSpec, MinimizeOptions};

/// Default family: halving from `1e-3`. Above about `1e-2` the minimizer
/// peaks away from the origin and the rate sequence has not entered its
/// asymptotic regime.
pub const DEFAULT_EPS: [f64; 6] = [1e-3, 5e-4, 2.5e-4, 1.25e-4, 6.25e-5, 3.125e-5];

/// Largest relative mismatch between the seeded and the polished sup norm.
const SEED_MISMATCH: f64 = 0.05;

/// Smallest radius of the shooting grid, relative to the zero.
const INNER: f64 = 1e-7;
const START: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupConfig {
    /// Ball radius.
    pub radius: f64,
    /// Nodes of the seeding minimization.
    pub fem_nodes: usize,
    /// Nodes per decade of the output profiles.
    pub per_decade: usize,
    pub ode_tol: f64,
}

impl Default for BlowupConfig {
    fn default() -> Self {
        Self { radius: 1.0, fem_nodes: 2000, per_decade: 200, ode_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupPoint {
    pub eps: f64,
    pub sup_norm: f64,
    /// `sup_norm^{-2/alpha}`
    pub gamma: f64,
    pub v: RadialProfile,
    pub z: RadialProfile,
    /// Absorption coefficient of the normalized shooting problem.
    pub delta: f64,
    /// Sup norm predicted by the seeding minimizer.
    pub seed_sup_norm: f64,
    /// `int |x|^{-(p+1)nu} v^{p+1}` over the ball.
    pub p_mass: f64,
}

/// Checks the range where the blow-up rate analysis applies: `p = 2*-1 < q < (1+nu)/nu`
/// and `0 < nu < (N-2)/4`. The two bounds on `nu` and `q` leave nothing for
/// `N = 4`, so the suite runs in dimension five or more.
pub fn check_admissible(params: &ProblemParams) -> Result<()> {
    let h = &params.hardy;
    let n = h.dim();
    if !params.p_is_critical() {
        return Err(domain(format!("p = {} must equal 2*-1 = {}", params.p, h.two_star() - 1.0)));
    }
    if !(h.nu > 0.0 && h.nu < 0.25 * (n - 2.0)) {
        return Err(domain(format!("nu = {} must lie in (0, (N-2)/4)", h.nu)));
    }
    let top = (1.0 + h.nu) / h.nu;
    if !(params.q > params.p && params.q < top) {
        return Err(domain(format!("q = {} must lie in ({}, {top})", params.q, params.p)));
    }
    Ok(())
}

/// Exponent `e = ((N+2) - q(N-2))/2`: the dilation `v -> k^{alpha/2} v(k x)`
/// multiplies `eps` by `k^e`.
pub fn eps_dilation_exponent(params: &ProblemParams) -> f64 {
    let n = params.hardy.dim();
    0.5 * ((n + 2.0) - params.q * (n - 2.0))
}

/// `(q(N-2) - (N+2) + 2 alpha)/alpha`, the power of the sup norm in the rate.
pub fn rate_exponent(params: &ProblemParams) -> f64 {
    let h = &params.hardy;
    let (n, a) = (h.dim(), h.alpha());
    (params.q * (n - 2.0) - (n + 2.0) + 2.0 * a) / a
}

struct Shot {
    /// First zero of `z`.
    zero: f64,
    /// `z'` there.
    slope: f64,
}

fn shooting_rhs(params: &ProblemParams, delta: f64) -> Rhs {
    Rhs::Full { p: params.p, q: params.q, lambda: 1.0, eps: delta }
}

fn field(h: &Hardy, rhs: Rhs) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let k = h.dim() - 1.0 - 2.0 * h.nu;
    let terms = rhs.terms(h.nu);
    move |r: f64, y: &[f64; 2]| {
        let mut s = -k * y[1] / r;
        for t in &terms {
            s += t.coef * r.powf(-t.sigma) * spow(y[0], t.power);
        }
        [y[1], s]
    }
}

/// First zero of the normalized solution, or `None` if it stays positive
/// out to `r_max`.
fn shoot(params: &ProblemParams, delta: f64, tol: &OdeTolerance, r_max: f64) -> Result<Option<Shot>> {
    let h = &params.hardy;
    let rhs = shooting_rhs(params, delta);
    let f = field(h, rhs);
    let init = frobenius_start(h, &rhs, 1.0, START)?;
    let (mut r, mut y) = (START, [init.0, init.1]);
    // a decade at a time, twenty nodes each
    while r < r_max {
        let targets: Vec<f64> = (1..=20).map(|i| r * 10f64.powf(i as f64 / 20.0)).collect();
        // past the zero the source changes sign and the solution can run
        // off to minus infinity; the cap stops it first
        let path = solve_ode(&f, r, y, &targets, tol, Some(Cap { index: 0, value: 1e6 }));
        let (mut r0, mut y0) = (r, y);
        for (x, yy) in path.xs.iter().zip(&path.ys) {
            if yy[0] <= 0.0 {
                return newton_zero(&f, r0, y0, *x, tol).map(Some);
            }
            r0 = *x;
            y0 = *yy;
        }
        match path.stop {
            Stop::Done => {}
            Stop::Cap { x_hi, y_lo, .. } if y_lo[0] > 0.0 && path.ys.last().is_none_or(|y| y[0] > 0.0) => {
                return newton_zero(&f, r0, y0, x_hi, tol).map(Some);
            }
            Stop::Cap { x_lo, .. } => return Err(Error::StepUnderflow { r: x_lo }),
            Stop::Underflow { x, .. } => return Err(Error::StepUnderflow { r: x }),
        }
        r = r0;
        y = y0;
    }
    Ok(None)
}

/// Zero between `r0` (where `z > 0`) and `r1` by Newton steps re-integrated
/// from `r0`, falling back to bisection.
fn newton_zero<F: Fn(f64, &[f64; 2]) -> [f64; 2]>(
    f: &F,
    r0: f64,
    y0: [f64; 2],
    r1: f64,
    tol: &OdeTolerance,
) -> Result<Shot> {
    let at = |x: f64| -> [f64; 2] {
        if x == r0 {
            return y0;
        }
        solve_ode(f, r0, y0, &[x], tol, None).ys.last().copied().unwrap_or([f64::NAN; 2])
    };
    let (mut lo, mut hi) = (r0, r1);
    let mut x = r0 - y0[0] / y0[1];
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..60 {
        let y = at(x);
        if y[0] > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo) < 1e-15 * hi || y[0] == 0.0 {
            return Ok(Shot { zero: x, slope: y[1] });
        }
        let step = x - y[0] / y[1];
        let next = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if (next - x).abs() < 1e-15 * x {
            let y = at(next);
            return Ok(Shot { zero: next, slope: y[1] });
        }
        x = next;
    }
    Err(Error::Quadrature(format!("zero of the shooting solution not located near r = {x}")))
}

/// `eps` carried by the dilation of the normalized solution onto `B_R`, with
/// the sup norm of the dilated profile at the origin.
fn eps_of_delta(params: &ProblemParams, delta: f64, radius: f64, tol: &OdeTolerance) -> Result<Option<(f64, f64)>> {
    let e = eps_dilation_exponent(params);
    let a = params.hardy.alpha();
    Ok(shoot(params, delta, tol, 1e8)?.map(|s| {
        let k = s.zero / radius;
        (delta * k.powf(e), k.powf(0.5 * a))
    }))
}

/// Seed: the constrained minimizer on `B_rho` with unit absorption, moved to
/// the normalized problem on `B_R`. Returns `(eps, v(0))` of the seed.
fn seed(params: &ProblemParams, rho: f64, cfg: &BlowupConfig) -> Result<(f64, f64, f64)> {
    let (p, q) = (params.p, params.q);
    let unit = ProblemParams::with_hardy(params.hardy, p, q, 1.0)?;
    let spec = FunctionalSpec::new(FunctionalKind::FhatOnManifold, unit, rho, cfg.fem_nodes)?;
    let res = minimize_on_manifold(&spec, &MinimizeOptions { tol: 1e-7, ..Default::default() })?;
    let lambda = res.multiplier;
    // u = lambda^{1/(p-1)} w has unit source and eps = lambda^{-(q-1)/(p-1)};
    // then dilate by k = rho/R
    let k = rho / cfg.radius;
    let a = params.hardy.alpha();
    let eps = lambda.powf(-(q - 1.0) / (p - 1.0)) * k.powf(eps_dilation_exponent(params));
    let v0 = lambda.powf(1.0 / (p - 1.0)) * res.profile.values[0] * k.powf(0.5 * a);
    Ok((eps, v0, lambda))
}

/// Solve the member with the given `eps` on the minimizing branch.
pub fn solve_point(params: &ProblemParams, eps: f64, cfg: &BlowupConfig) -> Result<BlowupPoint> {
    check_admissible(params)?;
    if !(eps > 0.0) {
        return Err(domain(format!("eps = {eps} must be positive")));
    }
    let tol = OdeTolerance::uniform(cfg.ode_tol);
    let e = eps_dilation_exponent(params);
    let a = params.hardy.alpha();
    // seed ball: eps scales like rho^e at fixed multiplier; two passes
    let mut rho = 1.0;
    let mut seeded = seed(params, rho, cfg)?;
    for _ in 0..2 {
        rho *= (eps / seeded.0).powf(1.0 / e);
        seeded = seed(params, rho, cfg)?;
    }
    let (eps_seed, v0_seed, _) = seeded;
    // delta of the seed: v(0) = k^{alpha/2} with k = R_z / R and eps = delta k^e
    let k_seed = v0_seed.powf(2.0 / a);
    let delta_seed = eps_seed * k_seed.powf(-e);
    let target = eps.ln();
    let g = |d: f64| -> Result<f64> {
        match eps_of_delta(params, d, cfg.radius, &tol)? {
            Some((x, _)) => Ok(x.ln() - target),
            None => Err(Error::ResolutionLimit(format!("no zero for delta = {d}"))),
        }
    };
    // secant in log delta
    let (mut x0, mut x1) = (delta_seed.ln(), delta_seed.ln() + 0.05);
    let (mut g0, mut g1) = (g(x0.exp())?, g(x1.exp())?);
    for _ in 0..60 {
        if g1.abs() < 1e-13 {
            break;
        }
        let x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
        let x2 = x2.clamp(x1 - 1.0, x1 + 1.0);
        x0 = x1;
        g0 = g1;
        x1 = x2;
        g1 = g(x1.exp())?;
    }
    if g1.abs() > 1e-10 {
        return Err(Error::ResolutionLimit(format!("shooting did not reach eps = {eps} (log gap {g1})")));
    }
    let delta = x1.exp();
    let shot = shoot(params, delta, &tol, 1e8)?.ok_or_else(|| Error::ResolutionLimit("lost the zero".into()))?;
    let point = build_point(params, eps, delta, &shot, cfg, &tol)?;
    if (point.sup_norm / v0_seed - 1.0).abs() > SEED_MISMATCH {
        return Err(Error::ResolutionLimit(format!(
            "polished sup norm {} left the seeded branch ({v0_seed})",
            point.sup_norm
        )));
    }
    Ok(BlowupPoint { seed_sup_norm: v0_seed, ..point })
}

fn build_point(
    params: &ProblemParams,
    eps: f64,
    delta: f64,
    shot: &Shot,
    cfg: &BlowupConfig,
    tol: &OdeTolerance,
) -> Result<BlowupPoint> {
    let h = &params.hardy;
    let a = h.alpha();
    let rz = shot.zero;
    let decades = -INNER.log10();
    let m = (decades * cfg.per_decade as f64).ceil() as usize;
    let mut t: Vec<f64> = vec![0.0];
    t.extend((0..=m).map(|i| INNER * 10f64.powf(decades * i as f64 / m as f64)));
    *t.last_mut().unwrap() = 1.0;
    let rhs = shooting_rhs(params, delta);
    let f = field(h, rhs);
    let init = frobenius_start(h, &rhs, 1.0, START)?;
    let targets: Vec<f64> = t[1..t.len() - 1].iter().map(|s| s * rz).collect();
    let path = solve_ode(&f, START, [init.0, init.1], &targets, tol, None);
    if path.xs.len() != targets.len() {
        return Err(Error::StepUnderflow { r: *path.xs.last().unwrap_or(&START) });
    }
    let mut zs: Vec<f64> = vec![1.0];
    let mut dzs: Vec<f64> = vec![0.0];
    zs.extend(path.ys.iter().map(|y| y[0]));
    dzs.extend(path.ys.iter().map(|y| y[1]));
    zs.push(0.0);
    dzs.push(shot.slope);
    // dilate onto B_R: v(x) = k^{alpha/2} zn(k x), k = R_z / R
    let k = rz / cfg.radius;
    let fv = k.powf(0.5 * a);
    let grid_v = RadialGrid::new(t.iter().map(|s| s * cfg.radius).collect(), Spacing::Custom)?;
    let v = RadialProfile::new(
        grid_v,
        zs.iter().map(|x| fv * x).collect(),
        Some(dzs.iter().map(|x| fv * k * x).collect()),
        Meaning::V,
    )?;
    let sup_norm = v.sup_norm();
    let gamma = sup_norm.powf(-2.0 / a);
    let z = v_to_z(h, &v, gamma)?;
    let inner = positive_part(&v)?;
    let p_mass = weighted_power_integral(h, &inner, params.p)?;
    Ok(BlowupPoint { eps, sup_norm, gamma, v, z, delta, seed_sup_norm: f64::NAN, p_mass })
}

/// Members for each `eps`, in input order.
pub fn solve_family(params: &ProblemParams, eps: &[f64], cfg: &BlowupConfig) -> Result<Vec<BlowupPoint>> {
    eps.iter().map(|&e| solve_point(params, e, cfg)).collect()
}

/// `z(x) = gamma^{alpha/2} v(gamma x)`.
pub fn v_to_z(h: &Hardy, v: &RadialProfile, gamma: f64) -> Result<RadialProfile> {
    if v.meaning != Meaning::V {
        return Err(domain("expected a v profile"));
    }
    let s = gamma.powf(0.5 * h.alpha());
    let grid = v.grid.map(|r| r / gamma, v.grid.spacing())?;
    let derivs = v.derivs.as_ref().map(|d| d.iter().map(|x| s * gamma * x).collect());
    RadialProfile::new(grid, v.values.iter().map(|x| s * x).collect(), derivs, Meaning::Z)
}

/// Inverse of [`v_to_z`].
pub fn z_to_v(h: &Hardy, z: &RadialProfile, gamma: f64) -> Result<RadialProfile> {
    if z.meaning != Meaning::Z {
        return Err(domain("expected a z profile"));
    }
    let s = gamma.powf(-0.5 * h.alpha());
    let grid = z.grid.map(|r| r * gamma, z.grid.spacing())?;
    let derivs = z.derivs.as_ref().map(|d| d.iter().map(|x| s / gamma * x).collect());
    RadialProfile::new(grid, z.values.iter().map(|x| s * x).collect(), derivs, Meaning::V)
}

/// Drop the origin node so the profile can go through log-coordinate quadrature.
fn positive_part(v: &RadialProfile) -> Result<RadialProfile> {
    let i = v.radii().iter().position(|r| *r > 0.0).unwrap_or(0);
    let grid = RadialGrid::new(v.radii()[i..].to_vec(), Spacing::Custom)?;
    RadialProfile::new(grid, v.values[i..].to_vec(), v.derivs.as_ref().map(|d| d[i..].to_vec()), v.meaning)
}

/// `omega int r^{N-1-(m+1)nu} |v|^{m+1}` over the profile's range.
fn weighted_power_integral(h: &Hardy, v: &RadialProfile, m: f64) -> Result<f64> {
    let n = h.dim();
    let g: Vec<f64> = v
        .radii()
        .iter()
        .zip(&v.values)
        .map(|(r, x)| r.powf(n - 1.0 - (m + 1.0) * h.nu) * x.abs().powf(m + 1.0))
        .collect();
    Ok(h.omega() * quad::samples(v.radii(), &g, quad::Coordinate::Log, true)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZLimitReport {
    pub window: (f64, f64),
    /// `sup |z_eps - Z|` on the window, per point.
    pub distances: Vec<f64>,
    /// `eps gamma^{((N+2)-q(N-2))/2}`, per point.
    pub scalars: Vec<f64>,
    /// `max z/Z` of the first point.
    pub domination_constant: f64,
    /// Later points stay below `C Z` on their whole range.
    pub dominated: bool,
    /// The last three distances decrease.
    pub converging: bool,
    /// The last scalar is below half the first.
    pub scalar_halved: bool,
}

/// Trends of `z_eps` toward `Z` along the family.
pub fn z_limit_check(params: &ProblemParams, points: &[BlowupPoint], window: (f64, f64)) -> Result<ZLimitReport> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints { got: points.len(), needed: 3 });
    }
    let h = &params.hardy;
    let e = eps_dilation_exponent(params);
    let distances: Vec<f64> = points
        .iter()
        .map(|pt| {
            pt.z.radii()
                .iter()
                .zip(&pt.z.values)
                .filter(|(r, _)| **r >= window.0 && **r <= window.1)
                .map(|(r, z)| (z - limit_z_profile(h, *r).0).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let scalars: Vec<f64> = points.iter().map(|pt| pt.eps * pt.gamma.powf(e)).collect();
    let ratio = |pt: &BlowupPoint| {
        pt.z.radii().iter().zip(&pt.z.values).map(|(r, z)| z / limit_z_profile(h, *r).0).fold(0.0, f64::max)
    };
    let domination_constant = ratio(&points[0]);
    let dominated = points[1..].iter().all(|pt| ratio(pt) <= domination_constant * (1.0 + 1e-12));
    let tail = &distances[distances.len() - 3..];
    Ok(ZLimitReport {
        window,
        converging: tail.windows(2).all(|d| d[1] < d[0]),
        scalar_halved: scalars[scalars.len() - 1] < 0.5 * scalars[0],
        distances,
        scalars,
        domination_constant,
        dominated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralCheck {
    pub quadrature: f64,
    pub closed_form: f64,
    pub relative_error: f64,
}

fn check_against(quadrature: f64, closed_form: f64) -> IntegralCheck {
    IntegralCheck { quadrature, closed_form, relative_error: (quadrature / closed_form - 1.0).abs() }
}

/// `omega int_0^inf r^{N-1-s} Z(r)^m dr` with the substitution `r = e^t`.
fn z_moment(h: &Hardy, s: f64, m: f64) -> Result<f64> {
    let n = h.dim();
    let f = |t: f64| {
        let r = t.exp();
        let z = limit_z_profile(h, r).0;
        if z == 0.0 {
            0.0
        } else {
            (t * (n - s) + m * z.ln()).exp()
        }
    };
    // Z falls off like r^{-alpha}, the bulk sits near the bubble scale
    let c = crate::constants::z_dilation(h).ln();
    let lo = c - 60.0 / (n - s);
    let hi = c + 60.0 / (m * h.alpha() - (n - s));
    Ok(h.omega() * quad::integrate_pieces(f, &[lo, c - 5.0, c, c + 5.0, hi], 1e-13)?)
}

/// `gamma_0 = int |x|^{-2* nu} Z^{2*-1}` by quadrature against
/// `omega alpha^{N-1} (N/(N-2))^{(N-2)/2}`.
pub fn gamma0_integral(h: &Hardy) -> Result<IntegralCheck> {
    let ts = h.two_star();
    let quadrature = z_moment(h, ts * h.nu, ts - 1.0)?;
    Ok(check_against(quadrature, extended::to_f64(&extended::gamma0(h.n, h.nu))))
}

/// Arguments of the Beta function in the closed form of `int |x|^{-(q+1)nu} Z^{q+1}`.
pub fn zq1_beta_arguments(h: &Hardy, q: f64) -> (f64, f64) {
    let (n, nu, a) = (h.dim(), h.nu, h.alpha());
    let f = (n - 2.0) / (2.0 * a);
    (f * (n - (q + 1.0) * nu), f * (q * (n - 2.0 - nu) - (2.0 + nu)))
}

/// `int |x|^{-(q+1)nu} Z^{q+1}` by quadrature against the Beta closed form.
pub fn zq1_integral(h: &Hardy, q: f64) -> Result<IntegralCheck> {
    let (a, b) = zq1_beta_arguments(h, q);
    if !(a > 0.0 && b > 0.0) {
        return Err(domain(format!("Beta arguments ({a}, {b}) must be positive")));
    }
    let quadrature = z_moment(h, (q + 1.0) * h.nu, q + 1.0)?;
    Ok(check_against(quadrature, extended::to_f64(&extended::zq1(h.n, h.nu, q))))
}

/// `alpha gamma_0^2 |R(0)| / (2 c_q int |x|^{-(q+1)nu} Z^{q+1})`, with
/// `c_q = (N-2)/2 - N/(q+1)`, from the closed forms.
pub fn assembled_limit(params: &ProblemParams, radius: f64) -> Result<f64> {
    let h = &params.hardy;
    let q = params.q;
    let g0 = extended::to_f64(&extended::gamma0(h.n, h.nu));
    let zq = extended::to_f64(&extended::zq1(h.n, h.nu, q));
    let robin = robin_function(h, radius)?.abs();
    Ok(h.alpha() * g0 * g0 * robin / (2.0 * pohozaev_coefficient(h.dim(), q) * zq))
}

/// The same limit with every constant multiplied out:
/// `omega |R(0)| / C_{q,N} alpha^{2N - 2A} (N-2)^{A-N+1} N^{N-2-A} / B(A, B')`,
/// `C_{q,N} = ((N-2)q - (N+2))/(2(q+1))`, `(A, B')` the Beta arguments.
pub fn expanded_limit(params: &ProblemParams, radius: f64) -> Result<f64> {
    let h = &params.hardy;
    let (n, a, q) = (h.dim(), h.alpha(), params.q);
    let (ba, bb) = zq1_beta_arguments(h, q);
    let c = ((n - 2.0) * q - (n + 2.0)) / (2.0 * (q + 1.0));
    let robin = robin_function(h, radius)?.abs();
    let ln_beta = crate::constants::beta_function(ba, bb)?.ln();
    let ln = (h.omega() * robin / c).ln()
        + (2.0 * n - 2.0 * ba) * a.ln()
        + (ba - n + 1.0) * (n - 2.0).ln()
        + (n - 2.0 - ba) * n.ln()
        - ln_beta;
    Ok(ln.exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub eps_sequence: Vec<f64>,
    /// `eps |v|_inf^{(q(N-2)-(N+2)+2 alpha)/alpha}`
    pub left_hand: Vec<f64>,
    pub closed_form_limit: f64,
    pub expanded_limit: f64,
    /// Richardson value from the last three entries.
    pub extrapolated: f64,
    /// Fitted order of the correction in `eps` used by the extrapolation.
    pub order: f64,
    /// `|extrapolated / closed_form_limit - 1|`
    pub relative_gap: f64,
    /// Successive differences of `left_hand` shrink.
    pub gaps_shrink: bool,
}

/// Rate sequence against the closed-form limit. Assumes `L(eps) = L + c eps^theta`
/// and fits `theta` from the last three members, which must share one ratio
/// of successive `eps`.
pub fn rate_limit(params: &ProblemParams, points: &[BlowupPoint], radius: f64) -> Result<RateReport> {
    if points.len() < 4 {
        return Err(Error::InsufficientPoints { got: points.len(), needed: 4 });
    }
    let ex = rate_exponent(params);
    let eps_sequence: Vec<f64> = points.iter().map(|p| p.eps).collect();
    let left_hand: Vec<f64> = points.iter().map(|p| p.eps * p.sup_norm.powf(ex)).collect();
    let gaps: Vec<f64> = left_hand.windows(2).map(|w| w[1] - w[0]).collect();
    let gaps_shrink = gaps.windows(2).all(|g| g[1].abs() < g[0].abs());
    let k = left_hand.len();
    let (l1, l2, l3) = (left_hand[k - 3], left_hand[k - 2], left_hand[k - 1]);
    let ratio = eps_sequence[k - 2] / eps_sequence[k - 1];
    let shrink = (l2 - l1) / (l3 - l2);
    let (order, extrapolated) = if shrink > 1.0 {
        let order = shrink.ln() / ratio.ln();
        (order, l3 + (l3 - l2) / (shrink - 1.0))
    } else {
        (f64::NAN, f64::NAN)
    };
    let closed_form_limit = assembled_limit(params, radius)?;
    Ok(RateReport {
        eps_sequence,
        left_hand,
        closed_form_limit,
        expanded_limit: expanded_limit(params, radius)?,
        extrapolated,
        order,
        relative_gap: (extrapolated / closed_form_limit - 1.0).abs(),
        gaps_shrink,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bookkeeping {
    /// Relative residual of the weighted Pohozaev identity on the ball.
    pub pohozaev: f64,
    /// `|v|^2 int v^{q+1}` against `|v|^E int_{Omega/gamma} z^{q+1}`, relative.
    pub exponent: f64,
    /// `|v|_inf v(R/2)`
    pub profile_value: f64,
    /// `gamma_0 G(R/2, 0)`
    pub profile_limit: f64,
}

/// Identity checks on one member.
pub fn bookkeeping(params: &ProblemParams, pt: &BlowupPoint, radius: f64) -> Result<Bookkeeping> {
    let h = &params.hardy;
    let q = params.q;
    let v = positive_part(&pt.v)?;
    let with_eps = ProblemParams::with_hardy(*h, params.p, q, pt.eps)?;
    let rep = pohozaev_v_weighted(&with_eps, 1.0, &v, None, true)?;
    let lhs = pt.sup_norm.powi(2) * weighted_power_integral(h, &v, q)?;
    let rhs = pt.sup_norm.powf(rate_exponent(params)) * weighted_power_integral(h, &positive_part(&pt.z)?, q)?;
    let g0 = extended::to_f64(&extended::gamma0(h.n, h.nu));
    let half = pt.v.interpolate(0.5 * radius).ok_or_else(|| domain("R/2 outside the profile"))?;
    Ok(Bookkeeping {
        pohozaev: rep.relative_residual.abs(),
        exponent: (lhs / rhs - 1.0).abs(),
        profile_value: pt.sup_norm * half,
        profile_limit: g0 * green_ball(h, radius)?.g(0.5 * radius),
    })
}
