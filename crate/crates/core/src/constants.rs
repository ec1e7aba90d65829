//! Parameters, derived exponents and the closed-form profiles.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Result};
use crate::quad;

/// Dimension and Hardy coefficient, plus the exponents they determine.
///
/// `nu` is the smaller root of `nu^2 - (N-2) nu + mu = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hardy {
    pub n: u32,
    pub mu: f64,
    pub nu: f64,
}

impl Hardy {
    pub fn new(n: u32, mu: f64) -> Result<Self> {
        if n < 3 {
            return Err(domain(format!("N = {n} < 3")));
        }
        let mu_bar = mu_bar(n);
        if !(mu >= 0.0 && mu < mu_bar) {
            return Err(domain(format!("mu = {mu} outside [0, {mu_bar})")));
        }
        // Rationalized form of sqrt(mu_bar) - sqrt(mu_bar - mu); no cancellation.
        let nu = mu / (mu_bar.sqrt() + (mu_bar - mu).sqrt());
        Ok(Self { n, mu, nu })
    }

    pub fn from_nu(n: u32, nu: f64) -> Result<Self> {
        if n < 3 {
            return Err(domain(format!("N = {n} < 3")));
        }
        let half = 0.5 * (n as f64 - 2.0);
        if !(nu >= 0.0 && nu < half) {
            return Err(domain(format!("nu = {nu} outside [0, {half})")));
        }
        Ok(Self { n, mu: nu * (n as f64 - 2.0 - nu), nu })
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    pub fn mu_bar(&self) -> f64 {
        mu_bar(self.n)
    }

    pub fn nu_prime(&self) -> f64 {
        self.dim() - 2.0 - self.nu
    }

    /// `N - 2 - 2 nu`, the decay rate of the weighted fundamental solution.
    pub fn alpha(&self) -> f64 {
        self.dim() - 2.0 - 2.0 * self.nu
    }

    /// Critical Sobolev exponent `2N/(N-2)`.
    pub fn two_star(&self) -> f64 {
        2.0 * self.dim() / (self.dim() - 2.0)
    }

    pub fn omega(&self) -> f64 {
        sphere_area(self.n)
    }
}

pub fn mu_bar(n: u32) -> f64 {
    let h = 0.5 * (n as f64 - 2.0);
    h * h
}

/// Surface area of the unit sphere in R^n.
pub fn sphere_area(n: u32) -> f64 {
    let h = 0.5 * n as f64;
    2.0 * std::f64::consts::PI.powf(h) / ln_gamma(h).exp()
}

/// Full parameter set for `-Δu - μu/|x|^2 = u^p - ε u^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    pub hardy: Hardy,
    pub p: f64,
    pub q: f64,
    pub eps: f64,
}

impl ProblemParams {
    pub fn new(n: u32, mu: f64, p: f64, q: f64, eps: f64) -> Result<Self> {
        Self::with_hardy(Hardy::new(n, mu)?, p, q, eps)
    }

    pub fn with_hardy(hardy: Hardy, p: f64, q: f64, eps: f64) -> Result<Self> {
        let crit = hardy.two_star() - 1.0;
        if !(p >= crit - 1e-12) {
            return Err(domain(format!("p = {p} below 2*-1 = {crit}")));
        }
        if !(q > p) {
            return Err(domain(format!("q = {q} must exceed p = {p}")));
        }
        if !(eps >= 0.0) {
            return Err(domain(format!("eps = {eps} < 0")));
        }
        Ok(Self { hardy, p, q, eps })
    }

    pub fn p_is_critical(&self) -> bool {
        (self.p - (self.hardy.two_star() - 1.0)).abs() < 1e-12
    }
}

/// Exponents determined by `(N, mu, p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedExponents {
    pub mu_bar: f64,
    pub nu: f64,
    pub nu_prime: f64,
    pub alpha: f64,
    /// `(2 + nu)/nu`; infinite when `nu = 0`.
    pub q_star: f64,
    pub mu_star: f64,
    pub m_abs: f64,
    pub theta: f64,
    /// Homogeneity exponent of the two-term functional; `None` at `p = 2*-1`
    /// where its denominator vanishes.
    pub l: Option<f64>,
    pub c_qn: f64,
    pub two_star: f64,
}

pub fn derive(params: &ProblemParams) -> DerivedExponents {
    let h = &params.hardy;
    let (n, nu, p, q) = (h.dim(), h.nu, params.p, params.q);
    let den = 2.0 * (p + 1.0) - n * (p - 1.0);
    DerivedExponents {
        mu_bar: h.mu_bar(),
        nu,
        nu_prime: h.nu_prime(),
        alpha: h.alpha(),
        q_star: q_star(nu),
        mu_star: mu_star(h.n, q),
        m_abs: 2.0 / (q - 1.0),
        theta: 2.0 + 2.0 * nu - (q + 1.0) * nu,
        l: if params.p_is_critical() || den.abs() < 1e-12 {
            None
        } else {
            Some((2.0 * (q + 1.0) - n * (p - 1.0)) / den)
        },
        c_qn: ((n - 2.0) * q - (n + 2.0)) / (2.0 * (q + 1.0)),
        two_star: h.two_star(),
    }
}

pub fn q_star(nu: f64) -> f64 {
    if nu == 0.0 {
        f64::INFINITY
    } else {
        (2.0 + nu) / nu
    }
}

/// Hardy coefficient at which `q` becomes critical; `mu < mu_star` iff `q < q_star`.
pub fn mu_star(n: u32, q: f64) -> f64 {
    let d = 0.5 * (n as f64 - 2.0) - 2.0 / (q - 1.0);
    mu_bar(n) - d * d
}

/// Euler Beta function through log-Gamma.
pub fn beta_function(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(domain(format!("Beta({a}, {b}) needs positive arguments")));
    }
    Ok((ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
}

/// The weighted extremal `U(r)` and its derivative, normalized so that
/// `-div(|x|^{-2nu} grad U) = |x|^{-2* nu} U^{2*-1}`.
pub fn talenti_profile(h: &Hardy, r: f64) -> (f64, f64) {
    let n = h.dim();
    let a = h.alpha();
    let m = 2.0 * a / (n - 2.0);
    let c = (n * a * a / (n - 2.0)).powf(0.25 * (n - 2.0));
    let rm = r.powf(m);
    let u = c * (1.0 + rm).powf(-0.5 * (n - 2.0));
    let du = if r == 0.0 { 0.0 } else { -0.5 * (n - 2.0) * c * (1.0 + rm).powf(-0.5 * n) * m * rm / r };
    (u, du)
}

/// The limit profile `Z` with `Z(0) = 1`; also a dilate of `talenti_profile`.
pub fn limit_z_profile(h: &Hardy, r: f64) -> (f64, f64) {
    let n = h.dim();
    let a = h.alpha();
    let m = 2.0 * a / (n - 2.0);
    let k = n * a * a / (n - 2.0);
    let rm = r.powf(m) / k;
    let z = (1.0 + rm).powf(-0.5 * (n - 2.0));
    let dz = if r == 0.0 { 0.0 } else { -0.5 * (n - 2.0) * (1.0 + rm).powf(-0.5 * n) * m * rm / r };
    (z, dz)
}

/// Dilation `lambda` with `Z(x) = lambda^{-alpha/2} U(x / lambda)`.
pub fn z_dilation(h: &Hardy) -> f64 {
    let n = h.dim();
    let a = h.alpha();
    (a * (n / (n - 2.0)).sqrt()).powf((n - 2.0) / a)
}

/// Rayleigh quotient `int |x|^{-2nu}|U'|^2 / (int |x|^{-2* nu} U^{2*})^{2/2*}`
/// of the extremal, by quadrature.
pub fn rayleigh_quotient_of_extremal(h: &Hardy) -> Result<f64> {
    let n = h.dim();
    let nu = h.nu;
    let ts = h.two_star();
    let scale = 1.0;
    let grad = quad::integrate_to_infinity(
        |r| {
            let (_, du) = talenti_profile(h, r);
            du * du * r.powf(n - 1.0 - 2.0 * nu)
        },
        0.0,
        scale,
        1e-13,
    )?;
    let pot = quad::integrate_to_infinity(
        |r| talenti_profile(h, r).0.powf(ts) * r.powf(n - 1.0 - ts * nu),
        0.0,
        scale,
        1e-13,
    )?;
    let w = h.omega();
    Ok(w * grad / (w * pot).powf(2.0 / ts))
}

/// Weighted Sobolev constant `S_N (1 - 4 mu/(N-2)^2)^{(N-1)/N}` with `S_N`
/// from the unweighted extremal's Rayleigh quotient.
pub fn sobolev_constant(h: &Hardy) -> Result<f64> {
    let s_n = rayleigh_quotient_of_extremal(&Hardy::new(h.n, 0.0)?)?;
    let n = h.dim();
    Ok(s_n * (1.0 - 4.0 * h.mu / ((n - 2.0) * (n - 2.0))).powf((n - 1.0) / n))
}
