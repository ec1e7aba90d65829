//! High-precision evaluation of the closed-form constants.
//!
//! Works in binary floats with `PREC` bits (about 48 decimal digits). Inputs
//! are converted from `f64` exactly, so comparisons against the double path
//! measure only the double path's rounding.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

pub type Ext = FBig<HalfEven, 2>;

pub const PREC: usize = 160;

pub fn ext(x: f64) -> Ext {
    Ext::try_from(x).expect("finite input").with_precision(PREC).value()
}

pub fn int(n: i64) -> Ext {
    Ext::from(n).with_precision(PREC).value()
}

pub fn to_f64(x: &Ext) -> f64 {
    x.to_f64().value()
}

/// Pi by the Gauss-Legendre AGM iteration.
pub fn pi() -> Ext {
    let one = int(1);
    let two = int(2);
    let mut a = one.clone();
    let mut b = &one / two.sqrt();
    let mut t = &one / int(4);
    let mut p = one.clone();
    for _ in 0..8 {
        let an = (&a + &b) / &two;
        b = (&a * &b).sqrt();
        let d = &a - &an;
        t = &t - &p * &d * &d;
        p = &p * &two;
        a = an;
    }
    let s = &a + &b;
    &s * &s / (int(4) * t)
}

// Bernoulli numbers B_2 .. B_30 as (numerator, denominator).
const BERNOULLI: [(i64, i64); 15] = [
    (1, 6),
    (-1, 30),
    (1, 42),
    (-1, 30),
    (5, 66),
    (-691, 2730),
    (7, 6),
    (-3617, 510),
    (43867, 798),
    (-174611, 330),
    (854513, 138),
    (-236364091, 2730),
    (8553103, 6),
    (-23749461029, 870),
    (8615841276005, 14322),
];

/// `ln Gamma(x)` for `x > 0`: shift to `x >= 60`, then the Stirling series.
pub fn ln_gamma(x: &Ext) -> Ext {
    let sixty = int(60);
    let mut z = x.clone();
    let mut shift = int(0);
    while z < sixty {
        shift += z.ln();
        z += int(1);
    }
    let half = &int(1) / int(2);
    let mut s = (&z - &half) * z.ln() - &z + (int(2) * pi()).ln() / int(2);
    let z2 = &z * &z;
    let mut zp = z.clone();
    for (k, (num, den)) in BERNOULLI.iter().enumerate() {
        let k2 = 2 * (k as i64 + 1);
        s += int(*num) / (int(*den) * int(k2) * int(k2 - 1) * &zp);
        zp = &zp * &z2;
    }
    s - shift
}

pub fn beta(a: &Ext, b: &Ext) -> Ext {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(&(a + b))).exp()
}

pub fn pow(x: &Ext, e: &Ext) -> Ext {
    (e * x.ln()).exp()
}

/// The exponents of `constants::derive`, evaluated in high precision.
#[derive(Debug, Clone)]
pub struct ExtDerived {
    pub nu: Ext,
    pub nu_prime: Ext,
    pub alpha: Ext,
    pub q_star: Ext,
    pub mu_star: Ext,
    pub m_abs: Ext,
    pub theta: Ext,
    pub c_qn: Ext,
}

pub fn derive(n: u32, mu: f64, q: f64) -> ExtDerived {
    let nn = int(n as i64);
    let mu = ext(mu);
    let q = ext(q);
    let one = int(1);
    let two = int(2);
    let h = (&nn - &two) / &two;
    let mu_bar = &h * &h;
    let root = (&mu_bar - &mu).sqrt();
    let nu = &mu / (mu_bar.sqrt() + &root);
    let nu_prime = &nn - &two - &nu;
    let alpha = &nn - &two - &two * &nu;
    let q_star = (&two + &nu) / &nu;
    let d = &h - &two / (&q - &one);
    let mu_star = &mu_bar - &d * &d;
    let m_abs = &two / (&q - &one);
    let theta = &two + &two * &nu - (&q + &one) * &nu;
    let c_qn = ((&nn - &two) * &q - (&nn + &two)) / (&two * (&q + &one));
    ExtDerived { nu, nu_prime, alpha, q_star, mu_star, m_abs, theta, c_qn }
}

/// Surface area of the unit sphere in R^n.
pub fn sphere_area(n: u32) -> Ext {
    let h = int(n as i64) / int(2);
    int(2) * pow(&pi(), &h) / ln_gamma(&h).exp()
}

/// `int |x|^{-2* nu} Z^{2*-1} dx` in closed form.
pub fn gamma0(n: u32, nu: f64) -> Ext {
    let nn = int(n as i64);
    let two = int(2);
    let alpha = &nn - &two - &two * ext(nu);
    let e = (&nn - &two) / &two;
    sphere_area(n) * pow(&alpha, &(&nn - int(1))) * pow(&(&nn / (&nn - &two)), &e)
}

/// `int |x|^{-(q+1) nu} Z^{q+1} dx` through the Beta function.
pub fn zq1(n: u32, nu: f64, q: f64) -> Ext {
    let nn = int(n as i64);
    let two = int(2);
    let nu = ext(nu);
    let q = ext(q);
    let alpha = &nn - &two - &two * &nu;
    let k = &nn * &alpha * &alpha / (&nn - &two);
    let f = (&nn - &two) / (&two * &alpha);
    let a = &f * (&nn - (&q + int(1)) * &nu);
    let b = &f * (&q * (&nn - &two - &nu) - (&two + &nu));
    sphere_area(n) * &f * pow(&k, &a) * beta(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let p = pi();
        let err = to_f64(&(p - ext(std::f64::consts::PI)));
        assert!(err.abs() < 2e-16);
    }

    #[test]
    fn ln_gamma_integer_and_half() {
        // Gamma(5) = 24, Gamma(1/2) = sqrt(pi)
        let g5 = ln_gamma(&int(5)).exp();
        assert!((to_f64(&g5) - 24.0).abs() < 1e-13);
        let gh = ln_gamma(&(int(1) / int(2))).exp();
        let d = gh - pi().sqrt();
        assert!(to_f64(&d).abs() < 1e-40);
    }

    #[test]
    fn beta_is_rational_at_integers() {
        let b = beta(&int(2), &int(3)) - int(1) / int(12);
        assert!(to_f64(&b).abs() < 1e-40);
    }

    #[test]
    fn gamma0_example_is_four_pi_squared() {
        let g = gamma0(4, 0.5);
        let p = pi();
        let d = g - int(4) * &p * &p;
        assert!(to_f64(&d).abs() < 1e-38);
    }
}
