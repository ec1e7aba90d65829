use hsl_core::constants::Hardy;
use hsl_core::large_solution::*;
use hsl_core::quad;
use hsl_core::radial_ode::{operator_residual, Meaning, RadialGrid, RadialProfile, Rhs};
use hsl_core::Error;

fn hardy() -> Hardy {
    Hardy::new(4, 0.75).unwrap()
}

const Q: f64 = 2.5;

#[test]
fn unit_data_blows_up_at_a_finite_radius() {
    let h = hardy();
    let sol = shoot_large(&h, Q, 1.0, &ShootConfig::default()).unwrap();
    assert!(sol.blowup_radius.is_finite() && sol.blowup_radius > sol.cap_radius);
    assert!(sol.certified(), "{}", sol.cap_sensitivity);
    let u = &sol.profile.values;
    assert!(u.windows(2).all(|w| w[1] >= w[0]));
    assert!(*u.last().unwrap() > 1e6);
}

#[test]
fn refuses_exponents_outside_the_range() {
    let h = hardy();
    assert!(matches!(shoot_large(&h, 3.0, 1.0, &ShootConfig::default()), Err(Error::Domain(_))));
    assert!(matches!(shoot_large(&h, 1.0, 1.0, &ShootConfig::default()), Err(Error::Domain(_))));
    assert!(matches!(shoot_large(&h, Q, 0.0, &ShootConfig::default()), Err(Error::Domain(_))));
}

#[test]
fn short_window_reports_no_blow_up() {
    let h = hardy();
    let cfg = ShootConfig { r_limit: 0.1, ..Default::default() };
    assert!(matches!(shoot_large(&h, Q, 1e-3, &cfg), Err(Error::NoBlowUp { .. })));
}

#[test]
fn similarity_data_reproduce_rescaled_solution() {
    let h = hardy();
    let base = shoot_large(&h, Q, 1.0, &ShootConfig::default()).unwrap();
    let lambda: f64 = 3.0;
    let k = base.similarity_exponent(&h);
    // T_lambda u has u(0) = lambda^k and blows up at r*/lambda
    let shot = shoot_large(&h, Q, lambda.powf(k), &ShootConfig::default()).unwrap();
    let scaled = rescale_large(&h, &base, 1.0 / lambda).unwrap();
    assert!((shot.blowup_radius / scaled.blowup_radius - 1.0).abs() < 1e-6);
    let r = 0.5 * scaled.blowup_radius;
    assert!((shot.eval(r).unwrap() / scaled.eval(r).unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn blow_up_radius_grows_as_data_shrink() {
    let h = hardy();
    let cfg = ShootConfig { r_limit: 1e5, ..Default::default() };
    let rs: Vec<f64> =
        [1.0, 0.3, 0.1, 0.03].iter().map(|&u0| shoot_large(&h, Q, u0, &cfg).unwrap().blowup_radius).collect();
    assert!(rs.windows(2).all(|w| w[1] > w[0]), "{rs:?}");
}

#[test]
fn rescaling_is_exact_and_keeps_the_equation() {
    let h = hardy();
    let base = shoot_large(&h, Q, 1.0, &ShootConfig::default()).unwrap();
    let same = rescale_large(&h, &base, 1.0).unwrap();
    assert_eq!(same.profile.values, base.profile.values);
    for big_r in [0.2, 7.0] {
        let s = rescale_large(&h, &base, big_r).unwrap();
        assert!((s.blowup_radius / (big_r * base.blowup_radius) - 1.0).abs() < 1e-10);
        // second derivative from the equation on the base, then mapped; the
        // rescaled triple must satisfy the equation itself
        let g = -s.similarity_exponent(&h);
        let k = h.dim() - 1.0 - 2.0 * h.nu;
        for i in (10..base.profile.len()).step_by(97) {
            let r = base.profile.radii()[i];
            let (u, du) = (base.profile.values[i], base.profile.derivs.as_ref().unwrap()[i]);
            let d2u = r.powf(-(Q - 1.0) * h.nu) * u.powf(Q) - k * du / r;
            let f = big_r.powf(g);
            let (x, v, dv, d2v) = (big_r * r, f * u, f / big_r * du, f / (big_r * big_r) * d2u);
            assert!((s.profile.values[i] / v - 1.0).abs() < 1e-14);
            let res = operator_residual(&h, &Rhs::Absorption { q: Q, a: 1.0 }, x, v, dv, d2v);
            assert!(res.abs() < 1e-8 * d2v.abs().max(k * dv.abs() / x), "{res}");
        }
    }
    let far = rescale_large(&h, &base, 1e6).unwrap();
    assert!(far.eval(1.0).unwrap() < 1e-3);
}

#[test]
fn emden_fowler_variable_is_convex() {
    // y'' = t^e y^q >= 0: in r this is (r^{N-1-2nu} u')' >= 0, so r^{N-1-2nu} u' increases
    let h = hardy();
    let sol = shoot_large(&h, Q, 1.0, &ShootConfig::default()).unwrap();
    let k = h.dim() - 1.0 - 2.0 * h.nu;
    let flux: Vec<f64> =
        sol.profile.radii().iter().zip(sol.profile.derivs.as_ref().unwrap()).map(|(r, d)| r.powf(k) * d).collect();
    assert!(flux.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn liouville_check_passes_zero_and_catches_a_large_member() {
    let h = hardy();
    let base = shoot_large(&h, Q, 1.0, &ShootConfig::default()).unwrap();
    let grid = RadialGrid::log(1e-3, 50.0, 200).unwrap();
    let zero = RadialProfile::new(grid.clone(), vec![0.0; 200], None, Meaning::V).unwrap();
    let radii = [1.0, 4.0, 16.0, 64.0, 256.0];
    let rep = liouville_domination_check(&h, &base, &zero, &radii, 0.5).unwrap();
    let env: Vec<f64> = rep.envelope.iter().map(|e| e.1).collect();
    assert!(env.windows(2).all(|w| w[1] < w[0]));
    assert!(*env.last().unwrap() < 0.02 * env[0]);

    // U_{R0} on B_{R0/2} is not dominated by U_R for large R
    let unit = unit_ball_large(&h, &base).unwrap();
    let r0 = 4.0;
    let u_r0 = rescale_large(&h, &unit, r0).unwrap();
    let inner = RadialGrid::log(1e-3, 0.5 * r0, 100).unwrap();
    let cand = RadialProfile::from_fn(inner, Meaning::V, |r| (u_r0.eval(r).unwrap(), 0.0));
    let err = liouville_domination_check(&h, &base, &cand, &radii, 0.5).unwrap_err();
    assert!(matches!(err, Error::DominationViolated { radius, .. } if radius > r0));
}

#[test]
fn vazquez_integral_matches_quadrature() {
    for (q, m, a) in [(2.5, 1.0, 0.5), (1.7, 3.0, 2.0), (4.0, 0.2, 10.0)] {
        let closed = vazquez_psi(q, m, a).unwrap();
        let h = |s: f64| m * s.powf(q + 1.0) / (q + 1.0);
        let num = quad::integrate_to_infinity(|s| 1.0 / h(s).sqrt(), a, a, 1e-13).unwrap();
        assert!((num / closed - 1.0).abs() < 1e-10, "{num} {closed}");
        assert!(closed.is_finite());
    }
    assert!(vazquez_psi(1.0, 1.0, 1.0).is_err());
}
