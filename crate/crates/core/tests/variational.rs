use hsl_core::constants::{derive, sobolev_constant, talenti_profile, ProblemParams};
use hsl_core::radial_ode::{Meaning, RadialGrid, RadialProfile, Spacing};
use hsl_core::variational::*;

fn critical() -> ProblemParams {
    ProblemParams::new(4, 0.75, 3.0, 4.0, 1.0).unwrap()
}

fn on_grid(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> RadialProfile {
    let vals = grid.points().iter().map(|&r| f(r)).collect();
    RadialProfile::new(grid.clone(), vals, None, Meaning::W).unwrap()
}

fn quick() -> MinimizeOptions {
    MinimizeOptions { tol: 1e-6, ..Default::default() }
}

#[test]
fn extremal_quotient_approaches_sobolev_constant() {
    let pr = critical();
    let h = pr.hardy;
    let rho = 1e3;
    let spec = FunctionalSpec::new(FunctionalKind::SQuotient, pr, rho, 20000).unwrap();
    let v = on_grid(&spec.grid, |r| talenti_profile(&h, r).0 - talenti_profile(&h, rho).0);
    let s = evaluate(&spec, &v).unwrap();
    let target = sobolev_constant(&h).unwrap();
    assert!((s / target - 1.0).abs() < 0.02, "{s} {target}");
    assert!(s >= target * (1.0 - 1e-3));

    let scaled =
        RadialProfile::new(spec.grid.clone(), v.values.iter().map(|x| 3.7 * x).collect(), None, Meaning::W).unwrap();
    assert!((evaluate(&spec, &scaled).unwrap() / s - 1.0).abs() < 1e-13);
}

#[test]
fn two_term_functional_is_dilation_invariant() {
    let pr = ProblemParams::new(6, 1.75, 3.0, 4.0, 1.0).unwrap();
    let l = derive(&pr).l.unwrap();
    assert!(l.is_finite());
    let s = 2.0 / (pr.p - 1.0) - pr.hardy.nu;
    let spec = FunctionalSpec::new(FunctionalKind::FTwoTerm, pr, 5.0, 400).unwrap();
    let w = on_grid(&spec.grid, |r| (-r * r).exp() * (1.0 - r / 5.0));
    let base = evaluate(&spec, &w).unwrap();
    for kappa in [0.3, 2.0, 7.5] {
        let grid = RadialGrid::new(spec.grid.points().iter().map(|r| r / kappa).collect(), Spacing::Custom).unwrap();
        let sp = FunctionalSpec::with_grid(FunctionalKind::FTwoTerm, pr, grid.clone()).unwrap();
        let v =
            RadialProfile::new(grid, w.values.iter().map(|x| kappa.powf(s) * x).collect(), None, Meaning::W).unwrap();
        assert!((evaluate(&sp, &v).unwrap() / base - 1.0).abs() < 1e-12, "{kappa}");
    }
    // the critical case has no two-term functional
    let crit = FunctionalSpec::new(FunctionalKind::FTwoTerm, critical(), 5.0, 50).unwrap();
    assert!(evaluate(&crit, &on_grid(&crit.grid, |r| 5.0 - r)).is_err());
}

#[test]
fn critical_infimum_tends_to_half_sobolev_constant() {
    let pr = ProblemParams::new(6, 1.75, 2.0, 4.0, 1.0).unwrap();
    let half = 0.5 * sobolev_constant(&pr.hardy).unwrap();
    let mut gaps = Vec::new();
    for rho in [10.0, 30.0, 100.0] {
        let spec = FunctionalSpec::new(FunctionalKind::FhatOnManifold, pr, rho, 4000).unwrap();
        let r = minimize_on_manifold(&spec, &MinimizeOptions::default()).unwrap();
        assert!(r.converged && r.monotone_descent && r.monotone, "{rho}: {r:?}");
        assert!(r.constraint_residual < 1e-12);
        let s = r.value;
        assert!(2.0 * s < r.multiplier && r.multiplier < (pr.q + 1.0) * s);
        gaps.push(s / half - 1.0);
    }
    assert!(gaps.iter().all(|g| *g > 0.0), "{gaps:?}");
    assert!(gaps.windows(2).all(|g| g[1] < g[0]), "{gaps:?}");
    assert!(gaps[2] < 0.05, "{gaps:?}");
}

#[test]
fn supercritical_value_is_stable_under_ball_doubling() {
    let pr = ProblemParams::new(6, 1.75, 3.0, 4.0, 1.0).unwrap();
    let vals: Vec<f64> = [10.0, 20.0, 40.0]
        .iter()
        .map(|&rho| {
            let spec = FunctionalSpec::new(FunctionalKind::FhatOnManifold, pr, rho, 2000).unwrap();
            let r = minimize_on_manifold(&spec, &quick()).unwrap();
            assert!(r.converged && r.monotone);
            assert!(2.0 * r.value < r.multiplier && r.multiplier < (pr.q + 1.0) * r.value);
            r.value
        })
        .collect();
    for v in vals.windows(2) {
        assert!((v[1] / v[0] - 1.0).abs() < 0.02, "{vals:?}");
    }
}

#[test]
fn euler_lagrange_residual_is_first_order() {
    let pr = critical();
    let mut last = None;
    for nodes in [4000, 8000, 32000] {
        let spec = FunctionalSpec::new(FunctionalKind::FhatOnManifold, pr, 10.0, nodes).unwrap();
        let r = minimize_on_manifold(&spec, &MinimizeOptions::default()).unwrap();
        let el = euler_lagrange_residual(&pr, &r).unwrap();
        assert!(!el.degenerate);
        if let Some((n0, e0)) = last {
            let ratio = e0 / el.relative;
            let expect = nodes as f64 / n0 as f64;
            assert!(ratio > 0.8 * expect && ratio < 1.25 * expect, "{ratio}");
        }
        if nodes == 32000 {
            assert!(el.relative < 1e-4, "{el:?}");
            // a wrong multiplier leaves an O(1) residual
            let off = residual_with_multiplier(&pr, &r.profile, 1.1 * r.multiplier).unwrap();
            assert!(off.relative > 100.0 * el.relative);
        }
        last = Some((nodes, el.relative));
    }
}

#[test]
fn zero_profile_is_degenerate() {
    let spec = FunctionalSpec::new(FunctionalKind::SQuotient, critical(), 5.0, 50).unwrap();
    let z = on_grid(&spec.grid, |_| 0.0);
    assert!(residual_with_multiplier(&critical(), &z, 3.0).unwrap().degenerate);
    assert!(evaluate(&spec, &z).is_err());
    let fhat = FunctionalSpec::new(FunctionalKind::FhatOnManifold, critical(), 5.0, 50).unwrap();
    assert_eq!(evaluate(&fhat, &on_grid(&fhat.grid, |_| 0.0)).unwrap(), 0.0);
    assert!(minimize_from_profile(&fhat, &on_grid(&fhat.grid, |_| 0.0), &quick()).is_err());
}

#[test]
fn rescaled_profile_solves_the_eps_equation() {
    let pr = critical();
    let spec = FunctionalSpec::new(FunctionalKind::FhatOnManifold, pr, 10.0, 4000).unwrap();
    let r = minimize_on_manifold(&spec, &MinimizeOptions::default()).unwrap();
    let same = rescale_to_eps(&pr, &r.profile, 1.0).unwrap();
    assert_eq!(same.values, r.profile.values);
    assert_eq!(same.grid.points(), r.profile.grid.points());
    for eps in [0.5, 0.1, 0.01] {
        let v = rescale_to_eps(&pr, &r.profile, eps).unwrap();
        assert_eq!(v.meaning, Meaning::V);
        let res = strong_residual(&pr, r.multiplier, eps, &v, 0.01 * v.grid.last()).unwrap();
        assert!(res < 5e-4, "{eps}: {res}");
        // round trip through the inverse map
        let (a, b) = rescale_exponents(&pr);
        let back: Vec<f64> = v.values.iter().map(|x| eps.powf(a) * x).collect();
        for ((x, y), (s, t)) in back.iter().zip(&r.profile.values).zip(v.radii().iter().zip(r.profile.radii())) {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1e-300) + 1e-300);
            assert!((s / eps.powf(b) - t).abs() <= 1e-12 * t);
        }
        let mass = power_integral(&pr, &v, false).unwrap();
        assert!((mass - rescaled_mass(&pr, eps)).abs() < 1e-10, "{mass}");
        let wrong = strong_residual(&pr, 1.1 * r.multiplier, eps, &v, 0.01 * v.grid.last()).unwrap();
        assert!(wrong > 0.05);
    }
    let sup = ProblemParams::new(4, 0.75, 4.0, 6.0, 1.0).unwrap();
    assert!(rescaled_mass(&sup, 1e-3) < rescaled_mass(&sup, 1e-2));
    assert!(rescaled_mass(&sup, 1e-8) < 1e-3);
}

#[test]
fn minimizer_is_grid_independent() {
    let pr = critical();
    let val = |nodes| {
        let spec = FunctionalSpec::new(FunctionalKind::FhatOnManifold, pr, 10.0, nodes).unwrap();
        minimize_on_manifold(&spec, &MinimizeOptions::default()).unwrap().value
    };
    let (a, b) = (val(2000), val(4000));
    assert!((a / b - 1.0).abs() < 0.01, "{a} {b}");
    assert!(b <= a);
}
