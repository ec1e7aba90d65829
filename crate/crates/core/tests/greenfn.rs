use hsl_core::constants::Hardy;
use hsl_core::greenfn::*;
use hsl_core::pohozaev::boundary_bracket;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid_of_params() -> Vec<Hardy> {
    let mut out = Vec::new();
    for n in [4u32, 5, 6] {
        for nu in [0.3, 0.5] {
            out.push(Hardy::from_nu(n, nu).unwrap());
        }
    }
    out
}

#[test]
fn robin_flux_identity_holds_to_roundoff() {
    for h in grid_of_params() {
        for radius in [0.5, 1.0, 2.0] {
            let c = robin_flux_identity(&h, radius).unwrap();
            assert!(c.rel_error < 1e-12, "{h:?} {radius}: {c:?}");
        }
    }
}

#[test]
fn robin_scales_like_r_to_minus_alpha() {
    for h in grid_of_params() {
        let a = h.alpha();
        let r1 = robin_function(&h, 1.0).unwrap();
        let r3 = robin_function(&h, 3.0).unwrap();
        assert!(r1 < 0.0);
        assert!((r3 / r1 - 3f64.powf(-a)).abs() < 1e-14);
        let f1 = robin_flux_identity(&h, 1.0).unwrap().lhs;
        let f3 = robin_flux_identity(&h, 3.0).unwrap().lhs;
        assert!((f3 / f1 / 3f64.powf(-a) - 1.0).abs() < 1e-13);
    }
}

#[test]
fn green_function_solves_the_radial_equation() {
    for h in grid_of_params() {
        let g = green_ball(&h, 1.5).unwrap();
        let k = h.dim() - 1.0 - 2.0 * h.nu;
        // flux r^{N-1-2nu} G' is constant
        let flux = |r: f64| r.powf(k) * g.dg(r);
        let f0 = flux(0.01);
        for r in [0.1, 0.5, 1.0, 1.5] {
            assert!((flux(r) / f0 - 1.0).abs() < 1e-12);
            assert!(g.g(r) >= 0.0);
        }
        assert!(g.g(1.5).abs() < 1e-15);
        let r = 1e-6;
        let norm = g.g(r) * h.alpha() * h.omega() * r.powf(h.alpha());
        assert!((norm - 1.0).abs() < 1e-5);
    }
}

#[test]
fn green_bound_constant_is_stable_in_radius() {
    for h in grid_of_params() {
        let mut cs = Vec::new();
        for radius in [0.5, 1.0, 4.0, 16.0] {
            let radii: Vec<f64> = (1..=200).map(|i| radius * i as f64 / 200.0).collect();
            let b = green_bound_check(&h, radius, &radii).unwrap();
            assert!(b.holds, "{b:?}");
            cs.push(b.c_min / b.c_theory);
        }
        assert!(cs.iter().all(|c| *c > 0.49 && *c <= 0.5 + 1e-12), "{cs:?}");
    }
}

#[test]
fn origin_centered_measure_has_closed_form() {
    for h in grid_of_params() {
        let e = h.dim() - 2.0 * h.nu;
        for t in [0.1, 1.0, 7.0] {
            let w = weighted_ball_measure(&h, 0.0, t).unwrap();
            assert!((w / (h.omega() * t.powf(e) / e) - 1.0).abs() < 1e-10);
        }
        // a tiny offset is continuous with the closed form
        let w = weighted_ball_measure(&h, 1e-9, 1.0).unwrap();
        assert!((w / (h.omega() / e) - 1.0).abs() < 1e-8);
    }
}

#[test]
fn weighted_measure_is_monotone_in_radius() {
    let h = Hardy::from_nu(5, 0.5).unwrap();
    let mut last = 0.0;
    for i in 1..40 {
        let w = weighted_ball_measure(&h, 0.7, 0.05 * i as f64).unwrap();
        assert!(w > last);
        last = w;
    }
}

#[test]
fn doubling_inequality_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let pairs: Vec<(f64, f64)> =
        (0..50).map(|_| (10f64.powf(rng.random_range(-2.0..1.0)), 10f64.powf(rng.random_range(-3.0..1.0)))).collect();
    for h in grid_of_params() {
        let rep = doubling_check(&h, &pairs, 8).unwrap();
        assert!(rep.holds, "{h:?}: {rep:?}");
        assert!(rep.c_required > 0.0);
    }
}

#[test]
fn annulus_bracket_tends_to_the_robin_value() {
    for h in grid_of_params() {
        let g = green_ball(&h, 1.0).unwrap();
        let target = h.alpha() * robin_function(&h, 1.0).unwrap().abs();
        let outer = boundary_bracket(&h, 1.0, g.g(1.0), g.dg(1.0));
        for rho in [0.1, 0.05] {
            let inner = boundary_bracket(&h, rho, g.g(rho), g.dg(rho));
            // both spheres carry the same weighted bracket
            let lim = 2.0 * (inner[0] + inner[1]);
            assert!((lim / target - 1.0).abs() < 1e-8, "{rho} {h:?} {lim} {target}");
        }
        assert!((2.0 * outer[0] / target - 1.0).abs() < 1e-12);
    }
}
