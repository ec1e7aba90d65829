//! One function per subcommand. Each reads its knobs, runs the solvers and
//! returns the JSON result plus any tables.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use hsl_core::blowup::{
    bookkeeping, check_admissible, rate_limit, solve_point, z_limit_check, BlowupConfig, BlowupPoint, DEFAULT_EPS,
};
use hsl_core::classifier::{classify, expected_regime, ClassifyOptions, Regime};
use hsl_core::constants::{derive, sobolev_constant, talenti_profile, Hardy, ProblemParams};
use hsl_core::greenfn::{
    doubling_check, green_ball, green_bound_check, robin_flux_identity, robin_function, weighted_ball_measure,
};
use hsl_core::large_solution::{shoot_large, ShootConfig};
use hsl_core::pohozaev::{ball_residuals, nonexistence_obstruction};
use hsl_core::radial_ode::{
    critical_amplitude, critical_emden_solve, critical_u_profile, exact_subsolution, Meaning, OdeTolerance, RadialGrid,
    RadialProfile,
};
use hsl_core::singular_cauchy::{cross_validate_ode, solve_picard, PicardConfig, PicardResult};
use hsl_core::variational::{
    euler_lagrange_residual, minimize_on_manifold, FunctionalKind, FunctionalSpec, MinimizationResult, MinimizeOptions,
};

use crate::knobs::Knobs;
use crate::output::{Outcome, Table};
use crate::CliError;

pub struct Command {
    pub name: &'static str,
    pub about: &'static str,
    /// Short description of what the run exercises, copied into the JSON.
    pub anchor: &'static str,
    pub keys: &'static [&'static str],
    /// CSV files and their columns, for `--help`.
    pub tables: &'static str,
    pub run: fn(&Knobs) -> Result<Outcome, CliError>,
}

macro_rules! keys {
    ($($k:literal),*) => { &["n", "mu", "nu", $($k),*] };
}

pub const COMMANDS: &[Command] = &[
    Command {
        name: "derive",
        about: "Derived exponents, expected regime and the weighted Sobolev constant",
        anchor: "indicial exponents, critical absorption exponent, weighted Sobolev constant",
        keys: keys!("p", "q", "eps"),
        tables: "none",
        run: derive_cmd,
    },
    Command {
        name: "picard",
        about: "Singular Cauchy problem w(0) = delta by Picard iteration",
        anchor: "local existence and monotonicity of the singular Cauchy problem",
        keys: keys!("q", "delta", "nodes", "tol"),
        tables: "picard.csv: delta,r,w,dw",
        run: picard_cmd,
    },
    Command {
        name: "large",
        about: "Shoot a large (boundary blow-up) solution of the absorption equation",
        anchor: "large solutions and their blow-up radius",
        keys: keys!("q", "u0", "cap", "nodes"),
        tables: "large.csv: r,u,du",
        run: large_cmd,
    },
    Command {
        name: "classify",
        about: "Fit the singularity at the origin and compare with the expected regime",
        anchor: "classification of isolated singularities by the absorption exponent",
        keys: keys!("p", "q", "eps", "delta"),
        tables: "classify.csv: r,value (u, or v for the exact power solution)",
        run: classify_cmd,
    },
    Command {
        name: "critical",
        about: "Backward Emden-Fowler run at q = q* and its log-corrected asymptotics",
        anchor: "log-corrected singularity at the critical absorption exponent",
        keys: keys!("q", "s_start", "s_end", "nodes", "tol"),
        tables: "critical.csv: s,x,ratio,amplitude",
        run: critical_cmd,
    },
    Command {
        name: "pohozaev",
        about: "Nonexistence obstruction and ball Pohozaev residuals for the extremal candidate",
        anchor: "Pohozaev identity and nonexistence for supercritical absorption",
        keys: keys!("p", "q", "eps", "radius", "nodes"),
        tables: "pohozaev.csv: radius,lhs,rhs,residual,relative_residual,obstruction_gap",
        run: pohozaev_cmd,
    },
    Command {
        name: "green",
        about: "Green function of the weighted operator on a ball",
        anchor: "Green function of the ball and its upper bound",
        keys: keys!("radius", "nodes"),
        tables: "green.csv: r,g,fundamental,regular",
        run: green_cmd,
    },
    Command {
        name: "robin",
        about: "Robin function at the origin and the boundary flux identity",
        anchor: "Robin function and boundary flux identity",
        keys: keys!("radius"),
        tables: "robin.csv: radius,robin,lhs,rhs,rel_error",
        run: robin_cmd,
    },
    Command {
        name: "doubling",
        about: "Doubling property of the weight |y|^{-2nu} on random balls",
        anchor: "doubling measure |y|^{-2nu} dy",
        keys: keys!("pairs", "k_max", "seed"),
        tables: "doubling.csv: d,r,measure\ndoubling_origin.csv: t,measure,closed_form,rel_error",
        run: doubling_cmd,
    },
    Command {
        name: "minimize",
        about: "Minimize the constrained functional on one ball",
        anchor: "variational characterization on dilated balls",
        keys: keys!("p", "q", "rho", "nodes", "tol"),
        tables: "minimize.csv: r,w",
        run: minimize_cmd,
    },
    Command {
        name: "sweep-rho",
        about: "Constrained minimization over a list of ball radii",
        anchor: "limit of the constrained infimum as the ball grows",
        keys: keys!("p", "q", "rho", "nodes", "tol"),
        tables: "sweep_rho.csv: rho,value,multiplier,half_sobolev,iterations,converged,gradient_norm,el_residual",
        run: sweep_rho_cmd,
    },
    Command {
        name: "blowup",
        about: "Family of ground states as eps -> 0 and their rescaled profiles",
        anchor: "blow-up of ground states and convergence to the bubble",
        keys: keys!("p", "q", "eps", "radius", "nodes"),
        tables: "blowup.csv: eps,sup_norm,gamma,delta,seed_sup_norm,p_mass\n\
                 blowup_profiles.csv: eps,kind,r,value (kind is v or z)",
        run: blowup_cmd,
    },
    Command {
        name: "rate",
        about: "Blow-up rate along the family against the closed-form limit",
        anchor: "blow-up rate and its closed-form limit",
        keys: keys!("p", "q", "eps", "radius", "nodes"),
        tables: "rate.csv: eps,left_hand,pohozaev,exponent,profile_value,profile_limit",
        run: rate_cmd,
    },
];

fn hardy_json(h: &Hardy) -> Value {
    json!({ "n": h.n, "mu": h.mu, "nu": h.nu, "alpha": h.alpha() })
}

fn params_json(p: &ProblemParams) -> Value {
    json!({ "hardy": hardy_json(&p.hardy), "p": p.p, "q": p.q, "eps": p.eps })
}

fn profile_rows(t: &mut Table, prof: &RadialProfile, lead: impl Fn() -> Vec<crate::output::Cell>) {
    let d = prof.derivs.clone().unwrap_or_else(|| prof.derivative());
    for ((r, v), dv) in prof.radii().iter().zip(&prof.values).zip(d) {
        let mut row = lead();
        row.extend([(*r).into(), (*v).into(), dv.into()]);
        t.push(row);
    }
}

fn derive_cmd(k: &Knobs) -> Result<Outcome, CliError> {
    let h = k.hardy(None)?;
    let pr = k.params(h, None)?;
    let (regime, exponent) = expected_regime(&pr);
    Ok(Outcome {
        result: json!({
            "params": params_json(&pr),
            "derived": derive(&pr),
            "regime": regime,
            "expected_exponent": exponent,
            "sobolev_constant": sobolev_constant(&h)?,
        }),
        tables: vec![],
    })
}

fn picard_cmd(k: &Knobs) -> Result<Outcome, CliError> {
    let h = k.hardy(None)?;
    let q = k.need_f64("q")?;
    let deltas = k.list("delta", &[0.1, 0.5, 1.0])?;
    let cfg = PicardConfig { grid_points: k.usize("nodes", 2000)?, tol: k.f64("tol", 1e-13)?, ..Default::default() };
    let runs: Vec<PicardResult> =
        deltas.par_iter().map(|&d| solve_picard(&h, q, d, &cfg)).collect::<hsl_core::Result<_>>()?;
    let tol = OdeTolerance::uniform(1e-12);
    let mut members = Vec::new();
    let mut t = Table::new("picard", &["delta", "r", "w", "dw"]);
    for run in &runs {
        let cv = cross_validate_ode(&h, run, 1e-4, &tol, 1.0)?;
        let excess = run.profile.values.iter().map(|w| (w - run.delta).abs()).fold(0.0, f64::max);
        members.push(json!({
            "delta": run.delta,
            "iterations": run.iterations,
            "contraction_estimate": run.contraction_estimate,
            "r_max": run.r_max,
            "halvings": run.halvings,
            "monotone_iterates": run.monotone,
            "sup_excess": excess,
            "cross_validation": cv,
        }));
        profile_rows(&mut t, &run.profile, || vec![run.delta.into()]);
    }
    Ok(Outcome {
        result: json!({
            "params": { "hardy": hardy_json(&h), "q": q },
            "members": members,
            "monotone_in_delta": monotone_in_delta(&runs),
        }),
        tables: vec![t],
    })
}

/// `w_a <= w_b` on the common range whenever `a < b`.
pub fn monotone_in_delta(runs: &[PicardResult]) -> bool {
    let mut order: Vec<&PicardResult> = runs.iter().collect();
    order.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    order.windows(2).all(|pair| {
        let (lo, hi) = (pair[0], pair[1]);
        lo.profile.radii().iter().zip(&lo.profile.values).all(|(&r, &w)| match hi.profile.interpolate(r) {
            Some(x) => x >= w,
            None => true,
        })
    })
}

fn large_cmd(k: &Knobs) -> Result<Outcome, CliError> {
    let h = k.hardy(None)?;
    let q = k.need_f64("q")?;
    let u0 = k.f64("u0", 1.0)?;
    let cfg = ShootConfig { cap: k.f64("cap", 1e8)?, nodes: k.usize("nodes", 2000)?, ..Default::default() };
    let sol = shoot_large(&h, q, u0, &cfg)?;
    let mut t = Table::new("large", &["r", "u", "du"]);
    profile_rows(&mut t, &sol.profile, Vec::new);
    Ok(Outcome {
        result: json!({
            "params": { "hardy": hardy_json(&h), "q": q, "u0": u0, "cap": cfg.cap },
            "blowup_radius": sol.blowup_radius,
            "cap_radius": sol.cap_radius,
            "cap_sensitivity": sol.cap_sensitivity,
            "certified": sol.certified(),
            "similarity_exponent": sol.similarity_exponent(&h),
        }),
        tables: vec![t],
    })
}

fn classify_cmd(k: &Knobs) -> Result<Outcome, CliError> {
    let h = k.hardy(None)?;
    let pr = k.params(h, None)?;
    let (regime, _) = expected_regime(&pr);
    let (profile, opts, source) = match regime {
        Regime::NuRegime => {
            let delta = k.first("delta", 0.5)?;
            let w = solve_picard(&h, pr.q, delta, &PicardConfig::default())?;
            (w.profile, ClassifyOptions::default(), "picard solution")
        }
        Regime::AbsorptionRegime => {
            let v = exact_subsolution(&h, pr.q, 1.0)?;
            let prof = RadialProfile::from_fn(RadialGrid::log(1e-6, 1e-2, 60)?, Meaning::V, |r| {
                let (x, dx, _) = v.eval(r);
                (x, dx)
            });
            (prof, ClassifyOptions::default(), "exact power solution")
        }
        Regime::CriticalLogRegime | Regime::FarField => {
            let run = critical_emden_solve(&h, pr.q, 1.0, 1e7, 50.0, 400, &OdeTolerance::uniform(1e-12))?;
            let u = critical_u_profile(&h, &run.profile)?;
            let window = Some((u.grid.first(), u.grid.last()));
            (u, ClassifyOptions { log_corrected: true, window, ..Default::default() }, "backward Emden-Fowler run")
        }
    };
    let verdict = classify(&pr, &profile, &opts)?;
    let mut t = Table::new("classify", &["r", "value"]);
    for (r, v) in profile.radii().iter().zip(&profile.values) {
        t.push(vec![(*r).into(), (*v).into()]);
    }
    Ok(Outcome {
        result: json!({
            "params": params_json(&pr),
            "profile_source": source,
            "profile_meaning": format!("{:?}", profile.meaning),
            "verdict": verdict,
        }),
        tables: vec![t],
    })
}

fn critical_cmd(k: &Knobs) -> Result<Outcome, CliError> {
    let h = k.hardy(None)?;
    let q = k.f64("q", hsl_core::constants::q_star(h.nu))?;
    let s_start = k.f64("s_start", 1e7)?;
    let s_end = k.f64("s_end", 50.0)?;
    let tol = OdeTolerance::uniform(k.f64("tol", 1e-12)?);
    let run = critical_emden_solve(&h, q, 1.0, s_start, s_end, k.usize("nodes", 400)?, &tol)?;
    let x = &run.profile;
    let amp = critical_amplitude(&h, x)?;
    let ratio = |s: f64, xv: f64| xv * ((q - 1.0) * s).powf(1.0 / (q - 1.0));
    let probe = 1e3;
    let ratio_at = x.interpolate(probe).map(|xv| ratio(probe, xv));
    let amp_at = amp.iter().copied().min_by(|a, b| (a.0 - probe).abs().total_cmp(&(b.0 - probe).abs())).map(|p| p.1);
    let target = (h.alpha() * h.nu / 2.0).powf(h.nu / 2.0);
    let mut t = Table::new("critical", &["s", "x", "ratio", "amplitude"]);
    for ((s, xv), (_, a)) in x.radii().iter().zip(&x.values).zip(&amp) {
        t.push(vec![(*s).into(), (*xv).into(), ratio(*s, *xv).into(), (*a).into()]);
    }
    Ok(Outcome {
        result: json!({
            "params": { "hardy": hardy_json(&h), "q": q, "s_start": s_start, "s_end": s_end },
            "steps": run.steps,
            "probe_s": probe,
            "ratio_at_probe": ratio_at,
            "amplitude_at_probe": amp_at,
            "target_amplitude": target,
            "amplitude_rel_error": amp_at.map(|a| (a / target - 1.0).abs()),
        }),
        tables: vec![t],
    })
}

fn pohozaev_cmd(k: &Knobs) -> Result<Outcome, CliError> {
    let h = k.hardy(None)?;
    let pr = k.params(h, None)?;
    let radii = k.list("radius", &[10.0, 20.0, 40.0])?;
    let nodes = k.usize("nodes", 3000)?;
    let nu = h.nu;
    let u = |r: f64| {
        let (v, dv) = talenti_profile(&h, r);
        (r.powf(-nu) * v, r.powf(-nu) * (dv - nu * v / r))
    };
    let cand = RadialProfile::from_fn(RadialGrid::log(1e-8, 1e4, 4000)?, Meaning::U, u);
    let obs = nonexistence_obstruction(&pr, &cand)?;
    let reps = ball_residuals(&pr, 1.0, u, &radii, 1e-8, nodes)?;
    let mut t = Table::new("pohozaev", &["radius", "lhs", "rhs", "residual", "relative_residual", "obstruction_gap"]);
    let mut balls = Vec::new();
    for (r, rep) in &reps {
        let gap = (rep.residual / obs.value - 1.0).abs();
        t.push(vec![
            (*r).into(),
            rep.lhs.into(),
            rep.rhs.into(),
            rep.residual.into(),
            rep.relative_residual.into(),
            gap.into(),
        ]);
        balls.push(json!({ "radius": r, "report": rep, "obstruction_gap": gap }));
    }
    Ok(Outcome {
        result: json!({
            "params": params_json(&pr),
            "candidate": "extremal profile of the eps = 0 problem",
            "obstruction": obs,
            "balls": balls,
        }),
        tables: vec![t],
    })
}

fn green_cmd(k: &Knobs) -> Result<Outcome, CliError> {
    let h = k.hardy(None)?;
    let radius = k.first("radius", 1.0)?;
    let nodes = k.usize("nodes", 200)?;
    let g = green_ball(&h, radius)?;
    let grid = RadialGrid::log(1e-4 * radius, radius, nodes)?;
    let bound = green_bound_check(&h, radius, grid.points())?;
    let mut t = Table::new("green", &["r", "g", "fundamental", "regular"]);
    for &r in grid.points() {
        t.push(vec![r.into(), g.g(r).into(), g.fundamental(r).into(), g.regular_part(r).into()]);
    }
    Ok(Outcome {
        result: json!({
            "params": { "hardy": hardy_json(&h), "radius": radius },
            "robin": robin_function(&h, radius)?,
            "bound": bound,
        }),
        tables: vec![t],
    })
}

fn robin_cmd(k: &Knobs) -> Result<Outcome, CliError> {
    let h = k.hardy(None)?;
    let radii = k.list("radius", &[1.0])?;
    let mut t = Table::new("robin", &["radius", "robin", "lhs", "rhs", "rel_error"]);
    let mut rows = Vec::new();
    for &r in &radii {
        let robin = robin_function(&h, r)?;
        let flux = robin_flux_identity(&h, r)?;
        t.push(vec![r.into(), robin.into(), flux.lhs.into(), flux.rhs.into(), flux.rel_error.into()]);
        rows.push(json!({ "radius": r, "robin": robin, "flux": flux }));
    }
    Ok(Outcome { result: json!({ "params": { "hardy": hardy_json(&h) }, "balls": rows }), tables: vec![t] })
}

/// Centers at log-uniform distance in `[1e-2, 10]`, radii in `[1e-3, 10]`.
pub fn random_pairs(count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (10f64.powf(rng.random_range(-2.0..1.0)), 10f64.powf(rng.random_range(-3.0..1.0)))).collect()
}

fn doubling_cmd(k: &Knobs) -> Result<Outcome, CliError> {
    let h = k.hardy(None)?;
    let pairs = random_pairs(k.usize("pairs", 50)?, k.u64("seed", 17)?);
    let k_max = k.usize("k_max", 8)? as u32;
    let rep = doubling_check(&h, &pairs, k_max)?;
    let measures: Vec<f64> =
        pairs.par_iter().map(|&(d, r)| weighted_ball_measure(&h, d, r)).collect::<hsl_core::Result<_>>()?;
    let mut t = Table::new("doubling", &["d", "r", "measure"]);
    for (&(d, r), m) in pairs.iter().zip(&measures) {
        t.push(vec![d.into(), r.into(), (*m).into()]);
    }
    let e = h.dim() - 2.0 * h.nu;
    let mut o = Table::new("doubling_origin", &["t", "measure", "closed_form", "rel_error"]);
    let mut worst = 0.0f64;
    for tt in [0.1, 1.0, 7.0] {
        let m = weighted_ball_measure(&h, 0.0, tt)?;
        let c = h.omega() * tt.powf(e) / e;
        worst = worst.max((m / c - 1.0).abs());
        o.push(vec![tt.into(), m.into(), c.into(), (m / c - 1.0).abs().into()]);
    }
    Ok(Outcome {
        result: json!({
            "params": { "hardy": hardy_json(&h), "pairs": pairs.len(), "k_max": k_max },
            "report": rep,
            "origin_max_rel_error": worst,
        }),
        tables: vec![t, o],
    })
}

fn minimize_one(pr: &ProblemParams, rho: f64, nodes: usize, tol: f64) -> Result<(MinimizationResult, f64), CliError> {
    let spec = FunctionalSpec::new(FunctionalKind::FhatOnManifold, *pr, rho, nodes)?;
    let res = minimize_on_manifold(&spec, &MinimizeOptions { tol, ..Default::default() })?;
    let el = euler_lagrange_residual(pr, &res)?;
    Ok((res, el.relative))
}

fn variational_params(k: &Knobs) -> Result<ProblemParams, CliError> {
    let h = k.hardy(Some((6, 1.75)))?;
    k.params(h, Some(4.0))
}

fn summary(pr: &ProblemParams, rho: f64, res: &MinimizationResult, el: f64, half: Option<f64>) -> Value {
    json!({
        "rho": rho,
        "value": res.value,
        "multiplier": res.multiplier,
        "half_sobolev": half,
        "bracket": 2.0 * res.value < res.multiplier && res.multiplier < (pr.q + 1.0) * res.value,
        "constraint_residual": res.constraint_residual,
        "iterations": res.iterations,
        "converged": res.converged,
        "gradient_norm": res.gradient_norm,
        "clipping_active": res.clipping_active,
        "monotone": res.monotone,
        "el_residual": el,
    })
}

fn half_sobolev(pr: &ProblemParams) -> Result<Option<f64>, CliError> {
    Ok(if pr.p_is_critical() { Some(0.5 * sobolev_constant(&pr.hardy)?) } else { None })
}

fn minimize_cmd(k: &Knobs) -> Result<Outcome, CliError> {
    let pr = variational_params(k)?;
    let rho = k.first("rho", 10.0)?;
    let (res, el) = minimize_one(&pr, rho, k.usize("nodes", 2000)?, k.f64("tol", 1e-8)?)?;
    let mut t = Table::new("minimize", &["r", "w"]);
    for (r, w) in res.profile.radii().iter().zip(&res.profile.values) {
        t.push(vec![(*r).into(), (*w).into()]);
    }
    Ok(Outcome {
        result: json!({ "params": params_json(&pr), "summary": summary(&pr, rho, &res, el, half_sobolev(&pr)?) }),
        tables: vec![t],
    })
}

fn sweep_rho_cmd(k: &Knobs) -> Result<Outcome, CliError> {
    let pr = variational_params(k)?;
    let rhos = k.list("rho", &[10.0, 30.0, 100.0])?;
    let (nodes, tol) = (k.usize("nodes", 2000)?, k.f64("tol", 1e-8)?);
    let half = half_sobolev(&pr)?;
    let runs: Vec<(MinimizationResult, f64)> =
        rhos.par_iter().map(|&rho| minimize_one(&pr, rho, nodes, tol)).collect::<Result<_, _>>()?;
    let mut t = Table::new(
        "sweep_rho",
        &["rho", "value", "multiplier", "half_sobolev", "iterations", "converged", "gradient_norm", "el_residual"],
    );
    let mut members = Vec::new();
    for (&rho, (res, el)) in rhos.iter().zip(&runs) {
        t.push(vec![
            rho.into(),
            res.value.into(),
            res.multiplier.into(),
            half.unwrap_or(f64::NAN).into(),
            res.iterations.into(),
            res.converged.into(),
            res.gradient_norm.into(),
            (*el).into(),
        ]);
        members.push(summary(&pr, rho, res, *el, half));
    }
    Ok(Outcome { result: json!({ "params": params_json(&pr), "members": members }), tables: vec![t] })
}

fn family(k: &Knobs) -> Result<(ProblemParams, BlowupConfig, Vec<BlowupPoint>), CliError> {
    let h = k.hardy(Some((6, 1.75)))?;
    let pr = ProblemParams::with_hardy(h, k.f64("p", 2.0)?, k.f64("q", 2.5)?, 1.0)?;
    check_admissible(&pr)?;
    let eps = k.list("eps", &DEFAULT_EPS)?;
    let cfg =
        BlowupConfig { radius: k.first("radius", 1.0)?, fem_nodes: k.usize("nodes", 2000)?, ..Default::default() };
    let points: Vec<BlowupPoint> =
        eps.par_iter().map(|&e| solve_point(&pr, e, &cfg)).collect::<hsl_core::Result<_>>()?;
    Ok((pr, cfg, points))
}

fn blowup_cmd(k: &Knobs) -> Result<Outcome, CliError> {
    let (pr, cfg, points) = family(k)?;
    let mut summary = Table::new("blowup", &["eps", "sup_norm", "gamma", "delta", "seed_sup_norm", "p_mass"]);
    let mut profiles = Table::new("blowup_profiles", &["eps", "kind", "r", "value"]);
    let mut members = Vec::new();
    for pt in &points {
        summary.push(vec![
            pt.eps.into(),
            pt.sup_norm.into(),
            pt.gamma.into(),
            pt.delta.into(),
            pt.seed_sup_norm.into(),
            pt.p_mass.into(),
        ]);
        for (kind, prof) in [("v", &pt.v), ("z", &pt.z)] {
            for (r, x) in prof.radii().iter().zip(&prof.values) {
                profiles.push(vec![pt.eps.into(), crate::output::Cell::S(kind.into()), (*r).into(), (*x).into()]);
            }
        }
        members.push(json!({
            "eps": pt.eps,
            "sup_norm": pt.sup_norm,
            "gamma": pt.gamma,
            "delta": pt.delta,
            "seed_sup_norm": pt.seed_sup_norm,
            "p_mass": pt.p_mass,
        }));
    }
    let z = if points.len() >= 3 { Some(z_limit_check(&pr, &points, (0.0, 5.0))?) } else { None };
    Ok(Outcome {
        result: json!({
            "params": params_json(&pr),
            "radius": cfg.radius,
            "members": members,
            "sup_norms_increase": points.windows(2).all(|w| w[1].sup_norm > w[0].sup_norm),
            "z_limit": z,
        }),
        tables: vec![summary, profiles],
    })
}

fn rate_cmd(k: &Knobs) -> Result<Outcome, CliError> {
    let (pr, cfg, points) = family(k)?;
    let report = rate_limit(&pr, &points, cfg.radius)?;
    let books: Vec<_> =
        points.iter().map(|pt| bookkeeping(&pr, pt, cfg.radius)).collect::<hsl_core::Result<Vec<_>>>()?;
    let mut t = Table::new("rate", &["eps", "left_hand", "pohozaev", "exponent", "profile_value", "profile_limit"]);
    for ((pt, lh), b) in points.iter().zip(&report.left_hand).zip(&books) {
        t.push(vec![
            pt.eps.into(),
            (*lh).into(),
            b.pohozaev.into(),
            b.exponent.into(),
            b.profile_value.into(),
            b.profile_limit.into(),
        ]);
    }
    Ok(Outcome {
        result: json!({
            "params": params_json(&pr),
            "radius": cfg.radius,
            "rate": report,
            "bookkeeping": books,
        }),
        tables: vec![t],
    })
}
