//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any criterion fails. Tolerances are pinned here, independently
//! of the scenario files, and every derived reference value is recomputed from
//! closed forms in this file.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use twophase::evolving::{transport_check_surface, Diffeo, EvolvingDomain};
use twophase::fields::FnScalar;
use twophase::harness::{convergence_study, run_scenario, Axis, Report, RunOptions, ScenarioConfig, Status};
use twophase::linalg::{Vec2, Vec3};
use twophase::pressure::{harmonic_extension, projection_constants, MfsSettings};
use twophase::surface::{check_surface_ibp, curvature_structure, ClosedCurve, Ellipsoid, Hypersurface, Shape2};
use twophase::weak_form::{BumpScalar, TimeVariant, TimeWindow};

type Verdict = Result<String, String>;

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn config(name: &str) -> ScenarioConfig {
    ScenarioConfig::from_path(&scenario_dir().join(format!("{name}.json"))).expect("bundled scenario loads")
}

fn run_with(mut c: ScenarioConfig, ids: &[&str]) -> Report {
    c.checks.enabled = Some(ids.iter().map(|s| s.to_string()).collect());
    run_scenario(c, &RunOptions::default()).expect("bundled scenario runs")
}

fn run(name: &str, ids: &[&str]) -> Report {
    run_with(config(name), ids)
}

/// Metric of `id`; errors and non-finite values count as failures.
fn metric(r: &Report, id: &str) -> Result<f64, String> {
    let c = r.check(id).ok_or_else(|| format!("{}: {id} missing", r.scenario))?;
    if c.status == Status::Error {
        return Err(format!("{}: {id} errored: {}", r.scenario, c.message.clone().unwrap_or_default()));
    }
    c.metric.ok_or_else(|| format!("{}: {id} has no finite metric", r.scenario))
}

fn value(r: &Report, id: &str, key: &str) -> Result<f64, String> {
    r.check(id)
        .and_then(|c| c.values.get(key).copied())
        .ok_or_else(|| format!("{}: {id}.{key} missing", r.scenario))
}

/// `Ok` with a `label=value` note when `v ≤ tol`.
fn at_most(label: &str, v: f64, tol: f64) -> Verdict {
    let note = format!("{label}={v:.2e}≤{tol:.0e}");
    if v <= tol {
        Ok(note)
    } else {
        Err(format!("{label}={v:.3e} exceeds {tol:.0e}"))
    }
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(" ")
}

fn all(parts: Vec<Verdict>) -> Verdict {
    let mut notes = Vec::new();
    for p in parts {
        notes.push(p?);
    }
    Ok(notes.join(", "))
}

fn circle(r: f64, m: usize) -> ClosedCurve<f64> {
    ClosedCurve::circle(Vec2::new(0.0, 0.0), r, m, false).expect("valid circle")
}

fn ellipse(a: f64, b: f64, m: usize) -> ClosedCurve<f64> {
    ClosedCurve::ellipse(Vec2::new(0.0, 0.0), a, b, m, false).expect("valid ellipse")
}

fn ac1() -> Verdict {
    let kappa = circle(1.0, 256).mean_curvature();
    let circle_err = kappa.iter().map(|k| (k + 1.0).abs()).fold(0.0, f64::max);
    let radius: f64 = 1.5;
    let sphere = Ellipsoid::sphere(Vec3::new(0.2, -0.1, 0.3), radius, 64, 128).map_err(|e| e.to_string())?;
    let sphere_err = sphere.mean_curvature().iter().map(|k: &f64| (k + 2.0 / radius).abs()).fold(0.0, f64::max);
    let sb = run("static_bubble", &["curvature_ground_truth"]);
    let sp = run("static_bubble_sphere", &["curvature_ground_truth_3d"]);
    all(vec![
        at_most("circle", circle_err, 1e-8),
        at_most("sphere", sphere_err, 1e-4),
        at_most("scenario_circle", metric(&sb, "curvature_ground_truth")?, 1e-8),
        at_most("scenario_sphere", metric(&sp, "curvature_ground_truth_3d")?, 1e-4),
    ])
}

fn ac2() -> Verdict {
    let (ac, kc) = curvature_structure(&circle(1.0, 256));
    let (ae, ke) = curvature_structure(&ellipse(1.3, 0.6, 256));
    all(vec![
        at_most("circle_asym", ac, 1e-8),
        at_most("circle_Kν", kc, 1e-8),
        at_most("ellipse_asym", ae, 1e-8),
        at_most("ellipse_Kν", ke, 1e-8),
    ])
}

/// `f = exp(a·x) sin(b·x + c)`; analytic with a closed-form gradient.
fn exp_sin(a: Vec2<f64>, b: Vec2<f64>, c: f64) -> impl twophase::fields::ScalarField<f64, 2> {
    FnScalar {
        f: move |x: &Vec2<f64>| a.dot(x).exp() * (b.dot(x) + c).sin(),
        grad: move |x: &Vec2<f64>| {
            let (e, (s, co)) = (a.dot(x).exp(), (b.dot(x) + c).sin_cos());
            a * (e * s) + b * (e * co)
        },
    }
}

fn ac3() -> Verdict {
    let fields = [
        exp_sin(Vec2::new(0.3, -0.2), Vec2::new(1.1, 0.7), 0.4),
        exp_sin(Vec2::new(-0.5, 0.1), Vec2::new(0.2, 1.9), -1.0),
        exp_sin(Vec2::new(0.0, 0.6), Vec2::new(-1.3, 0.5), 2.2),
        exp_sin(Vec2::new(0.4, 0.4), Vec2::new(2.0, -0.8), 0.0),
        exp_sin(Vec2::new(-0.2, -0.7), Vec2::new(0.9, 0.9), 1.3),
    ];
    let worst = |c: &ClosedCurve<f64>| {
        fields.iter().flat_map(|f| (0..2).map(move |axis| check_surface_ibp(c, f, axis))).fold(0.0, f64::max)
    };
    let mut notes = Vec::new();
    for (name, make) in [
        ("circle", &(|m| circle(1.0, m)) as &dyn Fn(usize) -> ClosedCurve<f64>),
        ("ellipse", &|m| ellipse(1.4, 0.7, m)),
    ] {
        let coarse: Vec<f64> = [8, 16, 32].iter().map(|&m| worst(&make(m))).collect();
        let fine: Vec<f64> = [64, 128, 256].iter().map(|&m| worst(&make(m))).collect();
        notes.push(at_most(&format!("{name}_m256"), fine[2], 1e-8));
        notes.push(at_most(&format!("{name}_m64..256"), fine.iter().copied().fold(0.0, f64::max), 1e-8));
        // spectral: every doubling gains at least a factor 10 until round-off
        let seq: Vec<f64> = coarse.iter().chain(&fine).copied().collect();
        let geometric = seq.windows(2).all(|w| w[1] <= 1e-12 || w[1] <= 0.1 * w[0]);
        notes.push(if geometric {
            Ok(format!("{name}_decay M=8..256 [{:.1e} → {:.1e}]", seq[0], seq[seq.len() - 1]))
        } else {
            Err(format!("{name}: residuals do not decay geometrically: {}", sci(&seq)))
        });
    }
    all(notes)
}

fn ac4() -> Verdict {
    let e = run("rotating_ellipse", &["weak_curvature_identity"]);
    let c = run("static_bubble", &["weak_curvature_identity"]);
    all(vec![
        at_most("ellipse_gap", value(&e, "weak_curvature_identity", "max_gap")?, 1e-7),
        at_most("circle_κ_form", value(&c, "weak_curvature_identity", "max_kappa_form")?, 1e-7),
        at_most("circle_νν_form", value(&c, "weak_curvature_identity", "max_nu_nu_form")?, 1e-7),
    ])
}

fn ac5() -> Verdict {
    let ids = ["transport_theorem_bulk", "transport_theorem_surface"];
    let mut parts = Vec::new();
    for name in ["translating_bubble", "shear_interface"] {
        let c = config(name);
        if (c.resolution.dt - 1e-3).abs() > 1e-15 {
            return Err(format!("{name} must use dt = 1e-3"));
        }
        let r = run_with(c, &ids);
        for id in ids {
            parts.push(at_most(&format!("{name}.{id}"), metric(&r, id)?, 1e-6));
        }
    }
    let study = convergence_study(config("translating_bubble"), Axis::TimeDt, 3, None).map_err(|e| e.to_string())?;
    for s in &study.series {
        let order = s.observed_order.ok_or_else(|| format!("{}: no observed order", s.check))?;
        parts.push(if order >= 1.9 {
            Ok(format!("{}_order={order:.2}", s.check))
        } else {
            Err(format!("{}: time order {order:.3} below 1.9", s.check))
        });
    }
    // dilating circle R(t) = 1 + t/2: |Γ| = 2πR, d|Γ|/dt = π exactly
    let dom = EvolvingDomain::new(
        Shape2::Circle { center: [0.0, 0.0], radius: 1.0 },
        Diffeo::Dilation { rate: 0.5, center: [0.0, 0.0] },
        1.0,
        256,
        32,
    )
    .map_err(|e| e.to_string())?;
    let f = BumpScalar {
        center: Vec2::new(0.1, 0.0),
        radius: 3.0,
        amplitude: 1.0,
        time: TimeWindow::new(0.0, 1.0, TimeVariant::Open).map_err(|e| e.to_string())?,
    };
    let r = transport_check_surface(&dom, &f, 0.5, 1e-3, false).map_err(|e| e.to_string())?;
    parts.push(at_most("dilation_fd_vs_κV", r.measure.residual, 1e-6));
    parts.push(at_most("dilation_κV_vs_π", (r.measure.rhs - std::f64::consts::PI).abs(), 1e-6));
    all(parts)
}

fn ac6() -> Verdict {
    let mut parts = Vec::new();
    for name in ["diagnostic_random", "shear_interface", "rotating_ellipse"] {
        let r = run(name, &["volume_preservation", "divergence_preservation"]);
        if value(&r, "volume_preservation", "samples")? < 1000.0 {
            return Err("fewer than 10³ samples".into());
        }
        parts.push(at_most(&format!("{name}.det"), metric(&r, "volume_preservation")?, 1e-10));
        parts.push(at_most(&format!("{name}.div"), metric(&r, "divergence_preservation")?, 1e-8));
    }
    all(parts)
}

fn ac7() -> Verdict {
    let sb = run("static_bubble", &["energy_equality"]);
    let tb = run("translating_bubble", &["energy_equality"]);
    all(vec![
        at_most("static_rel_gap", metric(&sb, "energy_equality")?, 1e-12),
        at_most("translating_rel_gap", metric(&tb, "energy_equality")?, 1e-6),
    ])
}

fn ac8() -> Verdict {
    let mut parts = Vec::new();
    for name in ["translating_bubble", "rotating_ellipse"] {
        let r = run(name, &["transport_weak_form"]);
        parts.push(at_most(name, metric(&r, "transport_weak_form")?, 1e-5));
    }
    let study = convergence_study(config("translating_bubble"), Axis::GridH, 3, None).map_err(|e| e.to_string())?;
    let s = study.series("transport_weak_form").ok_or("no grid transport series")?;
    let order = s.observed_order.ok_or("no observed order")?;
    parts.push(if order >= 0.8 && !s.non_monotone {
        Ok(format!("grid_order={order:.2} [{:.1e} → {:.1e}]", s.error[0], s.error[s.error.len() - 1]))
    } else {
        Err(format!("grid transport decay: order {order:.3}, errors {}", sci(&s.error)))
    });
    all(parts)
}

fn ac9() -> Verdict {
    let sb = run("static_bubble", &["perimeter_identity"]);
    let c = config("static_bubble");
    let Shape2::Circle { radius, .. } = c.interface else { return Err("static bubble is not a disk".into()) };
    let m = c.material;
    let perimeter = (m.beta2 - m.beta1) * 2.0 * std::f64::consts::PI * radius;
    let tv = value(&sb, "perimeter_identity", "tv_estimate")?;
    let tg = run("single_phase_taylor_green", &["perimeter_identity"]);
    let tg_tv = value(&tg, "perimeter_identity", "tv_estimate")?;
    all(vec![
        if tv >= 0.95 * perimeter {
            Ok(format!("disk_ratio={:.5}", tv / perimeter))
        } else {
            Err(format!("TV estimate {tv} below 0.95·{perimeter}"))
        },
        if tg_tv == 0.0 { Ok("equal_density_tv=0".into()) } else { Err(format!("equal densities gave {tg_tv}")) },
    ])
}

fn ac10() -> Verdict {
    let sb = run("static_bubble", &["momentum_weak_form", "momentum_linearity"]);
    let tg = run("single_phase_taylor_green", &["momentum_weak_form"]);
    let tb = run("translating_bubble", &["momentum_linearity"]);
    all(vec![
        at_most("static", metric(&sb, "momentum_weak_form")?, 1e-7),
        at_most("taylor_green", metric(&tg, "momentum_weak_form")?, 1e-4),
        at_most("linearity_static", metric(&sb, "momentum_linearity")?, 1e-10),
        at_most("linearity_translating", metric(&tb, "momentum_linearity")?, 1e-10),
    ])
}

fn ac11() -> Verdict {
    let c = config("static_bubble");
    if c.resolution.grid_h != 1.0 / 128.0 || c.resolution.surface_nodes != 256 {
        return Err("static bubble must use h = 1/128 and M = 256".into());
    }
    let Shape2::Circle { radius, .. } = c.interface else { return Err("static bubble is not a disk".into()) };
    let expected = 2.0 * c.material.sigma / radius;
    let r = run_with(c, &["pressure_reconstruction", "young_laplace_jump"]);
    let excess = value(&r, "young_laplace_jump", "mean_inner_excess")?;
    let mut parts = vec![
        at_most("|Δp−2σ/R|", (excess - expected).abs(), 1e-6),
        at_most("zero_mean", value(&r, "pressure_reconstruction", "zero_mean")?, 1e-8),
        at_most("curl", value(&r, "pressure_reconstruction", "curl_max")?, 1e-8),
        at_most("YL_defect", metric(&r, "young_laplace_jump")?, 1e-6),
    ];
    // spatial order where the pipeline has a discretization error: Taylor–Green
    // restricted to a box around a marker circle
    let mut tg = config("single_phase_taylor_green");
    tg.bounds.lo = [-1.5, -1.5];
    tg.bounds.hi = [1.5, 1.5];
    tg.interface = Shape2::Circle { center: [0.0, 0.0], radius: 0.8 };
    tg.battery.radius = [0.5, 0.6];
    tg.battery.spread = 0.05;
    tg.convergence.grid_h = 1.0 / 16.0;
    let study = convergence_study(tg, Axis::GridH, 3, None).map_err(|e| e.to_string())?;
    let s = study.series("young_laplace_jump").ok_or("no jump series")?;
    let order = s.observed_order.ok_or("no observed order")?;
    parts.push(if order >= 1.8 {
        Ok(format!("h_order={order:.2}"))
    } else {
        Err(format!("pressure order {order:.3} below 1.8 (defects {})", sci(&s.error)))
    });
    all(parts)
}

fn ac12() -> Verdict {
    let curve = ellipse(1.2, 0.7, 256);
    let c = -0.8;
    let normal: Vec<Vec2<f64>> = curve.normals().iter().map(|n| *n * c).collect();
    let tangential: Vec<Vec2<f64>> = curve
        .nodes()
        .iter()
        .zip(curve.normals())
        .map(|(x, n)| Vec2::new(-n[1], n[0]) * (1.0 + x[0] * x[1]).exp())
        .collect();
    let cn = projection_constants(&curve, &normal).map_err(|e| e.to_string())?.constant;
    let ct = projection_constants(&curve, &tangential).map_err(|e| e.to_string())?.constant;
    let r = run("rotating_ellipse", &["projection_constant"]);
    all(vec![
        at_most("normal", (cn - c).abs(), 1e-10),
        at_most("tangential", ct.abs(), 1e-10),
        at_most("scenario", metric(&r, "projection_constant")?, 1e-10),
    ])
}

/// Interior points of the unit disk on a fixed spiral.
fn interior_points() -> Vec<Vec2<f64>> {
    (0..20)
        .map(|k| {
            let r = 0.05 + 0.85 * k as f64 / 19.0;
            let th = 2.399963 * k as f64;
            Vec2::new(r * th.cos(), r * th.sin())
        })
        .collect()
}

fn ac13() -> Verdict {
    let settings = MfsSettings::default();
    let e = ellipse(1.5, 0.7, 256);
    let constant = harmonic_extension(&e, &vec![0.37; 256], &settings).map_err(|e| e.to_string())?;
    let const_err = interior_points()
        .iter()
        .map(|x| (constant.value(&(*x * 0.6)) - 0.37).abs())
        .fold(constant.trace_error, f64::max);

    let c = circle(1.0, 256);
    let theta = |x: &Vec2<f64>| x[1].atan2(x[0]);
    // Dirichlet data cos θ: the series has the single term r cos θ
    let cos_data: Vec<f64> = c.nodes().iter().map(|x| theta(x).cos()).collect();
    let ext = harmonic_extension(&c, &cos_data, &settings).map_err(|e| e.to_string())?;
    let cos_err = interior_points()
        .iter()
        .map(|x| (ext.value(x) - x.norm() * theta(x).cos()).abs())
        .fold(0.0, f64::max);
    // data exp(cos θ)cos(sin θ) = Σ cos(kθ)/k!, extended by Σ r^k cos(kθ)/k!
    let exp_data: Vec<f64> = c.nodes().iter().map(|x| theta(x).cos().exp() * theta(x).sin().cos()).collect();
    let ext = harmonic_extension(&c, &exp_data, &settings).map_err(|e| e.to_string())?;
    let series = |x: &Vec2<f64>| {
        let (r, th) = (x.norm(), theta(x));
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            term *= r / k as f64;
            sum += term * (k as f64 * th).cos();
        }
        sum
    };
    let exp_err = interior_points().iter().map(|x| (ext.value(x) - series(x)).abs()).fold(0.0, f64::max);
    all(vec![
        at_most("constant", const_err, 1e-10),
        at_most("cosθ", cos_err, 1e-8),
        at_most("exp_series", exp_err, 1e-8),
    ])
}

fn ac14() -> Verdict {
    let mut parts = Vec::new();
    let mut names: Vec<PathBuf> = std::fs::read_dir(scenario_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    for path in names {
        let c = ScenarioConfig::from_path(&path).map_err(|e| e.to_string())?;
        if !c.expect.weak_solution {
            continue;
        }
        if c.battery.count < 10 {
            return Err(format!("{}: battery smaller than 10 fields", c.name));
        }
        let name = c.name.clone();
        let r = run_with(c, &["regular_functional_vanishes"]);
        parts.push(at_most(&name, metric(&r, "regular_functional_vanishes")?, 1e-5));
    }
    if parts.len() < 2 {
        return Err("fewer than two weak-solution scenarios".into());
    }
    all(parts)
}

fn ac15() -> Verdict {
    let ids = ["surface_integration_by_parts", "gauss_green", "transport_theorem_bulk", "weak_curvature_identity"];
    let a = run("translating_bubble", &ids).to_json();
    let b = run("translating_bubble", &ids).to_json();
    if a == b {
        Ok(format!("{} identical bytes", a.len()))
    } else {
        Err("reports differ between identical runs".into())
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Verdict); 15] = [
        ("AC1", "curvature ground truth", ac1),
        ("AC2", "curvature matrix structure", ac2),
        ("AC3", "surface integration by parts", ac3),
        ("AC4", "weak curvature identity", ac4),
        ("AC5", "transport theorem", ac5),
        ("AC6", "diffeomorphism contract", ac6),
        ("AC7", "energy equality", ac7),
        ("AC8", "weak transport equation", ac8),
        ("AC9", "perimeter identity", ac9),
        ("AC10", "momentum weak form", ac10),
        ("AC11", "pressure reconstruction", ac11),
        ("AC12", "projection constant", ac12),
        ("AC13", "harmonic extension", ac13),
        ("AC14", "regularized functional vanishes", ac14),
        ("AC15", "determinism", ac15),
    ];
    let mut failed = 0;
    for (id, title, check) in criteria {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(note) => println!("{id:<5} PASS  {title:<32} {note} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("{id:<5} FAIL  {title:<32} {why} ({secs:.1}s)");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
