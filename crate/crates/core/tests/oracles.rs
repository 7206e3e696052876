//! Closed-form values of reported diagnostics, computed independently of the
//! library's quadrature.

use std::f64::consts::PI;
use std::path::PathBuf;

use twophase::harness::{run_scenario, RunOptions, ScenarioConfig};
use twophase::weak_form::Flow;

/// Periodic trapezoid of `(sin²2x + sin²2y)^{3/2} / 8` over the cell; the
/// integrand is C² where both sines vanish, so the rule converges fast.
fn convective_cube_integral(n: usize) -> f64 {
    let h = 2.0 * PI / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let sx = (2.0 * h * i as f64).sin().powi(2);
        for j in 0..n {
            let sy = (2.0 * h * j as f64).sin().powi(2);
            acc += (sx + sy).powf(1.5);
        }
    }
    acc * h * h / 8.0
}

#[test]
fn taylor_green_convective_norm_matches_closed_form() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/single_phase_taylor_green.json");
    let mut c = ScenarioConfig::from_path(&path).unwrap();
    c.checks.enabled = Some(vec!["convective_integrability".into()]);
    let Flow::TaylorGreen { nu } = c.flow else { panic!("scenario flow changed") };
    let t = c.t_end;

    // (v·∇)v = ½(sin 2x, sin 2y)e^{−4νt}, so |·|³ decays like e^{−12νt}
    let fine = convective_cube_integral(1200);
    assert!((fine - convective_cube_integral(600)).abs() < 1e-9 * fine);
    let expected = fine.cbrt() * ((1.0 - (-8.0 * nu * t).exp()) / (8.0 * nu)).sqrt();

    let r = run_scenario(c, &RunOptions::default()).unwrap();
    let got = r.check("convective_integrability").unwrap().values["total"];
    assert!((got - expected).abs() < 1e-3 * expected, "reported {got}, closed form {expected}");
}
