//! The geometry and the harmonic extension are generic over the float type;
//! single precision must reproduce the double-precision oracles to f32 accuracy.

use approx::assert_relative_eq;

use twophase::fields::FnScalar;
use twophase::linalg::Vec2;
use twophase::pressure::{harmonic_extension, MfsSettings};
use twophase::surface::{check_surface_ibp, curvature_structure, ClosedCurve, Ellipsoid, Hypersurface};

/// Second spectral derivatives amplify round-off by about `M²·ε`.
fn curvature_floor(m: usize) -> f32 {
    (m * m) as f32 * f32::EPSILON
}

#[test]
fn circle_curvature_in_single_precision() {
    let c = ClosedCurve::<f32>::circle(Vec2::new(0.25, -0.5), 2.0, 128, false).unwrap();
    for kappa in c.mean_curvature() {
        assert_relative_eq!(kappa, -0.5f32, max_relative = curvature_floor(128));
    }
    assert_relative_eq!(c.measure(), 4.0 * std::f32::consts::PI, max_relative = 1e-5);
    assert_relative_eq!(c.enclosed_area(), 4.0 * std::f32::consts::PI, max_relative = 1e-5);
}

#[test]
fn sphere_curvature_in_single_precision() {
    let s = Ellipsoid::<f32>::sphere(Default::default(), 1.5, 32, 64).unwrap();
    for kappa in s.mean_curvature() {
        assert_relative_eq!(kappa, -2.0f32 / 1.5, max_relative = 1e-3);
    }
    let (asym, kernel) = curvature_structure(&s);
    assert!(asym < 1e-5 && kernel < 1e-5, "{asym} {kernel}");
}

#[test]
fn surface_ibp_in_single_precision() {
    let c = ClosedCurve::<f32>::ellipse(Vec2::new(0.1, 0.2), 1.3, 0.7, 128, false).unwrap();
    let f = FnScalar {
        f: |x: &Vec2<f32>| (0.4 * x[0]).exp() * x[1].sin(),
        grad: |x: &Vec2<f32>| {
            let e = (0.4 * x[0]).exp();
            Vec2::new(0.4 * e * x[1].sin(), e * x[1].cos())
        },
    };
    for axis in 0..2 {
        let r = check_surface_ibp(&c, &f, axis);
        assert!(r < 1e-5, "axis {axis}: {r}");
    }
    let (asym, kernel) = curvature_structure(&c);
    assert!(asym < curvature_floor(128) && kernel < curvature_floor(128), "{asym} {kernel}");
}

#[test]
fn harmonic_extension_in_single_precision() {
    let c = ClosedCurve::<f32>::circle(Vec2::new(0.0, 0.0), 1.0, 128, false).unwrap();
    let data: Vec<f32> = c.nodes().iter().map(|x| x[0]).collect();
    let settings = MfsSettings { ridge: 1e-5, tolerance: 1e-4, ..MfsSettings::default() };
    let m = harmonic_extension(&c, &data, &settings).unwrap();
    for x in [Vec2::new(0.3, 0.1), Vec2::new(-0.5, 0.4), Vec2::new(0.0, -0.7)] {
        assert!((m.value(&x) - x[0]).abs() < 1e-3, "{x:?}");
        assert!((m.gradient(&x) - Vec2::new(1.0, 0.0)).norm() < 1e-2, "{x:?}");
    }
}
