mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use proptest::prelude::*;
use thirdform::beltrami::VectorField;
use thirdform::geometry::{curvature_bundle, Form, Grid, SurfacePatch};
use thirdform::revolution::{
    classify_revolution, closed_form_components, coordinate_laplacian_radii,
    coordinate_laplacian_turning, Profile, RevolutionCase,
};
use thirdform::Error;

/// Composite Simpson rule with `n` (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn torus_radii_sum_at_a_third_of_pi() {
    let p = Profile::torus(2.0).unwrap();
    let c = closed_form_components(&p, PI / 3.0).unwrap();
    assert!((c.r - 6.0).abs() < 1e-12, "{}", c.r);
    let s = SurfacePatch::torus(2.0).unwrap();
    let generic = curvature_bundle(&s, PI / 3.0, 0.4).unwrap().r;
    assert!((generic - 6.0).abs() < 1e-10);
}

#[test]
fn vertical_coordinate_on_the_torus() {
    // φ = u + π/2, φ' = 1, φ'' = 0: Δx₃ = -2 cos φ = 2 sin u
    let s = SurfacePatch::torus(2.0).unwrap();
    let p = s.profile().unwrap().clone();
    let lap = VectorField::position().laplacian(Form::III);
    for (u, v) in Grid::new(9, 4).points(&s.domain()) {
        let want = 2.0 * u.sin();
        let generic = lap.values(&s, u, v).unwrap()[2];
        let turning = coordinate_laplacian_turning(&p, u, v).unwrap()[2];
        let radii = coordinate_laplacian_radii(&p, u, v).unwrap()[2];
        for got in [generic, turning, radii] {
            assert!((got - want).abs() < 1e-10, "u = {u}: {got} vs {want}");
        }
    }
}

#[test]
fn catenary_from_its_turning_angle() {
    let p = Profile::from_phi_expr("pi/2 - atan(u)", 1.0, 0.0, (-2.0, 2.0)).unwrap();
    for u in [-1.7, -0.4, 0.0, 0.9, 1.8] {
        let (f, g) = p.taylor(u, 3).unwrap();
        let w = (1.0 + u * u).sqrt();
        assert!((f[0] - w).abs() < 1e-9, "f({u})");
        assert!((g[0] - u.asinh()).abs() < 1e-9, "g({u})");
        assert!((f[1] - u / w).abs() < 1e-9 && (g[1] - 1.0 / w).abs() < 1e-9);
        // f'' = 1/(1+u²)^(3/2)
        assert!((2.0 * f[2] - w.powi(-3)).abs() < 1e-9);
    }
    let class = classify_revolution(Arc::new(p), Grid::new(9, 3), None).unwrap();
    assert_eq!(class.verdict, RevolutionCase::CaseIMinimal);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quadratic_turning_angles_integrate_correctly(a in 0.6..1.2f64, b in -0.4..0.4f64, c in -0.3..0.3f64,
                                                     t in 0.05..0.95f64) {
        let text = format!("{a} + {b}*u + {c}*u^2");
        let range = (-0.5, 0.5);
        let p = Profile::from_phi_expr(&text, 2.0, 0.0, range).unwrap();
        let phi = |s: f64| a + b * s + c * s * s;
        let u = range.0 + t * (range.1 - range.0);
        let (f, g) = p.taylor(u, 2).unwrap();
        let f_ref = 2.0 + simpson(|s| phi(s).cos(), 0.0, u, 2000);
        let g_ref = simpson(|s| phi(s).sin(), 0.0, u, 2000);
        prop_assert!((f[0] - f_ref).abs() < 1e-9 && (g[0] - g_ref).abs() < 1e-9);
        prop_assert!((f[1] - phi(u).cos()).abs() < 1e-12 && (g[1] - phi(u).sin()).abs() < 1e-12);
        let (angle, kappa) = p.turning_angle(u).unwrap();
        prop_assert!((angle - phi(u)).abs() < 1e-12 && (kappa - (b + 2.0 * c * u)).abs() < 1e-12);
    }

    #[test]
    fn radii_forms_agree_with_generic_laplacian(mu in 0.05..0.6f64, t in 0.05..0.95f64, v in 0.0..6.2f64) {
        let base = Arc::new(Profile::catenary(1.0).unwrap());
        let p = Arc::new(Profile::parallel(base, mu).unwrap());
        let s = SurfacePatch::revolution(p.clone());
        let d = s.domain();
        let u = d.u.0 + t * (d.u.1 - d.u.0);
        let generic = VectorField::position().laplacian(Form::III).values(&s, u, v).unwrap();
        let radii = coordinate_laplacian_radii(&p, u, v).unwrap();
        let c = closed_form_components(&p, u).unwrap();
        prop_assert!((c.r + 2.0 * mu).abs() < 1e-9, "R = {}", c.r);
        for k in 0..3 {
            prop_assert!((generic[k] - radii[k]).abs() < 1e-8);
        }
    }
}

#[test]
fn case_split() {
    let grid = Grid::new(9, 3);
    let torus = classify_revolution(Arc::new(Profile::torus(2.0).unwrap()), grid, None).unwrap();
    assert_eq!(torus.verdict, RevolutionCase::NonconstantR);
    let circle = classify_revolution(Arc::new(Profile::circle(1.5).unwrap()), grid, None).unwrap();
    assert_eq!(circle.verdict, RevolutionCase::CaseIIConstantR);
    assert!((circle.mean_r - 3.0).abs() < 1e-9);
    let cat = Arc::new(Profile::catenary(1.0).unwrap());
    let off = classify_revolution(Arc::new(Profile::parallel(cat, 0.25).unwrap()), grid, None).unwrap();
    assert_eq!(off.verdict, RevolutionCase::CaseIIConstantR);
    assert!((off.mean_r + 0.5).abs() < 1e-9);
    assert!(off.position_error.unwrap() < 1e-8);
}

#[test]
fn bad_profiles_are_rejected() {
    assert!(matches!(Profile::torus(1.0), Err(Error::InvalidParameter(_))));
    // cylinder: φ ≡ π/2 gives f' ≡ 0
    assert!(matches!(
        Profile::from_phi_expr(&format!("{FRAC_PI_2}"), 1.0, 0.0, (-1.0, 1.0)),
        Err(Error::InvalidProfile(_))
    ));
    // f crosses zero inside the range
    assert!(Profile::from_phi_expr("pi", 0.5, 0.0, (-1.0, 1.0)).is_err());
    // focal offset of the unit circle
    let circle = Arc::new(Profile::circle(1.0).unwrap());
    assert!(Profile::parallel(circle, 1.0).is_err());
}
