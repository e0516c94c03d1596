mod common;

use proptest::prelude::*;
use thirdform::finitetype::{
    coordinate_type, minimal_annihilator, polynomial_roots, sample_iterates, sigma_check,
    sigma_check_complex, IterateTable, DEFAULT_TAU, DETECT_GRID,
};
use thirdform::geometry::{RigidMotion, SurfacePatch};
use thirdform::revolution::Profile;

use common::surface;

/// Rotation about a unit axis by Rodrigues' formula.
fn rotation(axis: [f64; 3], angle: f64) -> [[f64; 3]; 3] {
    let l = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [x, y, z] = axis.map(|a| a / l);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

fn table(s: &SurfacePatch, k: usize) -> IterateTable {
    sample_iterates(s, k, DETECT_GRID).unwrap()
}

fn eigen_re(s: &SurfacePatch) -> (usize, Vec<f64>, f64) {
    let tr = minimal_annihilator(&table(s, 4), 4, DEFAULT_TAU).unwrap();
    (tr.k, tr.eigenvalues.iter().map(|e| e.re).collect(), tr.residual)
}

const FINITE: [&str; 4] = ["sphere:r=1", "catenoid:a=1", "enneper", "parallel:base=catenoid:a=1,mu=0.25"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn translation_changes_only_the_centre(which in 0usize..4, t in prop::array::uniform3(-5.0..5.0f64)) {
        let base = surface(FINITE[which]);
        let moved = SurfacePatch::rigid(base.clone(), RigidMotion::translation(t));
        let a = minimal_annihilator(&table(&base, 4), 4, DEFAULT_TAU).unwrap();
        let b = minimal_annihilator(&table(&moved, 4), 4, DEFAULT_TAU).unwrap();
        prop_assert_eq!(a.k, b.k);
        prop_assert_eq!(&a.verdict, &b.verdict);
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((x.re - y.re).abs() <= 1e-8 && (x.im - y.im).abs() <= 1e-8);
        }
        prop_assert!((a.residual - b.residual).abs() <= 1e-8);
        if let (Some(x0), Some(y0)) = (a.x0, b.x0) {
            for c in 0..3 {
                prop_assert!((y0[c] - x0[c] - t[c]).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn rotation_conjugates_the_coordinate_matrix(which in 0usize..3,
                                                 axis in prop::array::uniform3(-1.0..1.0f64),
                                                 angle in 0.1..3.0f64) {
        prop_assume!(axis.iter().map(|a| a * a).sum::<f64>() > 0.01);
        let base = surface(["sphere:r=1", "catenoid:a=1", "torus:a=2"][which]);
        let q = rotation(axis, angle);
        let motion = RigidMotion { rotation: q, translation: [0.0; 3] };
        let a = coordinate_type(&table(&base, 1)).unwrap().a;
        let b = coordinate_type(&table(&SurfacePatch::rigid(base, motion), 1)).unwrap().a;
        for i in 0..3 {
            for j in 0..3 {
                let mut qaqt = 0.0;
                for k in 0..3 {
                    for l in 0..3 {
                        qaqt += q[i][k] * a[k][l] * q[j][l];
                    }
                }
                prop_assert!((b[i][j] - qaqt).abs() <= 1e-7, "({i},{j}): {} vs {qaqt}", b[i][j]);
            }
        }
    }

    #[test]
    fn sigma_relations_hold_for_accepted_reports(which in 0usize..4, angle in 0.0..3.0f64) {
        let motion = RigidMotion { rotation: rotation([1.0, 2.0, 0.5], angle), translation: [0.3, -1.0, 2.0] };
        let s = SurfacePatch::rigid(surface(FINITE[which]), motion);
        let tr = minimal_annihilator(&table(&s, 4), 4, DEFAULT_TAU).unwrap();
        prop_assert!(tr.k > 0);
        prop_assert!(sigma_check_complex(&tr.eigenvalues, &tr.coeffs));
        let real: Vec<f64> = tr.eigenvalues.iter().map(|e| e.re).collect();
        prop_assert!(sigma_check(&real, &tr.coeffs));
    }

    #[test]
    fn synthetic_polynomials_are_recovered(roots in prop::collection::vec(-3.0..3.0f64, 1..5)) {
        // coefficients of Π(t - r)
        let mut poly = vec![1.0];
        for &r in &roots {
            let mut next = vec![0.0; poly.len() + 1];
            for (i, &p) in poly.iter().enumerate() {
                next[i] += p;
                next[i + 1] -= r * p;
            }
            poly = next;
        }
        let found = polynomial_roots(&poly[1..]);
        let mut want = roots.clone();
        want.sort_by(f64::total_cmp);
        prop_assert!(sigma_check_complex(&found, &poly[1..]));
        // well separated roots come back individually
        let gap = want.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if gap > 0.1 {
            for (f, w) in found.iter().zip(&want) {
                prop_assert!((f.re - w).abs() < 1e-8 && f.im == 0.0);
            }
        }
    }
}

#[test]
fn residuals_decrease_with_degree() {
    let phi_profile = Profile::from_spec("phi:1 + 0.5*u + 0.3*u^2;f0=1;u0=0;range=-0.6:0.6").unwrap();
    let mut surfaces: Vec<SurfacePatch> = ["torus:a=2", "torus:a=3", "sphere:r=2", "enneper", "catenoid:a=1"]
        .iter()
        .map(|s| surface(s))
        .collect();
    surfaces.push(SurfacePatch::revolution(std::sync::Arc::new(phi_profile)));
    for s in &surfaces {
        // tau = 0 never accepts, so every degree is fitted
        let tr = minimal_annihilator(&table(s, 4), 4, 0.0).unwrap();
        assert_eq!(tr.residuals_by_k.len(), 4);
        for w in tr.residuals_by_k.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{}: {:?}", s.label(), tr.residuals_by_k);
        }
    }
}

#[test]
fn offsets_of_the_catenoid_keep_the_spectrum() {
    for mu in [0.1, 0.25, 0.5] {
        let s = SurfacePatch::parallel(surface("catenoid:a=1"), mu).unwrap();
        let (k, ev, _) = eigen_re(&s);
        assert_eq!(k, 2, "μ = {mu}");
        assert!(ev[0].abs() < 1e-5 && (ev[1] - 2.0).abs() < 1e-5, "μ = {mu}: {ev:?}");
    }
}

#[test]
fn spheres_of_any_radius_have_eigenvalue_two() {
    for r in [0.5, 1.0, 3.0] {
        let (k, ev, _) = eigen_re(&SurfacePatch::sphere(r).unwrap());
        assert_eq!(k, 1);
        assert!((ev[0] - 2.0).abs() < 1e-6, "r = {r}: {ev:?}");
    }
}

#[test]
fn tori_are_not_of_low_type() {
    for (a, floor) in [(2.0, 1e-2), (3.0, 1e-3)] {
        let tr = minimal_annihilator(&table(&SurfacePatch::torus(a).unwrap(), 4), 4, DEFAULT_TAU).unwrap();
        assert_eq!(tr.verdict, "not_finite_type_up_to_kmax");
        assert!(tr.residuals_by_k.iter().all(|&r| r > floor), "a = {a}: {:?}", tr.residuals_by_k);
    }
}

#[test]
fn sphere_centre_is_recovered() {
    let motion = RigidMotion::translation([1.0, -2.0, 0.5]);
    let s = SurfacePatch::rigid(SurfacePatch::sphere(1.5).unwrap(), motion);
    let tr = minimal_annihilator(&table(&s, 2), 2, DEFAULT_TAU).unwrap();
    let x0 = tr.x0.expect("centre");
    for (a, b) in x0.iter().zip([1.0, -2.0, 0.5]) {
        assert!((a - b).abs() < 1e-8);
    }
}
