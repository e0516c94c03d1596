//! Reference computations shared by the integration tests. Everything here
//! works from point evaluations of the position vector alone.
#![allow(dead_code)]

use thirdform::geometry::SurfacePatch;

pub const MENAGERIE: [&str; 5] = [
    "sphere:r=1",
    "catenoid:a=1",
    "torus:a=2",
    "enneper",
    "parallel:base=catenoid:a=1,mu=0.5",
];

pub fn surface(spec: &str) -> SurfacePatch {
    SurfacePatch::from_spec(spec).unwrap_or_else(|e| panic!("{spec}: {e}"))
}

pub fn position(s: &SurfacePatch, u: f64, v: f64) -> [f64; 3] {
    let x = s.eval(u, v, 0).expect("position");
    [x[0].value(), x[1].value(), x[2].value()]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let l = dot(a, a).sqrt();
    [a[0] / l, a[1] / l, a[2] / l]
}

/// Third-form Laplacian of `f` at `(u, v)` from a `7×7` lattice of point
/// values with spacing `h`: normals by central differences, then
/// `-(1/√e) ∂_i(√e e^{ij} ∂_j f)` with central differences.
fn lattice_laplacian<F>(s: &SurfacePatch, f: &F, u: f64, v: f64, h: f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let at = |i: i32, j: i32| (u + i as f64 * h, v + j as f64 * h);
    let mut x = [[[0.0; 3]; 7]; 7];
    for i in -3..=3 {
        for j in -3..=3 {
            let (a, b) = at(i, j);
            x[(i + 3) as usize][(j + 3) as usize] = position(s, a, b);
        }
    }
    let xs = |i: i32, j: i32| x[(i + 3) as usize][(j + 3) as usize];
    let mut n = [[[0.0; 3]; 5]; 5];
    for i in -2..=2 {
        for j in -2..=2 {
            let xu = sub(xs(i + 1, j), xs(i - 1, j));
            let xv = sub(xs(i, j + 1), xs(i, j - 1));
            n[(i + 2) as usize][(j + 2) as usize] = unit(cross(xu, xv));
        }
    }
    let ns = |i: i32, j: i32| n[(i + 2) as usize][(j + 2) as usize];
    let fv = |i: i32, j: i32| {
        let (a, b) = at(i, j);
        f(a, b)
    };
    // e_ij, √e and ∂f at lattice point (i, j)
    let local = |i: i32, j: i32| {
        let nu = sub(ns(i + 1, j), ns(i - 1, j)).map(|c| c / (2.0 * h));
        let nv = sub(ns(i, j + 1), ns(i, j - 1)).map(|c| c / (2.0 * h));
        let (e11, e12, e22) = (dot(nu, nu), dot(nu, nv), dot(nv, nv));
        let det = e11 * e22 - e12 * e12;
        let fu = (fv(i + 1, j) - fv(i - 1, j)) / (2.0 * h);
        let fvv = (fv(i, j + 1) - fv(i, j - 1)) / (2.0 * h);
        let root = det.abs().sqrt();
        let flux_u = root * (e22 * fu - e12 * fvv) / det;
        let flux_v = root * (-e12 * fu + e11 * fvv) / det;
        (root, flux_u, flux_v)
    };
    let (root, _, _) = local(0, 0);
    let div = (local(1, 0).1 - local(-1, 0).1) / (2.0 * h) + (local(0, 1).2 - local(0, -1).2) / (2.0 * h);
    -div / root
}

/// Finite-difference third-form Laplacian with one Richardson step.
pub fn fd_laplacian_iii<F>(s: &SurfacePatch, f: F, u: f64, v: f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let h = 8e-3;
    let coarse = lattice_laplacian(s, &f, u, v, h);
    let fine = lattice_laplacian(s, &f, u, v, h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Relative least-squares residual `‖A z - y‖ / ‖y‖` by SVD, used as an
/// independent check on the detector.
pub fn lstsq_residual(columns: &[Vec<f64>], y: &[f64]) -> f64 {
    let rows = y.len();
    let a = nalgebra::DMatrix::from_fn(rows, columns.len(), |r, c| columns[c][r]);
    let b = nalgebra::DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let z = svd.solve(&b, 1e-13).expect("svd solve");
    (a * z - &b).norm() / b.norm()
}
