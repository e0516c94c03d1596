//! Finite-type detection for the third-form Laplacian.
//!
//! A surface is of finite type `k` when some monic polynomial
//! `F(t) = t^k + c₁t^{k-1} + … + c_k` annihilates `x - x₀`:
//! `(Δ)^k x + c₁(Δ)^{k-1}x + … + c_k x + b = 0` with `b = -c_k x₀`. The
//! detector samples `(Δ^III)^j x` on a grid and fits `c` and `b` by least
//! squares for `k = 1, 2, …`, accepting the first `k` whose residual is below
//! `tau`. The residual is the smallest singular value of the centred, weighted
//! iterate matrix, which never increases with `k`. The eigenvalues are the
//! roots of `F`.
//!
//! JSON schema of [`TypeReport`]:
//!
//! ```text
//! { "k": int,                         0 when no annihilator was accepted
//!   "coeffs": [c1, …, ck],
//!   "x0": [x, y, z] | null,           null when c_k ≈ 0 (null type)
//!   "eigenvalues": [{"re": .., "im": ..}, …],
//!   "residual": float,
//!   "null_type": bool,
//!   "verdict": "type<k>" | "null_type<k>" | "null_type2_parallel_minimal"
//!            | "not_finite_type_up_to_kmax",
//!   "residuals_by_k": [float, …],
//!   "warnings": [string, …] }
//! ```
//!
//! [`CoordTypeReport`] is `{ "a": [[..3], [..3], [..3]], "residual", "pass", "warnings" }`.

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use crate::beltrami::{VectorField, MAX_ITERATE};
use crate::error::{Error, Result};
use crate::geometry::{curvature_bundle, Form, Grid, SurfacePatch};

/// Default relative residual for accepting an annihilator.
pub const DEFAULT_TAU: f64 = 1e-6;
/// An eigenvalue below this magnitude counts as zero.
pub const NULL_EIGEN_TOL: f64 = 1e-5;
/// Imaginary parts below this are dropped.
pub const IMAG_TOL: f64 = 1e-6;
pub const COORD_PASS: f64 = 1e-6;
/// Default detection grid.
pub const DETECT_GRID: Grid = Grid { nu: 5, nv: 5 };

/// `(Δ^III)^k x` for `k = 0..=k_max` at every grid point.
#[derive(Debug, Clone, Serialize)]
pub struct IterateTable {
    pub surface: String,
    pub grid: String,
    pub points: Vec<(f64, f64)>,
    /// `values[k][p]`
    pub values: Vec<Vec<[f64; 3]>>,
    pub k_max: usize,
}

pub fn sample_iterates(s: &SurfacePatch, k_max: usize, grid: Grid) -> Result<IterateTable> {
    if k_max > MAX_ITERATE {
        return Err(Error::InsufficientOrder {
            needed: VectorField::position().iterate(Form::III, k_max).cost(),
            available: s.max_order(),
        });
    }
    let points = grid.staggered_points(&s.domain());
    let mut values = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let field = VectorField::position().iterate(Form::III, k);
        let mut row = Vec::with_capacity(points.len());
        for &(u, v) in &points {
            let val = field.values(s, u, v)?;
            if val.iter().any(|x| !x.is_finite()) {
                return Err(Error::Degenerate(format!("non-finite iterate at ({u}, {v})")));
            }
            row.push(val);
        }
        values.push(row);
    }
    Ok(IterateTable {
        surface: s.label().to_string(),
        grid: grid.label(),
        points,
        values,
        k_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigen {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeReport {
    pub k: usize,
    pub coeffs: Vec<f64>,
    pub x0: Option<[f64; 3]>,
    pub eigenvalues: Vec<Eigen>,
    pub residual: f64,
    pub null_type: bool,
    pub verdict: String,
    pub residuals_by_k: Vec<f64>,
    pub warnings: Vec<String>,
}

struct Fit {
    coeffs: Vec<f64>,
    b: [f64; 3],
    residual: f64,
    warning: Option<String>,
}

/// Least-squares solve with column equilibration; returns the solution and a
/// conditioning warning when the scaled matrix is numerically rank deficient.
fn lstsq(mut a: DMatrix<f64>, y: &DVector<f64>) -> (DVector<f64>, Option<String>) {
    let n = a.ncols();
    let mut scale = vec![1.0; n];
    for (j, s) in scale.iter_mut().enumerate() {
        let m = a.column(j).amax();
        if m > 0.0 {
            *s = m;
            a.column_mut(j).scale_mut(1.0 / m);
        }
    }
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let warning = if smin <= 1e-12 * smax {
        Some(format!("ill-conditioned least squares: σ_min/σ_max = {:e}", smin / smax))
    } else {
        None
    };
    let z = svd
        .solve(y, 1e-13 * smax)
        .unwrap_or_else(|_| DVector::zeros(n));
    let z = DVector::from_iterator(n, z.iter().zip(&scale).map(|(v, s)| v / s));
    (z, warning)
}

fn fit(t: &IterateTable, k: usize) -> Fit {
    let p = t.points.len();
    let rows = 3 * p;
    let mut a = DMatrix::<f64>::zeros(rows, k + 3);
    let mut y = DVector::<f64>::zeros(rows);
    for (pi, _) in t.points.iter().enumerate() {
        for c in 0..3 {
            let r = 3 * pi + c;
            y[r] = -t.values[k][pi][c];
            for i in 1..=k {
                a[(r, i - 1)] = t.values[k - i][pi][c];
            }
            a[(r, k + c)] = 1.0;
        }
    }
    let (z, warning) = lstsq(a, &y);
    Fit {
        coeffs: (0..k).map(|i| z[i]).collect(),
        b: [z[k], z[k + 1], z[k + 2]],
        residual: nested_residual(t, k),
        warning,
    }
}

/// Smallest singular value of the centred iterate columns `x, Δx, …, Δ^k x`,
/// each divided by `max(‖Δ^j x‖, ‖x‖)` (centred norms). Centring absorbs the
/// affine term; the column weights do not depend on `k`, so the degree-`k+1`
/// matrix extends the degree-`k` one and the residual cannot increase with `k`.
fn nested_residual(t: &IterateTable, k: usize) -> f64 {
    let p = t.points.len();
    let mut a = DMatrix::<f64>::zeros(3 * p, k + 1);
    for j in 0..=k {
        for c in 0..3 {
            let mean = t.values[j].iter().map(|r| r[c]).sum::<f64>() / p as f64;
            for (pi, r) in t.values[j].iter().enumerate() {
                a[(3 * pi + c, j)] = r[c] - mean;
            }
        }
    }
    let floor = a.column(0).norm();
    for j in 0..=k {
        let n = a.column(j).norm().max(floor);
        if n > 0.0 {
            a.column_mut(j).scale_mut(1.0 / n);
        }
    }
    a.svd(false, false).singular_values.min()
}

/// Roots of `t^k + c₁t^{k-1} + … + c_k` from the companion matrix, sorted by
/// real then imaginary part.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Eigen> {
    let k = coeffs.len();
    if k == 0 {
        return vec![];
    }
    let mut comp = DMatrix::<f64>::zeros(k, k);
    for (j, c) in coeffs.iter().enumerate() {
        comp[(0, j)] = -c;
    }
    for i in 1..k {
        comp[(i, i - 1)] = 1.0;
    }
    let mut roots: Vec<Eigen> = comp
        .complex_eigenvalues()
        .iter()
        .map(|z| Eigen {
            re: z.re,
            im: if z.im.abs() < IMAG_TOL { 0.0 } else { z.im },
        })
        .collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

/// Fits the lowest-degree annihilating polynomial with relative residual below
/// `tau`, trying `k = 1..=k_max`.
pub fn minimal_annihilator(t: &IterateTable, k_max: usize, tau: f64) -> Result<TypeReport> {
    if k_max == 0 || k_max > t.k_max {
        return Err(Error::InvalidParameter(format!(
            "k_max = {k_max} needs 1 ..= {} (table depth)",
            t.k_max
        )));
    }
    let equations = 3 * t.points.len();
    if equations < 3 * (k_max + 4) {
        return Err(Error::InvalidParameter(format!(
            "{equations} equations are too few for k_max = {k_max}"
        )));
    }
    let mut residuals = Vec::with_capacity(k_max);
    let mut warnings = Vec::new();
    let mut accepted = None;
    for k in 1..=k_max {
        let f = fit(t, k);
        residuals.push(f.residual);
        if let Some(w) = &f.warning {
            warnings.push(format!("k = {k}: {w}"));
        }
        if f.residual < tau {
            accepted = Some((k, f));
            break;
        }
    }
    let Some((k, f)) = accepted else {
        let residual = *residuals.last().unwrap_or(&f64::NAN);
        return Ok(TypeReport {
            k: 0,
            coeffs: vec![],
            x0: None,
            eigenvalues: vec![],
            residual,
            null_type: false,
            verdict: "not_finite_type_up_to_kmax".into(),
            residuals_by_k: residuals,
            warnings,
        });
    };
    let eigenvalues = polynomial_roots(&f.coeffs);
    let null_type = eigenvalues
        .iter()
        .any(|e| e.re.hypot(e.im) < NULL_EIGEN_TOL);
    let ck = f.coeffs[k - 1];
    let x0 = if null_type || ck.abs() <= 1e-10 {
        warnings.push("null type: translation x0 unidentifiable".into());
        None
    } else {
        Some(f.b.map(|b| -b / ck))
    };
    let near = |e: &Eigen, v: f64| (e.re - v).hypot(e.im) < NULL_EIGEN_TOL;
    let verdict = if k == 2 && near(&eigenvalues[0], 0.0) && near(&eigenvalues[1], 2.0) {
        "null_type2_parallel_minimal".to_string()
    } else if null_type {
        format!("null_type{k}")
    } else {
        format!("type{k}")
    };
    Ok(TypeReport {
        k,
        coeffs: f.coeffs,
        x0,
        eigenvalues,
        residual: f.residual,
        null_type,
        verdict,
        residuals_by_k: residuals,
        warnings,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CoordTypeReport {
    pub a: [[f64; 3]; 3],
    pub residual: f64,
    pub pass: bool,
    pub warnings: Vec<String>,
}

/// Least-squares `A` in `Δ^III x = A x`, with relative residual
/// `‖D - X Aᵀ‖ / max(‖D‖, ‖X‖)` over the table's `k = 0, 1` rows.
pub fn coordinate_type(t: &IterateTable) -> Result<CoordTypeReport> {
    if t.k_max < 1 {
        return Err(Error::InvalidParameter("coordinate type needs Δx in the table".into()));
    }
    let p = t.points.len();
    let x = DMatrix::from_fn(p, 3, |i, c| t.values[0][i][c]);
    let d = DMatrix::from_fn(p, 3, |i, c| t.values[1][i][c]);
    let mut a = [[0.0; 3]; 3];
    let mut warnings = Vec::new();
    for r in 0..3 {
        let (row, w) = lstsq(x.clone(), &d.column(r).into_owned());
        if let Some(w) = w {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        for c in 0..3 {
            a[r][c] = row[c];
        }
    }
    let am = DMatrix::from_fn(3, 3, |r, c| a[r][c]);
    let resid = (&d - &x * am.transpose()).norm();
    let scale = d.norm().max(x.norm());
    let residual = if scale > 0.0 { resid / scale } else { resid };
    Ok(CoordTypeReport {
        a,
        residual,
        pass: residual < COORD_PASS,
        warnings,
    })
}

fn symmetric_check(expanded: &[f64], coeffs: &[f64]) -> bool {
    expanded.len() == coeffs.len()
        && expanded
            .iter()
            .zip(coeffs)
            .all(|(e, c)| (e - c).abs() <= 1e-6 * c.abs().max(1.0))
}

/// `c_i = (-1)^i e_i(λ)`: the coefficients of `Π (t - λ_i)`.
pub fn sigma_check(eigenvalues: &[f64], coeffs: &[f64]) -> bool {
    let mut poly = vec![1.0];
    for &l in eigenvalues {
        let mut next = vec![0.0; poly.len() + 1];
        for (i, &p) in poly.iter().enumerate() {
            next[i] += p;
            next[i + 1] -= l * p;
        }
        poly = next;
    }
    symmetric_check(&poly[1..], coeffs)
}

/// [`sigma_check`] for complex eigenvalues; the expansion must come out real.
pub fn sigma_check_complex(eigenvalues: &[Eigen], coeffs: &[f64]) -> bool {
    let mut poly = vec![Complex::new(1.0, 0.0)];
    for e in eigenvalues {
        let l = Complex::new(e.re, e.im);
        let mut next = vec![Complex::new(0.0, 0.0); poly.len() + 1];
        for (i, &p) in poly.iter().enumerate() {
            next[i] += p;
            next[i + 1] -= l * p;
        }
        poly = next;
    }
    if poly.iter().any(|z| z.im.abs() > 1e-6 * z.re.abs().max(1.0)) {
        return false;
    }
    let re: Vec<f64> = poly[1..].iter().map(|z| z.re).collect();
    symmetric_check(&re, coeffs)
}

/// Sum of principal radii and position at the sample points.
#[derive(Debug, Clone, Serialize)]
pub struct RadiiStats {
    pub values: Vec<f64>,
    pub positions: Vec<[f64; 3]>,
}

impl RadiiStats {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// `max |R - mean R|`
    pub fn max_dev(&self) -> f64 {
        let mean = self.mean();
        self.values.iter().fold(0.0, |m, r| m.max((r - mean).abs()))
    }

    pub fn std_dev(&self) -> f64 {
        let mean = self.mean();
        let n = self.values.len() as f64;
        (self.values.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n).sqrt()
    }

    pub fn is_constant(&self) -> bool {
        self.max_dev() <= 1e-6 * self.mean().abs().max(1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() <= 1e-6
    }
}

pub fn radii_stats(s: &SurfacePatch, grid: Grid) -> Result<RadiiStats> {
    let mut values = Vec::new();
    let mut positions = Vec::new();
    for (u, v) in grid.points(&s.domain()) {
        values.push(curvature_bundle(s, u, v)?.r);
        positions.push(crate::jets::values3(&s.eval(u, v, 0)?));
    }
    Ok(RadiiStats { values, positions })
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub label: String,
    pub diagnostics: Vec<String>,
}

/// Combines the detector, the coordinate-type fit and the radii statistics into
/// one of `sphere_type1`, `minimal_null1`, `parallel_minimal_null2`,
/// `infinite_type_suspected` or `inconclusive`.
pub fn classify(tr: &TypeReport, cr: &CoordTypeReport, stats: &RadiiStats) -> Classification {
    let mut diagnostics = Vec::new();
    let (r_const, r_zero) = (stats.is_constant(), stats.is_zero());
    diagnostics.push(format!(
        "R: mean {:.6e}, max |R - mean| {:.3e}",
        stats.mean(),
        stats.max_dev()
    ));
    let on_sphere = tr.x0.map(|x0| {
        let radii: Vec<f64> = stats
            .positions
            .iter()
            .map(|p| ((p[0] - x0[0]).powi(2) + (p[1] - x0[1]).powi(2) + (p[2] - x0[2]).powi(2)).sqrt())
            .collect();
        let mean = radii.iter().sum::<f64>() / radii.len() as f64;
        let spread = radii.iter().fold(0.0f64, |m, r| m.max((r - mean).abs()));
        spread <= 1e-6 * mean.max(1.0)
    });
    let label = if tr.k == 1 && tr.null_type && r_zero {
        "minimal_null1"
    } else if tr.k == 1 && !tr.null_type && r_const && !r_zero && on_sphere == Some(true) {
        "sphere_type1"
    } else if tr.k == 2 && tr.null_type && r_const && !r_zero {
        "parallel_minimal_null2"
    } else if tr.k == 0 && !r_const {
        "infinite_type_suspected"
    } else {
        if tr.k == 0 && r_const {
            diagnostics.push("constant R but no annihilator up to k_max".into());
        }
        if tr.k > 0 && !r_const {
            diagnostics.push(format!("annihilator of degree {} but R is not constant", tr.k));
        }
        if on_sphere == Some(false) {
            diagnostics.push("type 1 but |x - x0| is not constant".into());
        }
        "inconclusive"
    };
    if label != "inconclusive" && tr.k == 1 && !cr.pass {
        diagnostics.push(format!("coordinate type fails (residual {:e})", cr.residual));
    }
    Classification {
        label: label.to_string(),
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_examples() {
        assert!(sigma_check(&[2.0], &[-2.0]));
        assert!(sigma_check(&[0.0, 2.0], &[-2.0, 0.0]));
        assert!(sigma_check(&[1.0, 2.0, 3.0], &[-6.0, 11.0, -6.0]));
        assert!(!sigma_check(&[1.0, 2.0], &[-3.0, 3.0]));
        let conj = [Eigen { re: 1.0, im: 2.0 }, Eigen { re: 1.0, im: -2.0 }];
        assert!(sigma_check_complex(&conj, &[-2.0, 5.0]));
    }

    #[test]
    fn companion_roots() {
        let r = polynomial_roots(&[-6.0, 11.0, -6.0]);
        for (e, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((e.re - want).abs() < 1e-10 && e.im == 0.0);
        }
        let r = polynomial_roots(&[0.0, 1.0]);
        assert!((r[0].im + 1.0).abs() < 1e-12 && (r[1].im - 1.0).abs() < 1e-12);
    }

    fn synthetic(lambdas: &[f64], x0: [f64; 3]) -> IterateTable {
        // x = x0 + Σ_i y_i with Δ y_i = λ_i y_i
        let points: Vec<(f64, f64)> = (0..20).map(|i| (i as f64 * 0.37, i as f64 * 0.11)).collect();
        let comps: Vec<Vec<[f64; 3]>> = lambdas
            .iter()
            .enumerate()
            .map(|(j, _)| {
                points
                    .iter()
                    .map(|&(u, v)| {
                        let a = (j + 1) as f64;
                        [(a * u).sin() + v, (a * v).cos() * u, (u * v * a).sin()]
                    })
                    .collect()
            })
            .collect();
        let values = (0..=3)
            .map(|k| {
                (0..points.len())
                    .map(|p| {
                        let mut out = if k == 0 { x0 } else { [0.0; 3] };
                        for (j, l) in lambdas.iter().enumerate() {
                            for c in 0..3 {
                                out[c] += l.powi(k) * comps[j][p][c];
                            }
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        IterateTable {
            surface: "synthetic".into(),
            grid: "20".into(),
            points,
            values,
            k_max: 3,
        }
    }

    #[test]
    fn recovers_synthetic_spectra() {
        let t = synthetic(&[3.0], [1.0, -2.0, 0.5]);
        let r = minimal_annihilator(&t, 3, DEFAULT_TAU).unwrap();
        assert_eq!((r.k, r.verdict.as_str()), (1, "type1"));
        assert!((r.eigenvalues[0].re - 3.0).abs() < 1e-9);
        let x0 = r.x0.unwrap();
        assert!((x0[0] - 1.0).abs() < 1e-8 && (x0[1] + 2.0).abs() < 1e-8);

        let t = synthetic(&[0.0, 2.0], [0.3, 0.0, 0.0]);
        let r = minimal_annihilator(&t, 3, DEFAULT_TAU).unwrap();
        assert_eq!(r.verdict, "null_type2_parallel_minimal");
        assert!(r.x0.is_none());

        let t = synthetic(&[1.0, 2.0, 3.0], [0.0; 3]);
        let r = minimal_annihilator(&t, 3, DEFAULT_TAU).unwrap();
        assert_eq!(r.k, 3);
        let re: Vec<f64> = r.eigenvalues.iter().map(|e| e.re).collect();
        assert!(sigma_check(&re, &r.coeffs));
    }

    #[test]
    fn too_few_equations() {
        let mut t = synthetic(&[1.0], [0.0; 3]);
        t.points.truncate(2);
        assert!(minimal_annihilator(&t, 3, DEFAULT_TAU).is_err());
    }
}
