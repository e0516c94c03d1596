//! Closed forms on surfaces of revolution: the specialized third-form Laplacian,
//! the coordinate Laplacians in turning-angle and radii form, and the
//! constant-`R` case split.

use std::sync::Arc;

use serde::Serialize;

use super::{phi_series, Profile};
use crate::beltrami::{laplacian, ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::geometry::{gauss_map, Form, Grid, SurfacePatch};
use crate::jets::{values3, Jet2, Var};

const GUARD: f64 = 1e-12;

fn guard(x: f64, what: &str, u: f64) -> Result<f64> {
    if x.abs() < GUARD {
        return Err(Error::Degenerate(format!("{what} = {x:e} at u = {u}")));
    }
    Ok(x)
}

/// Profile-level scalars at one `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForms {
    pub g11: f64,
    pub g22: f64,
    pub e11: f64,
    pub e22: f64,
    /// Sum of principal radii, `1/φ' + f/sin φ`.
    pub r: f64,
    /// `dR/du = -φ''/φ'² - f φ' cos φ / sin²φ + cos φ / sin φ`.
    pub r_prime: f64,
    pub phi: f64,
    pub kappa: f64,
    pub f: f64,
}

pub fn closed_form_components(p: &Profile, u: f64) -> Result<ClosedForms> {
    let (phi0, _) = p.turning_angle(u)?;
    let (f, g) = p.taylor(u, 3)?;
    let phi = phi_series(&f, &g, phi0, 2);
    let (dphi, ddphi) = (phi[1], 2.0 * phi[2]);
    let (s, c) = phi0.sin_cos();
    guard(s, "sin φ", u)?;
    guard(dphi, "φ'", u)?;
    let (f1, f2, g1, g2) = (f[1], 2.0 * f[2], g[1], 2.0 * g[2]);
    Ok(ClosedForms {
        g11: f1 * f1 + g1 * g1,
        g22: f[0] * f[0],
        e11: f2 * f2 + g2 * g2,
        e22: g1 * g1,
        r: 1.0 / dphi + f[0] / s,
        r_prime: -ddphi / (dphi * dphi) - f[0] * dphi * c / (s * s) + c / s,
        phi: phi0,
        kappa: dphi,
        f: f[0],
    })
}

fn revolution_profile(s: &SurfacePatch) -> Result<&Arc<Profile>> {
    s.profile()
        .ok_or_else(|| Error::InvalidParameter(format!("{} is not a surface of revolution", s.label())))
}

/// Second and first partials of `f` at order `m`: `(f_uu, f_vv, f_u)`.
fn field_partials(s: &SurfacePatch, field: &ScalarField, u: f64, v: f64, m: usize) -> Result<(Jet2, Jet2, Jet2)> {
    let fj = field.eval(s, u, v, m + 2)?;
    let fu = fj.diff(Var::U)?;
    let fuu = fu.diff(Var::U)?;
    let fvv = fj.diff(Var::V)?.diff(Var::V)?;
    Ok((fuu, fvv, fu.truncate(m)))
}

/// `Δ^III f` through the profile: with `κ = f'g'' - g'f''`,
/// `-f_uu/κ² - f_vv/g'² + (g'κ' - κg'')/(κ³g') f_u`.
pub fn laplacian_iii_revolution(
    s: &SurfacePatch,
    field: &ScalarField,
    u: f64,
    v: f64,
    order: usize,
) -> Result<Jet2> {
    let p = revolution_profile(s)?;
    let m = order;
    let (pf, pg) = p.eval(u, m + 3)?;
    let f1 = pf.diff(Var::U)?;
    let g1 = pg.diff(Var::U)?;
    let f2 = f1.diff(Var::U)?;
    let g2 = g1.diff(Var::U)?;
    let kappa = (f1 * g2) - (g1 * f2);
    let dkappa = kappa.diff(Var::U)?;
    guard(kappa.value(), "κ", u)?;
    guard(g1.value(), "g'", u)?;
    let (fuu, fvv, fu) = field_partials(s, field, u, v, m)?;
    let k2 = kappa * kappa;
    let a = k2.recip()?;
    let b = (g1 * g1).recip()?;
    let c = ((g1 * dkappa) - (kappa * g2)).checked_div(&((k2 * kappa) * g1))?;
    Ok(((-(a * fuu)) - (b * fvv)) + (c * fu))
}

/// The same operator written with the turning angle:
/// `-f_uu/φ'² - f_vv/sin²φ + [φ''/φ'³ - cos φ/(φ' sin φ)] f_u`.
pub fn laplacian_iii_turning(
    s: &SurfacePatch,
    field: &ScalarField,
    u: f64,
    v: f64,
    order: usize,
) -> Result<Jet2> {
    let p = revolution_profile(s)?;
    let m = order;
    let phi = Jet2::from_univariate(Var::U, &p.turning_series(u, m + 2)?, m + 2);
    let d1 = phi.diff(Var::U)?;
    let d2 = d1.diff(Var::U)?;
    let (sn, cs) = (phi.sin(), phi.cos());
    guard(d1.value(), "φ'", u)?;
    guard(sn.value(), "sin φ", u)?;
    let (fuu, fvv, fu) = field_partials(s, field, u, v, m)?;
    let a = (d1 * d1).recip()?;
    let b = (sn * sn).recip()?;
    let c = d2.checked_div(&((d1 * d1) * d1))? - cs.checked_div(&(d1 * sn))?;
    Ok(((-(a * fuu)) - (b * fvv)) + (c * fu))
}

/// `Δ^III x` from `φ`, `φ'`, `φ''` and `f` alone:
/// `x₁, x₂: (φ'' cos φ/φ'³ + 2 sin φ/φ' - 1/(φ' sin φ) + f/sin²φ)(cos v, sin v)`,
/// `x₃: φ'' sin φ/φ'³ - 2 cos φ/φ'`.
pub fn coordinate_laplacian_turning(p: &Profile, u: f64, v: f64) -> Result<[f64; 3]> {
    let (phi0, _) = p.turning_angle(u)?;
    let (f, g) = p.taylor(u, 3)?;
    let phi = phi_series(&f, &g, phi0, 2);
    let (d1, d2) = (guard(phi[1], "φ'", u)?, 2.0 * phi[2]);
    let (s, c) = phi0.sin_cos();
    guard(s, "sin φ", u)?;
    let radial = d2 * c / d1.powi(3) + 2.0 * s / d1 - 1.0 / (d1 * s) + f[0] / (s * s);
    Ok([
        radial * v.cos(),
        radial * v.sin(),
        d2 * s / d1.powi(3) - 2.0 * c / d1,
    ])
}

/// `Δ^III x` from `R` and `R'`:
/// `x₁, x₂: (R sin φ - R' cos φ/φ')(cos v, sin v)`, `x₃: -R cos φ - R' sin φ/φ'`.
pub fn coordinate_laplacian_radii(p: &Profile, u: f64, v: f64) -> Result<[f64; 3]> {
    let c = closed_form_components(p, u)?;
    let (s, cs) = c.phi.sin_cos();
    let radial = c.r * s - c.r_prime * cs / c.kappa;
    Ok([
        radial * v.cos(),
        radial * v.sin(),
        -c.r * cs - c.r_prime * s / c.kappa,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RevolutionCase {
    #[serde(rename = "CaseI_minimal")]
    CaseIMinimal,
    #[serde(rename = "CaseII_constantR")]
    CaseIIConstantR,
    #[serde(rename = "nonconstant_R")]
    NonconstantR,
}

impl RevolutionCase {
    pub fn label(self) -> &'static str {
        match self {
            RevolutionCase::CaseIMinimal => "CaseI_minimal",
            RevolutionCase::CaseIIConstantR => "CaseII_constantR",
            RevolutionCase::NonconstantR => "nonconstant_R",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RevolutionClass {
    pub verdict: RevolutionCase,
    pub mean_r: f64,
    pub max_abs_r: f64,
    /// `max |R - mean R|`
    pub max_dev: f64,
    pub tol: f64,
    /// `max |Δ^III x + R n|`, measured for the constant-`R` case.
    pub position_error: Option<f64>,
}

/// Splits a profile by its sum of principal radii: `R ≡ 0`, `R ≡ c ≠ 0`, or
/// nonconstant. `tol` defaults to `1e-6 · max(1, |mean R|)`. For constant
/// `R ≠ 0` it also measures `Δ^III x = -R n` on the grid.
pub fn classify_revolution(p: Arc<Profile>, grid: Grid, tol: Option<f64>) -> Result<RevolutionClass> {
    let s = SurfacePatch::revolution(p.clone());
    let pts = grid.points(&s.domain());
    let mut rs = Vec::with_capacity(pts.len());
    for &(u, _) in &pts {
        rs.push(closed_form_components(&p, u)?.r);
    }
    let mean = rs.iter().sum::<f64>() / rs.len() as f64;
    let max_abs = rs.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let max_dev = rs.iter().fold(0.0f64, |m, r| m.max((r - mean).abs()));
    let tol = tol.unwrap_or(1e-6 * mean.abs().max(1.0));
    let verdict = if max_abs < tol {
        RevolutionCase::CaseIMinimal
    } else if max_dev < tol {
        RevolutionCase::CaseIIConstantR
    } else {
        RevolutionCase::NonconstantR
    };
    let position_error = if verdict == RevolutionCase::CaseIIConstantR {
        let x = VectorField::position();
        let mut worst = 0.0f64;
        for (&(u, v), r) in pts.iter().zip(&rs) {
            let n = values3(&gauss_map(&s, u, v, 0)?);
            for (c, comp) in x.0.iter().enumerate() {
                let lap = laplacian(&s, Form::III, comp, u, v, 0)?.value();
                worst = worst.max((lap + r * n[c]).abs());
            }
        }
        Some(worst)
    } else {
        None
    };
    Ok(RevolutionClass {
        verdict,
        mean_r: mean,
        max_abs_r: max_abs,
        max_dev,
        tol,
        position_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curvature_bundle;
    use std::f64::consts::PI;

    #[test]
    fn radii_sum_closed_form() {
        let torus = Profile::torus(2.0).unwrap();
        let c = closed_form_components(&torus, PI / 3.0).unwrap();
        assert!((c.r - 6.0).abs() < 1e-12);
        let circle = Profile::circle(1.0).unwrap();
        for &u in &[0.3, 1.2, 2.7] {
            assert!((closed_form_components(&circle, u).unwrap().r - 2.0).abs() < 1e-12);
        }
        let cat = Profile::catenary(1.0).unwrap();
        for &u in &[-1.5, 0.0, 1.1] {
            assert!(closed_form_components(&cat, u).unwrap().r.abs() < 1e-12);
        }
    }

    #[test]
    fn closed_forms_agree_with_generic_curvature() {
        let torus = Arc::new(Profile::torus(2.0).unwrap());
        let s = SurfacePatch::revolution(torus.clone());
        for &u in &[-1.0, 0.2, 0.9] {
            let c = closed_form_components(&torus, u).unwrap();
            let b = curvature_bundle(&s, u, 0.4).unwrap();
            assert!((c.r - b.r).abs() < 1e-11);
            assert!((c.e11 - c.kappa * c.kappa).abs() < 1e-12);
            assert!((c.e22 - c.phi.sin().powi(2)).abs() < 1e-12);
            // R' against a jet derivative of the generic R
            let rj = crate::geometry::radii_sum_jet(&s, u, 0.4, 1).unwrap();
            assert!((c.r_prime - rj.coeff(1, 0)).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_points_are_guarded() {
        let p = Profile::from_phi_expr("u*u*u + 1", 2.0, 0.0, (-0.5, 0.5)).unwrap();
        assert!(matches!(closed_form_components(&p, 0.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn case_split() {
        let grid = Grid::new(9, 3);
        let c = classify_revolution(Arc::new(Profile::catenary(1.0).unwrap()), grid, None).unwrap();
        assert_eq!(c.verdict, RevolutionCase::CaseIMinimal);
        let torus = classify_revolution(Arc::new(Profile::torus(2.0).unwrap()), grid, None).unwrap();
        assert_eq!(torus.verdict, RevolutionCase::NonconstantR);
        let base = Arc::new(Profile::catenary(1.0).unwrap());
        let par = classify_revolution(Arc::new(Profile::parallel(base, 0.5).unwrap()), grid, None).unwrap();
        assert_eq!(par.verdict, RevolutionCase::CaseIIConstantR);
        assert!((par.mean_r + 1.0).abs() < 1e-8);
        assert!(par.position_error.unwrap() < 1e-7);
    }
}
