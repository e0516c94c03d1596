//! Beltrami operators of the three fundamental forms.
//!
//! Fields are lazily evaluated expressions over a [`SurfacePatch`]. A
//! [`ScalarField::Laplacian`] is again a field, so iterated Laplacians are just
//! nested fields. Every field declares its `cost`: how many orders of surface jet
//! it needs on top of the order it is evaluated at. Evaluation fails with
//! `InsufficientOrder` instead of silently truncating.
//!
//! `Δ^J f = -(1/√|a|) ∂_i(√|a| a^{ij} ∂_j f)` with `a` the matrix of form `J`.
//! With this sign the unit sphere has `Δ^III x = 2x`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    fundamental_form, gauss_map, radii_sum_jet, support_jet, Form, Grid, SurfacePatch,
};
use crate::jets::{values3, Jet2, Var};

/// A scalar function of the parameters, given as a map on jets.
pub type ParamFn = Arc<dyn Fn(&Jet2, &Jet2) -> Result<Jet2> + Send + Sync>;

#[derive(Clone)]
pub enum ScalarField {
    Constant(f64),
    /// Ambient coordinate `x_c`.
    Coordinate(usize),
    /// Component `n_c` of the Gauss map.
    Normal(usize),
    /// `w = -<n, x>`.
    Support,
    /// `R = 2H/K`.
    RadiiSum,
    /// A function of `(u, v)` alone.
    Param(ParamFn),
    /// `Σ α_i f_i`.
    Combination(Vec<(f64, ScalarField)>),
    Laplacian(Form, Box<ScalarField>),
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Constant(c) => write!(f, "Constant({c})"),
            ScalarField::Coordinate(c) => write!(f, "x{c}"),
            ScalarField::Normal(c) => write!(f, "n{c}"),
            ScalarField::Support => write!(f, "w"),
            ScalarField::RadiiSum => write!(f, "R"),
            ScalarField::Param(_) => write!(f, "Param"),
            ScalarField::Combination(terms) => f.debug_list().entries(terms).finish(),
            ScalarField::Laplacian(j, inner) => write!(f, "Δ^{j:?}({inner:?})"),
        }
    }
}

impl ScalarField {
    pub fn param<F>(f: F) -> Self
    where
        F: Fn(&Jet2, &Jet2) -> Result<Jet2> + Send + Sync + 'static,
    {
        ScalarField::Param(Arc::new(f))
    }

    pub fn laplacian(self, which: Form) -> Self {
        ScalarField::Laplacian(which, Box::new(self))
    }

    /// Extra surface-jet order this field consumes.
    pub fn cost(&self) -> usize {
        match self {
            ScalarField::Constant(_) | ScalarField::Coordinate(_) | ScalarField::Param(_) => 0,
            ScalarField::Normal(_) | ScalarField::Support => 1,
            ScalarField::RadiiSum => 2,
            ScalarField::Combination(terms) => terms.iter().map(|(_, f)| f.cost()).max().unwrap_or(0),
            // f at order m + 2, the form (with its derivatives) at order m + 1
            ScalarField::Laplacian(j, f) => (f.cost() + 2).max(1 + j.surface_cost()),
        }
    }

    /// Jet of this field at `(u, v)`.
    pub fn eval(&self, s: &SurfacePatch, u: f64, v: f64, order: usize) -> Result<Jet2> {
        let needed = order + self.cost();
        if needed > s.max_order() {
            return Err(Error::InsufficientOrder {
                needed,
                available: s.max_order(),
            });
        }
        self.eval_inner(s, u, v, order)
    }

    fn eval_inner(&self, s: &SurfacePatch, u: f64, v: f64, order: usize) -> Result<Jet2> {
        match self {
            ScalarField::Constant(c) => Ok(Jet2::constant(*c, order)),
            ScalarField::Coordinate(c) => Ok(s.eval(u, v, order)?[*c]),
            ScalarField::Normal(c) => Ok(gauss_map(s, u, v, order)?[*c]),
            ScalarField::Support => support_jet(s, u, v, order),
            ScalarField::RadiiSum => radii_sum_jet(s, u, v, order),
            ScalarField::Param(f) => {
                let uj = Jet2::variable(Var::U, u, order)?;
                let vj = Jet2::variable(Var::V, v, order)?;
                let out = f(&uj, &vj)?;
                Ok(out.truncate(order.min(out.order())))
            }
            ScalarField::Combination(terms) => {
                let mut acc = Jet2::zero(order);
                for (alpha, f) in terms {
                    acc += &f.eval_inner(s, u, v, order)?.scale(*alpha);
                }
                Ok(acc)
            }
            ScalarField::Laplacian(which, f) => divergence_laplacian(s, *which, f, u, v, order),
        }
    }
}

fn divergence_laplacian(
    s: &SurfacePatch,
    which: Form,
    f: &ScalarField,
    u: f64,
    v: f64,
    m: usize,
) -> Result<Jet2> {
    let a = fundamental_form(s, which, u, v, m + 1)?;
    let inv = a.inverse()?;
    let mut det = a.det();
    if det.value() < 0.0 {
        det = -det;
    }
    let root = det.sqrt()?;
    let fj = f.eval_inner(s, u, v, m + 2)?;
    let fu = fj.diff(Var::U)?;
    let fv = fj.diff(Var::V)?;
    let flux_u = root * ((inv.i11 * fu) + (inv.i12 * fv));
    let flux_v = root * ((inv.i12 * fu) + (inv.i22 * fv));
    let div = flux_u.diff(Var::U)? + flux_v.diff(Var::V)?;
    Ok(-div.checked_div(&root.truncate(m))?)
}

/// Three scalar fields read as an ambient vector.
#[derive(Debug, Clone)]
pub struct VectorField(pub [ScalarField; 3]);

impl VectorField {
    pub fn position() -> Self {
        VectorField([0, 1, 2].map(ScalarField::Coordinate))
    }

    pub fn normal() -> Self {
        VectorField([0, 1, 2].map(ScalarField::Normal))
    }

    /// Componentwise `Δ^J`.
    pub fn laplacian(&self, which: Form) -> Self {
        VectorField(self.0.clone().map(|f| f.laplacian(which)))
    }

    /// `(Δ^J)^r` applied componentwise.
    pub fn iterate(&self, which: Form, r: usize) -> Self {
        (0..r).fold(self.clone(), |acc, _| acc.laplacian(which))
    }

    pub fn cost(&self) -> usize {
        self.0.iter().map(|f| f.cost()).max().unwrap_or(0)
    }

    pub fn eval(&self, s: &SurfacePatch, u: f64, v: f64, order: usize) -> Result<[Jet2; 3]> {
        Ok([
            self.0[0].eval(s, u, v, order)?,
            self.0[1].eval(s, u, v, order)?,
            self.0[2].eval(s, u, v, order)?,
        ])
    }

    pub fn values(&self, s: &SurfacePatch, u: f64, v: f64) -> Result<[f64; 3]> {
        Ok(values3(&self.eval(s, u, v, 0)?))
    }
}

/// First Beltrami parameter `∇^J(f, g) = a^{ij} f_i g_j`.
pub fn beltrami_first(
    s: &SurfacePatch,
    which: Form,
    f: &ScalarField,
    g: &ScalarField,
    u: f64,
    v: f64,
) -> Result<f64> {
    let inv = fundamental_form(s, which, u, v, 0)?.inverse()?;
    let fj = f.eval(s, u, v, 1)?;
    let gj = g.eval(s, u, v, 1)?;
    let (f1, f2) = (fj.coeff(1, 0), fj.coeff(0, 1));
    let (g1, g2) = (gj.coeff(1, 0), gj.coeff(0, 1));
    let (i11, i12, i22) = (inv.i11.value(), inv.i12.value(), inv.i22.value());
    Ok(i11 * f1 * g1 + i12 * (f1 * g2 + f2 * g1) + i22 * f2 * g2)
}

/// `Δ^J f` as a jet of the requested order.
pub fn laplacian(
    s: &SurfacePatch,
    which: Form,
    f: &ScalarField,
    u: f64,
    v: f64,
    order: usize,
) -> Result<Jet2> {
    f.clone().laplacian(which).eval(s, u, v, order)
}

/// Gradient of `f` with respect to III, `e^{ij} f_i n_j`, as an ambient vector.
pub fn grad_third(s: &SurfacePatch, f: &ScalarField, u: f64, v: f64) -> Result<[f64; 3]> {
    let inv = fundamental_form(s, Form::III, u, v, 0)?.inverse()?;
    let fj = f.eval(s, u, v, 1)?;
    let (f1, f2) = (fj.coeff(1, 0), fj.coeff(0, 1));
    let n = gauss_map(s, u, v, 1)?;
    let nu = n.map(|c| c.coeff(1, 0));
    let nv = n.map(|c| c.coeff(0, 1));
    let (i11, i12, i22) = (inv.i11.value(), inv.i12.value(), inv.i22.value());
    let a = i11 * f1 + i12 * f2;
    let b = i12 * f1 + i22 * f2;
    Ok([0, 1, 2].map(|c| a * nu[c] + b * nv[c]))
}

/// Highest supported power in [`iterate_laplacian`].
pub const MAX_ITERATE: usize = 4;

/// `(Δ^J)^r f` at a point, componentwise.
pub fn iterate_laplacian(
    s: &SurfacePatch,
    which: Form,
    f: &VectorField,
    r: usize,
    u: f64,
    v: f64,
) -> Result<[f64; 3]> {
    if r > MAX_ITERATE {
        let field = f.iterate(which, r);
        return Err(Error::InsufficientOrder {
            needed: field.cost(),
            available: s.max_order().min(crate::jets::MAX_ORDER),
        });
    }
    f.iterate(which, r).values(s, u, v)
}

/// Third-form Laplacian by finite differences: the Gauss map from first-order
/// jets only, `e_ij` by central differences of it, and a central-difference
/// divergence. Richardson-extrapolated over steps `h` and `h/2`.
pub fn fd_laplacian_iii<F>(s: &SurfacePatch, f: F, u: f64, v: f64, h: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let coarse = fd_laplacian_step(s, &f, u, v, h)?;
    let fine = fd_laplacian_step(s, &f, u, v, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn fd_laplacian_step<F>(s: &SurfacePatch, f: &F, u: f64, v: f64, h: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let normal = |a: f64, b: f64| -> Result<[f64; 3]> { Ok(values3(&gauss_map(s, a, b, 0)?)) };
    let metric = |a: f64, b: f64| -> Result<[f64; 3]> {
        let (np, nm) = (normal(a + h, b)?, normal(a - h, b)?);
        let (mp, mm) = (normal(a, b + h)?, normal(a, b - h)?);
        let nu: [f64; 3] = [0, 1, 2].map(|c| (np[c] - nm[c]) / (2.0 * h));
        let nv: [f64; 3] = [0, 1, 2].map(|c| (mp[c] - mm[c]) / (2.0 * h));
        let dot = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        Ok([dot(nu, nu), dot(nu, nv), dot(nv, nv)])
    };
    // (√det e, √det e · e^{-1} ∇f)
    let flux = |a: f64, b: f64| -> Result<(f64, [f64; 2])> {
        let [e11, e12, e22] = metric(a, b)?;
        let det = e11 * e22 - e12 * e12;
        if det.abs() < 1e-14 {
            return Err(Error::Degenerate(format!("det III = {det:e}")));
        }
        let root = det.abs().sqrt();
        let fu = (f(a + h, b)? - f(a - h, b)?) / (2.0 * h);
        let fv = (f(a, b + h)? - f(a, b - h)?) / (2.0 * h);
        let (i11, i12, i22) = (e22 / det, -e12 / det, e11 / det);
        Ok((root, [root * (i11 * fu + i12 * fv), root * (i12 * fu + i22 * fv)]))
    };
    let (root, _) = flux(u, v)?;
    let div = (flux(u + h, v)?.1[0] - flux(u - h, v)?.1[0]) / (2.0 * h)
        + (flux(u, v + h)?.1[1] - flux(u, v - h)?.1[1]) / (2.0 * h);
    Ok(-div / root)
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityRow {
    pub surface: String,
    pub identity_id: String,
    pub grid: String,
    pub max_error: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct IdentityReport {
    pub rows: Vec<IdentityRow>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, identity: &str) -> Option<&IdentityRow> {
        self.rows.iter().find(|r| r.identity_id == identity)
    }
}

/// Third-form identities over `grid`, as maximum pointwise errors:
///
/// * `position_laplacian`: `Δ^III x = grad^III R - R n`
/// * `gauss_map_eigen`: `Δ^III n = 2n`
/// * `support_function`: `-Δ^III w + 2w = R`
/// * with `type1_lambda = Some(λ)` for a surface with `Δ^III x = λ(x - x₀)`:
///   `type1_support_eigen` (`Δ^III w = (2 - λ) w`) and `type1_radii_eigen`
///   (`Δ^III R = (2 - λ) R`).
pub fn identity_suite(
    s: &SurfacePatch,
    grid: Grid,
    tol: f64,
    type1_lambda: Option<f64>,
) -> Result<IdentityReport> {
    let x_lap = VectorField::position().laplacian(Form::III);
    let n = VectorField::normal();
    let n_lap = n.laplacian(Form::III);
    let w_lap = ScalarField::Support.laplacian(Form::III);
    let r_lap = ScalarField::RadiiSum.laplacian(Form::III);
    let mut err = [0.0f64; 5];
    let bump = |e: &mut f64, x: f64| *e = e.max(x.abs());
    for (u, v) in grid.points(&s.domain()) {
        let lx = x_lap.values(s, u, v)?;
        let nv = n.values(s, u, v)?;
        let ln = n_lap.values(s, u, v)?;
        let r = ScalarField::RadiiSum.eval(s, u, v, 0)?.value();
        let gr = grad_third(s, &ScalarField::RadiiSum, u, v)?;
        let w = ScalarField::Support.eval(s, u, v, 0)?.value();
        let lw = w_lap.eval(s, u, v, 0)?.value();
        for c in 0..3 {
            bump(&mut err[0], lx[c] - gr[c] + r * nv[c]);
            bump(&mut err[1], ln[c] - 2.0 * nv[c]);
        }
        bump(&mut err[2], -lw + 2.0 * w - r);
        if let Some(lambda) = type1_lambda {
            let lr = r_lap.eval(s, u, v, 0)?.value();
            bump(&mut err[3], lw - (2.0 - lambda) * w);
            bump(&mut err[4], lr - (2.0 - lambda) * r);
        }
    }
    let mut names = vec!["position_laplacian", "gauss_map_eigen", "support_function"];
    if type1_lambda.is_some() {
        names.extend(["type1_support_eigen", "type1_radii_eigen"]);
    }
    let rows = names
        .iter()
        .zip(err)
        .map(|(name, e)| IdentityRow {
            surface: s.label().to_string(),
            identity_id: name.to_string(),
            grid: grid.label(),
            max_error: e,
            tol,
            pass: e <= tol,
        })
        .collect();
    Ok(IdentityReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> SurfacePatch {
        SurfacePatch::sphere(1.0).unwrap()
    }

    #[test]
    fn cost_accounting() {
        let x = ScalarField::Coordinate(0);
        assert_eq!(x.cost(), 0);
        assert_eq!(x.clone().laplacian(Form::III).cost(), 3);
        assert_eq!(x.clone().laplacian(Form::III).laplacian(Form::III).cost(), 5);
        assert_eq!(x.clone().laplacian(Form::I).cost(), 2);
        assert_eq!(ScalarField::RadiiSum.laplacian(Form::III).cost(), 4);
        assert_eq!(VectorField::position().iterate(Form::III, 4).cost(), 9);
    }

    #[test]
    fn first_parameter_examples() {
        let s = SurfacePatch::torus(2.0).unwrap();
        let u_field = ScalarField::param(|u, _| Ok(*u));
        let v_field = ScalarField::param(|_, v| Ok(*v));
        let (u, v) = (0.4, 1.0);
        let g = crate::geometry::fundamental_form(&s, Form::I, u, v, 0).unwrap();
        let ginv = g.inverse().unwrap();
        let got = beltrami_first(&s, Form::I, &u_field, &u_field, u, v).unwrap();
        assert!((got - ginv.i11.value()).abs() < 1e-14);
        // e22 = g'² = cos² u on this torus
        let got = beltrami_first(&s, Form::III, &v_field, &v_field, u, v).unwrap();
        assert!((got - 1.0 / u.cos().powi(2)).abs() < 1e-12);
        let c = ScalarField::Constant(3.0);
        assert_eq!(beltrami_first(&s, Form::II, &u_field, &c, u, v).unwrap(), 0.0);
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let s = SurfacePatch::enneper();
        for which in [Form::I, Form::II, Form::III] {
            let l = laplacian(&s, which, &ScalarField::Constant(2.5), 0.3, -0.2, 3).unwrap();
            assert!(l.coeffs().iter().all(|&c| c == 0.0));
        }
    }

    #[test]
    fn sphere_position_is_an_eigenvector() {
        let s = sphere();
        for (u, v) in Grid::new(5, 5).points(&s.domain()) {
            let x = VectorField::position().values(&s, u, v).unwrap();
            let l1 = iterate_laplacian(&s, Form::III, &VectorField::position(), 1, u, v).unwrap();
            let l3 = iterate_laplacian(&s, Form::III, &VectorField::position(), 3, u, v).unwrap();
            for c in 0..3 {
                assert!((l1[c] - 2.0 * x[c]).abs() < 1e-9);
                assert!((l3[c] - 8.0 * x[c]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn first_form_laplacian_on_sphere() {
        // Δ^I x = -2H n = 2x on the unit sphere with n = -x
        let s = sphere();
        let (u, v) = (1.0, 0.5);
        let x = VectorField::position().values(&s, u, v).unwrap();
        let l = VectorField::position().laplacian(Form::I).values(&s, u, v).unwrap();
        for c in 0..3 {
            assert!((l[c] - 2.0 * x[c]).abs() < 1e-10);
        }
    }

    #[test]
    fn catenoid_position_is_harmonic() {
        let s = SurfacePatch::catenoid(1.0).unwrap();
        for (u, v) in Grid::new(5, 5).points(&s.domain()) {
            let l = VectorField::position().laplacian(Form::III).values(&s, u, v).unwrap();
            assert!(l.iter().all(|c| c.abs() < 1e-9), "{l:?}");
        }
    }

    #[test]
    fn iterate_budget() {
        let s = sphere();
        assert!(iterate_laplacian(&s, Form::III, &VectorField::position(), 4, 1.0, 0.0).is_ok());
        assert!(matches!(
            iterate_laplacian(&s, Form::III, &VectorField::position(), 5, 1.0, 0.0),
            Err(Error::InsufficientOrder { .. })
        ));
        // the parallel patch loses one order but still fits r = 4
        let p = SurfacePatch::parallel(SurfacePatch::catenoid(1.0).unwrap(), 0.5).unwrap();
        assert!(iterate_laplacian(&p, Form::III, &VectorField::position(), 4, 0.3, 0.0).is_ok());
        let deep = ScalarField::Coordinate(0).laplacian(Form::III);
        assert!(matches!(
            deep.eval(&p, 0.3, 0.0, 7),
            Err(Error::InsufficientOrder { needed: 10, available: 9 })
        ));
    }

    #[test]
    fn grad_of_constant_vanishes() {
        let s = SurfacePatch::torus(2.0).unwrap();
        let g = grad_third(&s, &ScalarField::Constant(1.0), 0.5, 0.5).unwrap();
        assert_eq!(g, [0.0; 3]);
        let g = grad_third(&sphere(), &ScalarField::RadiiSum, 1.0, 0.5).unwrap();
        assert!(g.iter().all(|c| c.abs() < 1e-10));
    }

    #[test]
    fn fd_oracle_on_sphere() {
        let s = sphere();
        let (u, v) = (1.1, 0.4);
        let fd = fd_laplacian_iii(&s, |a, b| Ok(s.eval(a, b, 0)?[2].value()), u, v, 1e-3).unwrap();
        let x3 = s.eval(u, v, 0).unwrap()[2].value();
        assert!((fd - 2.0 * x3).abs() < 1e-6, "{fd} vs {}", 2.0 * x3);
    }

    #[test]
    fn sphere_identity_suite() {
        let rep = identity_suite(&sphere(), Grid::new(7, 7), 1e-7, Some(2.0)).unwrap();
        assert_eq!(rep.rows.len(), 5);
        assert!(rep.all_pass(), "{rep:?}");
        let json = serde_json::to_value(&rep).unwrap();
        assert!(json.is_array());
        assert_eq!(json[0]["identity_id"], "position_laplacian");
    }
}
