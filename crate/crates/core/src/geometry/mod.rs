//! Parametric surface kernel.
//!
//! A [`SurfacePatch`] evaluates its position vector as three [`Jet2`]s, so every
//! geometric quantity below (tangents, Gauss map, the three fundamental forms,
//! curvatures) is itself available as a jet and can be differentiated further.
//!
//! Orientation: `n = x_u × x_v / |x_u × x_v|` and `b_ij = <x_ij, n>`. With this
//! choice the unit sphere `(sin u cos v, sin u sin v, -cos u)` has `n = -x`,
//! `H = K = 1` and support function `w = -<n, x> = 1`.

mod parallel;
mod spec;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::{cross3, diff3, dot3, truncate3, values3, Jet2, Var, MAX_ORDER};
use crate::revolution::Profile;

pub use parallel::{parallel_invariant_check, ParallelReport, ParallelRow, RadiiShift};
pub(crate) use spec::parse_number as spec_number;

/// Determinant guard for `det(g_ij)` and the other form matrices.
pub const DET_GUARD: f64 = 1e-14;
/// Below this `|K|` a point is treated as parabolic.
pub const FLAT_GUARD: f64 = 1e-10;
/// Below this `|x_u × x_v|` a point is treated as singular.
pub const REGULARITY_GUARD: f64 = 1e-12;
/// Distance from zero of `1 - 2μH + μ²K` at which an offset is focal.
pub const FOCAL_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Form {
    I,
    II,
    III,
}

impl Form {
    /// Extra surface-jet order needed to evaluate this form at a given order.
    pub fn surface_cost(self) -> usize {
        match self {
            Form::I => 1,
            Form::II | Form::III => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub u: (f64, f64),
    pub v: (f64, f64),
    /// `v` is an angle; points outside `v` are accepted and wrap.
    pub v_periodic: bool,
}

impl Domain {
    pub fn contains(&self, u: f64, v: f64) -> bool {
        let in_u = u >= self.u.0 && u <= self.u.1;
        let in_v = self.v_periodic || (v >= self.v.0 && v <= self.v.1);
        in_u && in_v && u.is_finite() && v.is_finite()
    }

    /// The central `fraction` of the domain (same center).
    pub fn shrink(&self, fraction: f64) -> Domain {
        let squeeze = |(a, b): (f64, f64)| {
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a) * fraction;
            (c - h, c + h)
        };
        Domain {
            u: squeeze(self.u),
            v: if self.v_periodic { self.v } else { squeeze(self.v) },
            v_periodic: self.v_periodic,
        }
    }
}

/// Uniform cell-centred sampling grid; never touches the domain boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub nu: usize,
    pub nv: usize,
}

impl Grid {
    pub fn new(nu: usize, nv: usize) -> Self {
        Grid { nu, nv }
    }

    pub fn points(&self, domain: &Domain) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(self.nu * self.nv);
        let (u0, u1) = domain.u;
        let (v0, v1) = domain.v;
        for i in 0..self.nu {
            let u = u0 + (i as f64 + 0.5) * (u1 - u0) / self.nu as f64;
            for j in 0..self.nv {
                let v = v0 + (j as f64 + 0.5) * (v1 - v0) / self.nv as f64;
                pts.push((u, v));
            }
        }
        pts
    }

    /// Same lattice size, but row `j` is shifted in `u` by `j/(nu nv)` of the
    /// range, so all points have distinct `u`. Rotation surfaces sampled on
    /// the plain grid see only `nu` distinct profile values, and a grid
    /// symmetric about an even profile halves that again.
    pub fn staggered_points(&self, domain: &Domain) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(self.nu * self.nv);
        let (u0, u1) = domain.u;
        let (v0, v1) = domain.v;
        let cells = (self.nu * self.nv) as f64;
        for i in 0..self.nu {
            for j in 0..self.nv {
                let t = (i * self.nv + j) as f64 + 0.5;
                let u = u0 + t * (u1 - u0) / cells;
                let v = v0 + (j as f64 + 0.5) * (v1 - v0) / self.nv as f64;
                pts.push((u, v));
            }
        }
        pts
    }

    pub fn label(&self) -> String {
        format!("{}x{}", self.nu, self.nv)
    }
}

/// Proper rigid motion `x -> Q x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

impl RigidMotion {
    pub fn translation(t: [f64; 3]) -> Self {
        RigidMotion {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: t,
        }
    }

    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        let q = &self.rotation;
        let mut out = self.translation;
        for (r, o) in out.iter_mut().enumerate() {
            *o += q[r][0] * p[0] + q[r][1] * p[1] + q[r][2] * p[2];
        }
        out
    }

    fn apply_jets(&self, x: &[Jet2; 3]) -> [Jet2; 3] {
        let q = &self.rotation;
        let row = |r: usize| {
            ((x[0].scale(q[r][0]) + x[1].scale(q[r][1])) + x[2].scale(q[r][2]))
                .add_scalar(self.translation[r])
        };
        [row(0), row(1), row(2)]
    }
}

#[derive(Debug, Clone)]
enum PatchKind {
    Revolution(Arc<Profile>),
    Enneper,
    Parallel { base: Box<SurfacePatch>, mu: f64 },
    Rigid { base: Box<SurfacePatch>, motion: RigidMotion },
}

/// A regular parametric surface `(u, v) -> R^3` evaluable to jets.
#[derive(Debug, Clone)]
pub struct SurfacePatch {
    kind: PatchKind,
    label: String,
    /// Natural parameter range, before margins.
    natural: Domain,
    /// Fraction of the natural `u`-range removed at each end.
    singular_margin: f64,
    /// Regular domain actually sampled and evaluated.
    domain: Domain,
}

impl SurfacePatch {
    fn with_margin(kind: PatchKind, label: String, natural: Domain, margin: f64) -> Self {
        let (a, b) = natural.u;
        let cut = margin * (b - a);
        let domain = Domain {
            u: (a + cut, b - cut),
            ..natural
        };
        SurfacePatch {
            kind,
            label,
            natural,
            singular_margin: margin,
            domain,
        }
    }

    /// Sphere of radius `r` from the unit-speed circle profile
    /// `f = r sin(u/r)`, `g = -r cos(u/r)`; the poles are cut off.
    pub fn sphere(r: f64) -> Result<Self> {
        Ok(Self::revolution(Arc::new(Profile::circle(r)?)).relabel(format!("sphere:r={r}")))
    }

    /// Catenoid from the unit-speed profile `f = sqrt(a² + u²)`, `g = a asinh(u/a)`.
    pub fn catenoid(a: f64) -> Result<Self> {
        Ok(Self::revolution(Arc::new(Profile::catenary(a)?)).relabel(format!("catenoid:a={a}")))
    }

    /// Torus `f = a + cos u`, `g = sin u`, restricted to the outer half where
    /// `cos u` stays away from zero.
    pub fn torus(a: f64) -> Result<Self> {
        Ok(Self::revolution(Arc::new(Profile::torus(a)?)).relabel(format!("torus:a={a}")))
    }

    /// Enneper's minimal surface on `(-1, 1)²`.
    pub fn enneper() -> Self {
        let d = Domain {
            u: (-1.0, 1.0),
            v: (-1.0, 1.0),
            v_periodic: false,
        };
        Self::with_margin(PatchKind::Enneper, "enneper".into(), d, 0.0)
    }

    pub fn revolution(profile: Arc<Profile>) -> Self {
        let natural = Domain {
            u: profile.natural_range(),
            v: (0.0, 2.0 * PI),
            v_periodic: true,
        };
        let margin = profile.singular_margin();
        let label = format!("revolution:profile={}", profile.label());
        Self::with_margin(PatchKind::Revolution(profile), label, natural, margin)
    }

    /// Offset surface `x + μ n`. Fails if the offset reaches a focal point on a
    /// 9×9 probe of the domain; every later evaluation re-checks its own point.
    pub fn parallel(base: SurfacePatch, mu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu = {mu}")));
        }
        if base.max_order() < 3 {
            return Err(Error::InsufficientOrder {
                needed: 3,
                available: base.max_order(),
            });
        }
        for (u, v) in Grid::new(9, 9).points(&base.domain) {
            parallel::focal_factor(&base, mu, u, v)?;
        }
        let label = format!("parallel:base={},mu={mu}", base.label);
        let natural = base.natural;
        let margin = base.singular_margin;
        let mut patch = Self::with_margin(
            PatchKind::Parallel {
                base: Box::new(base.clone()),
                mu,
            },
            label,
            natural,
            margin,
        );
        patch.domain = base.domain;
        Ok(patch)
    }

    pub fn rigid(base: SurfacePatch, motion: RigidMotion) -> Self {
        let label = format!("rigid:{}", base.label);
        let mut patch = Self::with_margin(
            PatchKind::Rigid {
                base: Box::new(base.clone()),
                motion,
            },
            label,
            base.natural,
            base.singular_margin,
        );
        patch.domain = base.domain;
        patch
    }

    /// Parses a surface spec string; see [`SurfacePatch::from_spec`] grammar.
    pub fn from_spec(text: &str) -> Result<Self> {
        spec::parse_surface(text)
    }

    fn relabel(mut self, label: String) -> Self {
        self.label = label;
        self
    }

    /// Restricts the sampled `u`-range; the new range must lie inside the
    /// regular domain.
    pub fn with_u_range(mut self, a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !self.domain.contains(a, self.domain.v.0) || !self.domain.contains(b, self.domain.v.0)
        {
            return Err(Error::SingularDomain { u: a.min(b), v: self.domain.v.0 });
        }
        self.domain.u = (a, b);
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn natural_domain(&self) -> Domain {
        self.natural
    }

    pub fn singular_margin(&self) -> f64 {
        self.singular_margin
    }

    /// The revolution profile, when this patch is a plain surface of revolution.
    pub fn profile(&self) -> Option<&Arc<Profile>> {
        match &self.kind {
            PatchKind::Revolution(p) => Some(p),
            _ => None,
        }
    }

    /// Base patch and offset distance, when this patch is a parallel surface.
    pub fn parallel_parts(&self) -> Option<(&SurfacePatch, f64)> {
        match &self.kind {
            PatchKind::Parallel { base, mu } => Some((base, *mu)),
            _ => None,
        }
    }

    /// Highest jet order at which the position vector can be evaluated.
    pub fn max_order(&self) -> usize {
        match &self.kind {
            PatchKind::Revolution(p) => p.max_order(),
            PatchKind::Enneper => MAX_ORDER,
            PatchKind::Parallel { base, .. } => base.max_order().saturating_sub(1),
            PatchKind::Rigid { base, .. } => base.max_order(),
        }
    }

    /// Position vector jets at `(u, v)`.
    pub fn eval(&self, u: f64, v: f64, order: usize) -> Result<[Jet2; 3]> {
        if order > self.max_order() {
            return Err(Error::InsufficientOrder {
                needed: order,
                available: self.max_order(),
            });
        }
        if !self.domain.contains(u, v) {
            return Err(Error::SingularDomain { u, v });
        }
        self.eval_unchecked(u, v, order)
    }

    fn eval_unchecked(&self, u: f64, v: f64, order: usize) -> Result<[Jet2; 3]> {
        match &self.kind {
            PatchKind::Revolution(profile) => {
                let (f, g) = profile.eval(u, order)?;
                let vj = Jet2::variable(Var::V, v, order)?;
                let (cv, sv) = (vj.cos(), vj.sin());
                Ok([f * cv, f * sv, g])
            }
            PatchKind::Enneper => {
                let uj = Jet2::variable(Var::U, u, order)?;
                let vj = Jet2::variable(Var::V, v, order)?;
                let u2 = uj * uj;
                let v2 = vj * vj;
                let x = (uj - (u2 * uj).scale(1.0 / 3.0)) + (uj * v2);
                let y = (vj - (v2 * vj).scale(1.0 / 3.0)) + (vj * u2);
                let z = u2 - v2;
                Ok([x, y, z])
            }
            PatchKind::Parallel { base, mu } => {
                parallel::focal_factor(base, *mu, u, v)?;
                let x = base.eval_unchecked(u, v, order + 1)?;
                let n = normal_from_position(&x)?;
                let x = truncate3(&x, order);
                Ok([
                    x[0] + n[0].scale(*mu),
                    x[1] + n[1].scale(*mu),
                    x[2] + n[2].scale(*mu),
                ])
            }
            PatchKind::Rigid { base, motion } => {
                let x = base.eval_unchecked(u, v, order)?;
                Ok(motion.apply_jets(&x))
            }
        }
    }
}

/// Unit normal from tangent jets; the result has the tangents' order.
pub fn normal_from_tangents(xu: &[Jet2; 3], xv: &[Jet2; 3]) -> Result<[Jet2; 3]> {
    let c = cross3(xu, xv);
    let norm2 = dot3(&c, &c);
    if norm2.value().sqrt() < REGULARITY_GUARD {
        return Err(Error::Degenerate(format!(
            "|x_u × x_v| = {:e}",
            norm2.value().sqrt()
        )));
    }
    let inv = norm2.sqrt()?.recip()?;
    Ok([c[0] * inv, c[1] * inv, c[2] * inv])
}

/// Unit normal of order `m - 1` from position jets of order `m`.
fn normal_from_position(x: &[Jet2; 3]) -> Result<[Jet2; 3]> {
    normal_from_tangents(&diff3(x, Var::U)?, &diff3(x, Var::V)?)
}

/// Gauss map jets of the requested order.
pub fn gauss_map(s: &SurfacePatch, u: f64, v: f64, order: usize) -> Result<[Jet2; 3]> {
    let x = s.eval(u, v, order + 1)?;
    normal_from_position(&x)
}

/// A symmetric 2×2 matrix of jets: the components of one fundamental form.
#[derive(Debug, Clone, Copy)]
pub struct SymForm {
    pub which: Form,
    pub a11: Jet2,
    pub a12: Jet2,
    pub a22: Jet2,
}

/// Inverse components `a^{11}, a^{12}, a^{22}`.
#[derive(Debug, Clone, Copy)]
pub struct SymInverse {
    pub i11: Jet2,
    pub i12: Jet2,
    pub i22: Jet2,
}

impl SymForm {
    fn new(which: Form, a11: Jet2, a12: Jet2, a22: Jet2) -> Self {
        SymForm { which, a11, a12, a22 }
    }

    pub fn det(&self) -> Jet2 {
        (self.a11 * self.a22) - (self.a12 * self.a12)
    }

    pub fn inverse(&self) -> Result<SymInverse> {
        let det = self.det();
        if det.value().abs() < DET_GUARD {
            return Err(Error::Degenerate(format!(
                "form {:?} has determinant {:e}",
                self.which,
                det.value()
            )));
        }
        let inv = det.recip()?;
        Ok(SymInverse {
            i11: self.a22 * inv,
            i12: -(self.a12 * inv),
            i22: self.a11 * inv,
        })
    }

    pub fn values(&self) -> [[f64; 2]; 2] {
        let (a, b, c) = (self.a11.value(), self.a12.value(), self.a22.value());
        [[a, b], [b, c]]
    }

    pub fn truncate(&self, order: usize) -> Self {
        SymForm::new(
            self.which,
            self.a11.truncate(order),
            self.a12.truncate(order),
            self.a22.truncate(order),
        )
    }
}

/// Components of fundamental form `which` as jets of the given order:
/// `g_ij = <x_i, x_j>`, `b_ij = <x_ij, n>`, `e_ij = <n_i, n_j>`.
pub fn fundamental_form(
    s: &SurfacePatch,
    which: Form,
    u: f64,
    v: f64,
    order: usize,
) -> Result<SymForm> {
    let x = s.eval(u, v, order + which.surface_cost())?;
    let xu = diff3(&x, Var::U)?;
    let xv = diff3(&x, Var::V)?;
    Ok(match which {
        Form::I => SymForm::new(which, dot3(&xu, &xu), dot3(&xu, &xv), dot3(&xv, &xv)),
        Form::II => {
            let n = truncate3(&normal_from_tangents(&xu, &xv)?, order);
            let xuu = diff3(&xu, Var::U)?;
            let xuv = diff3(&xu, Var::V)?;
            let xvv = diff3(&xv, Var::V)?;
            SymForm::new(which, dot3(&xuu, &n), dot3(&xuv, &n), dot3(&xvv, &n))
        }
        Form::III => {
            let n = normal_from_tangents(&xu, &xv)?;
            let nu = diff3(&n, Var::U)?;
            let nv = diff3(&n, Var::V)?;
            SymForm::new(which, dot3(&nu, &nu), dot3(&nu, &nv), dot3(&nv, &nv))
        }
    })
}

/// Everything first- and second-order at one point, as jets of order `m`.
#[derive(Debug, Clone)]
pub struct Frame {
    pub x: [Jet2; 3],
    pub xu: [Jet2; 3],
    pub xv: [Jet2; 3],
    pub n: [Jet2; 3],
    pub nu: [Jet2; 3],
    pub nv: [Jet2; 3],
    pub first: SymForm,
    pub second: SymForm,
    pub third: SymForm,
}

impl Frame {
    pub fn new(s: &SurfacePatch, u: f64, v: f64, order: usize) -> Result<Self> {
        let x = s.eval(u, v, order + 2)?;
        let xu = diff3(&x, Var::U)?;
        let xv = diff3(&x, Var::V)?;
        let n = normal_from_tangents(&xu, &xv)?;
        let nu = diff3(&n, Var::U)?;
        let nv = diff3(&n, Var::V)?;
        let xuu = diff3(&xu, Var::U)?;
        let xuv = diff3(&xu, Var::V)?;
        let xvv = diff3(&xv, Var::V)?;
        let n_m = truncate3(&n, order);
        let (xu_m, xv_m) = (truncate3(&xu, order), truncate3(&xv, order));
        Ok(Frame {
            first: SymForm::new(Form::I, dot3(&xu_m, &xu_m), dot3(&xu_m, &xv_m), dot3(&xv_m, &xv_m)),
            second: SymForm::new(Form::II, dot3(&xuu, &n_m), dot3(&xuv, &n_m), dot3(&xvv, &n_m)),
            third: SymForm::new(Form::III, dot3(&nu, &nu), dot3(&nu, &nv), dot3(&nv, &nv)),
            x: truncate3(&x, order),
            xu: xu_m,
            xv: xv_m,
            n: n_m,
            nu,
            nv,
        })
    }

    pub fn form(&self, which: Form) -> &SymForm {
        match which {
            Form::I => &self.first,
            Form::II => &self.second,
            Form::III => &self.third,
        }
    }

    /// `(H, K)` as jets. No flat-point guard.
    pub fn mean_gauss(&self) -> Result<(Jet2, Jet2)> {
        let (g, b) = (&self.first, &self.second);
        let det_g = g.det();
        if det_g.value().abs() < DET_GUARD {
            return Err(Error::Degenerate(format!("det g = {:e}", det_g.value())));
        }
        let num = ((g.a22 * b.a11) - (g.a12 * b.a12).scale(2.0)) + (g.a11 * b.a22);
        let h = num.checked_div(&det_g.scale(2.0))?;
        let k = b.det().checked_div(&det_g)?;
        Ok((h, k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureBundle {
    /// Mean curvature.
    pub h: f64,
    /// Gauss curvature.
    pub k: f64,
    /// Principal curvatures, `k1 >= k2`.
    pub k1: f64,
    pub k2: f64,
    /// Sum of principal radii, `2H / K`.
    pub r: f64,
    /// Support function `-<n, x>`.
    pub w: f64,
    pub n: [f64; 3],
}

pub fn curvature_bundle(s: &SurfacePatch, u: f64, v: f64) -> Result<CurvatureBundle> {
    let frame = Frame::new(s, u, v, 0)?;
    let (h, k) = frame.mean_gauss()?;
    let (h, k) = (h.value(), k.value());
    if k.abs() < FLAT_GUARD {
        return Err(Error::FlatPoint { u, v, k });
    }
    let disc = (h * h - k).max(0.0).sqrt();
    let n = values3(&frame.n);
    let x = values3(&frame.x);
    Ok(CurvatureBundle {
        h,
        k,
        k1: h + disc,
        k2: h - disc,
        r: 2.0 * h / k,
        w: -(n[0] * x[0] + n[1] * x[1] + n[2] * x[2]),
        n,
    })
}

/// Sum of principal radii `R = 2H/K` as a jet.
pub fn radii_sum_jet(s: &SurfacePatch, u: f64, v: f64, order: usize) -> Result<Jet2> {
    let frame = Frame::new(s, u, v, order)?;
    let (g, b) = (&frame.first, &frame.second);
    let det_b = b.det();
    let det_g = g.det();
    if det_g.value().abs() < DET_GUARD {
        return Err(Error::Degenerate(format!("det g = {:e}", det_g.value())));
    }
    let k = det_b.value() / det_g.value();
    if k.abs() < FLAT_GUARD {
        return Err(Error::FlatPoint { u, v, k });
    }
    let num = ((g.a22 * b.a11) - (g.a12 * b.a12).scale(2.0)) + (g.a11 * b.a22);
    num.checked_div(&det_b)
}

/// Support function `w = -<n, x>` as a jet.
pub fn support_jet(s: &SurfacePatch, u: f64, v: f64, order: usize) -> Result<Jet2> {
    let x = s.eval(u, v, order + 1)?;
    let n = normal_from_position(&x)?;
    Ok(-dot3(&n, &truncate3(&x, order)))
}
