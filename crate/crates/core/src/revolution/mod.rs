//! Surfaces of revolution `(f(u) cos v, f(u) sin v, g(u))` with a unit-speed
//! profile `(f, g)`.
//!
//! A [`Profile`] evaluates `f` and `g` to univariate Taylor coefficients. Besides
//! the closed-form circle, catenary and torus profiles it can be built from a
//! turning angle `φ` (with `f' = cos φ`, `g' = sin φ`) or as the offset of
//! another profile, which is how constant-`R` families are produced.
//!
//! Profile spec strings:
//!
//! ```text
//! profile := "circle" [":r=" num]
//!          | "catenary" [":a=" num]
//!          | "torus" [":a=" num]
//!          | "phi:" expr (";" key "=" value)*     keys: f0, u0, range=a:b, margin
//!          | "parallel:base=" profile ",mu=" num
//! ```
//!
//! `expr` is the grammar in [`expr`]. A `phi:` profile needs `range`; `f0`
//! defaults to 1 and `u0` to 0.

mod closed;
pub mod expr;
mod quadrature;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::spec_number;
use crate::jets::{Jet2, Var, MAX_ORDER};
use crate::series;

pub use closed::{
    classify_revolution, closed_form_components, coordinate_laplacian_radii,
    coordinate_laplacian_turning, laplacian_iii_revolution, laplacian_iii_turning,
    ClosedForms, RevolutionCase, RevolutionClass,
};
pub use expr::Expr;

/// Turning angle as a function of `u`: `(u, order)` to Taylor coefficients
/// `φ_0..=φ_order` at `u`.
pub type PhiFn = Arc<dyn Fn(f64, usize) -> Result<Vec<f64>> + Send + Sync>;

/// Nodes of the turning-angle unwrap table.
const UNWRAP_NODES: usize = 1001;
/// Nodes of the quadrature cache of a `phi:` profile.
const QUAD_NODES: usize = 1024;
const QUAD_TOL: f64 = 1e-10;
const UNIT_SPEED_TOL: f64 = 1e-8;

#[derive(Clone)]
enum Kind {
    Circle { r: f64 },
    Catenary { a: f64 },
    Torus { a: f64 },
    Phi(Arc<PhiData>),
    Parallel(Arc<ParallelData>),
}

struct PhiData {
    phi: PhiFn,
    nodes: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
}

struct ParallelData {
    base: Arc<Profile>,
    mu: f64,
    /// `+1` when arc length grows with the base parameter.
    sigma: f64,
    u_ref: f64,
    phi_ref: f64,
    /// Base parameter and arc length at the base unwrap nodes.
    table_u: Vec<f64>,
    table_s: Vec<f64>,
}

struct Unwrap {
    nodes: Vec<f64>,
    principal: Vec<f64>,
    phi: Vec<f64>,
}

/// A unit-speed profile curve `u -> (f(u), 0, g(u))`.
#[derive(Clone)]
pub struct Profile {
    kind: Kind,
    label: String,
    natural: (f64, f64),
    margin: f64,
    unwrap: Arc<Unwrap>,
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Profile({})", self.label)
    }
}

fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn nearest(nodes: &[f64], u: f64) -> usize {
    let (a, b) = (nodes[0], nodes[nodes.len() - 1]);
    let t = ((u - a) / (b - a) * (nodes.len() - 1) as f64).round();
    t.clamp(0.0, (nodes.len() - 1) as f64) as usize
}

/// `φ` series from the profile's Taylor coefficients (which must reach
/// `order + 1`), with constant term `phi0`.
fn phi_series(f: &[f64], g: &[f64], phi0: f64, order: usize) -> Vec<f64> {
    let fp = series::derivative(f);
    let gp = series::derivative(g);
    let (y0, x0) = gp[0].atan2(fp[0]).sin_cos();
    // φ - φ(u) = atan(<rotated tangent>), exact for any speed
    let num: Vec<f64> = (0..=order).map(|k| gp[k] * x0 - fp[k] * y0).collect();
    let den: Vec<f64> = (0..=order).map(|k| fp[k] * x0 + gp[k] * y0).collect();
    let mut q = series::mul(&num, &series::recip(&den, order), order);
    q[0] = 0.0;
    let mut out = series::compose(&series::atan(0.0, order), &q, order);
    out[0] = phi0;
    out
}

impl Profile {
    fn build(kind: Kind, label: String, natural: (f64, f64), margin: f64) -> Result<Self> {
        let placeholder = Arc::new(Unwrap {
            nodes: vec![],
            principal: vec![],
            phi: vec![],
        });
        let mut p = Profile {
            kind,
            label,
            natural,
            margin,
            unwrap: placeholder,
        };
        p.unwrap = Arc::new(p.build_unwrap()?);
        p.validate()?;
        Ok(p)
    }

    fn build_unwrap(&self) -> Result<Unwrap> {
        let (a, b) = self.regular_range();
        let nodes = linspace(a, b, UNWRAP_NODES);
        let mut principal = Vec::with_capacity(nodes.len());
        let mut phi = Vec::with_capacity(nodes.len());
        for &u in &nodes {
            let (f, g) = self.taylor(u, 1)?;
            let p = g[1].atan2(f[1]);
            match phi.last() {
                None => phi.push(p),
                Some(&last) => {
                    let step = wrap_angle(p - principal[principal.len() - 1]);
                    if step.abs() > PI / 2.0 {
                        return Err(Error::Unwrap(u));
                    }
                    phi.push(last + step);
                }
            }
            principal.push(p);
        }
        Ok(Unwrap {
            nodes,
            principal,
            phi,
        })
    }

    fn validate(&self) -> Result<()> {
        let nodes = &self.unwrap.nodes;
        let mut tangent_product: f64 = 0.0;
        for (i, &u) in nodes.iter().enumerate() {
            let (f, g) = self.taylor(u, 1)?;
            let interior = i > 0 && i + 1 < nodes.len();
            if (interior && f[0] <= 0.0) || f[0] < -1e-12 {
                return Err(Error::InvalidProfile(format!("f({u}) = {} is not positive", f[0])));
            }
            let speed = f[1] * f[1] + g[1] * g[1];
            if (speed - 1.0).abs() > UNIT_SPEED_TOL {
                return Err(Error::InvalidProfile(format!(
                    "|(f', g')|² = {speed} at u = {u}, not unit speed"
                )));
            }
            tangent_product = tangent_product.max((f[1] * g[1]).abs());
        }
        if tangent_product < 1e-12 {
            return Err(Error::InvalidProfile(
                "f' g' vanishes identically (cylinder or plane)".into(),
            ));
        }
        Ok(())
    }

    /// Circle of radius `r`: `f = r sin(u/r)`, `g = -r cos(u/r)`, a sphere when
    /// revolved. The poles are cut off by the singular margin.
    pub fn circle(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("sphere radius r = {r}")));
        }
        Self::build(Kind::Circle { r }, format!("circle:r={r}"), (0.0, PI * r), 0.2 / PI)
    }

    /// Catenary `f = sqrt(a² + u²)`, `g = a asinh(u/a)` on `(-2a, 2a)`.
    pub fn catenary(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("catenary a = {a}")));
        }
        Self::build(Kind::Catenary { a }, format!("catenary:a={a}"), (-2.0 * a, 2.0 * a), 0.0)
    }

    /// Circle of radius 1 at distance `a > 1` from the axis, restricted to
    /// `(-1.3, 1.3)` so that `cos u` (and with it `K`) stays away from zero.
    pub fn torus(a: f64) -> Result<Self> {
        if !(a > 1.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("torus needs a > 1, got {a}")));
        }
        let margin = (PI / 2.0 - 1.3) / PI;
        Self::build(Kind::Torus { a }, format!("torus:a={a}"), (-PI / 2.0, PI / 2.0), margin)
    }

    /// Profile with turning angle `phi`, `f(u0) = f0`, `g(u0) = 0`:
    /// `f = f0 + ∫ cos φ`, `g = ∫ sin φ`.
    pub fn from_phi(
        phi: PhiFn,
        label: String,
        f0: f64,
        u0: f64,
        range: (f64, f64),
        margin: f64,
    ) -> Result<Self> {
        let (a, b) = range;
        if !(a < b) || !(a..=b).contains(&u0) || !f0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "phi profile needs u0 = {u0} inside range {a}:{b}"
            )));
        }
        if !(0.0..0.5).contains(&margin) {
            return Err(Error::InvalidParameter(format!("margin = {margin}")));
        }
        let angle = |u: f64| -> f64 { phi(u, 0).map(|c| c[0]).unwrap_or(f64::NAN) };
        let nodes = linspace(a, b, QUAD_NODES);
        let mut f = vec![0.0; QUAD_NODES];
        let mut g = vec![0.0; QUAD_NODES];
        let k0 = nearest(&nodes, u0);
        f[k0] = f0 + quadrature::integrate(|t| angle(t).cos(), u0, nodes[k0], QUAD_TOL);
        g[k0] = quadrature::integrate(|t| angle(t).sin(), u0, nodes[k0], QUAD_TOL);
        for k in k0 + 1..QUAD_NODES {
            f[k] = f[k - 1] + quadrature::integrate(|t| angle(t).cos(), nodes[k - 1], nodes[k], QUAD_TOL);
            g[k] = g[k - 1] + quadrature::integrate(|t| angle(t).sin(), nodes[k - 1], nodes[k], QUAD_TOL);
        }
        for k in (0..k0).rev() {
            f[k] = f[k + 1] - quadrature::integrate(|t| angle(t).cos(), nodes[k], nodes[k + 1], QUAD_TOL);
            g[k] = g[k + 1] - quadrature::integrate(|t| angle(t).sin(), nodes[k], nodes[k + 1], QUAD_TOL);
        }
        if f.iter().chain(g.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidProfile(format!("turning angle {label} is not finite on {a}:{b}")));
        }
        let data = PhiData { phi, nodes, f, g };
        Self::build(Kind::Phi(Arc::new(data)), label, range, margin)
    }

    /// [`Profile::from_phi`] with `φ` given as an expression in `u`.
    pub fn from_phi_expr(text: &str, f0: f64, u0: f64, range: (f64, f64)) -> Result<Self> {
        Self::from_phi_expr_with_margin(text, f0, u0, range, 0.0)
    }

    fn from_phi_expr_with_margin(
        text: &str,
        f0: f64,
        u0: f64,
        range: (f64, f64),
        margin: f64,
    ) -> Result<Self> {
        let e = Arc::new(Expr::parse(text)?);
        let phi: PhiFn = Arc::new(move |u, order| {
            let x = Jet2::variable(Var::U, u, order)?;
            Ok(e.eval(&x)?.univariate(Var::U))
        });
        let mut label = format!("phi:{text};f0={f0};u0={u0};range={}:{}", range.0, range.1);
        if margin > 0.0 {
            label.push_str(&format!(";margin={margin}"));
        }
        Self::from_phi(phi, label, f0, u0, range, margin)
    }

    /// The offset curve `(f - μ g', g + μ f')`, re-parametrized by arc length.
    /// Revolving it gives the parallel surface at distance `μ` of the base's
    /// surface of revolution.
    pub fn parallel(base: Arc<Profile>, mu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu = {mu}")));
        }
        if base.max_order() < 2 {
            return Err(Error::InsufficientOrder {
                needed: 2,
                available: base.max_order(),
            });
        }
        let (a, b) = base.regular_range();
        let u_ref = 0.5 * (a + b);
        let (phi_ref, _) = base.turning_angle(u_ref)?;
        // speed of the offset curve is |1 - μκ|; it must not change sign
        let mut sigma = 0.0;
        for &u in &base.unwrap.nodes {
            let (_, kappa) = base.turning_angle(u)?;
            let speed = 1.0 - mu * kappa;
            if speed.abs() < crate::geometry::FOCAL_GUARD || speed * sigma < 0.0 {
                return Err(Error::FocalDegeneracy {
                    u,
                    v: 0.0,
                    factor: speed,
                });
            }
            sigma = speed.signum();
        }
        let table_u = base.unwrap.nodes.clone();
        let mut table_s = Vec::with_capacity(table_u.len());
        for (&u, &phi) in table_u.iter().zip(&base.unwrap.phi) {
            table_s.push(sigma * ((u - u_ref) - mu * (phi - phi_ref)));
        }
        let (s0, s1) = (table_s[0], table_s[table_s.len() - 1]);
        let natural = (s0.min(s1), s0.max(s1));
        let data = ParallelData {
            base: base.clone(),
            mu,
            sigma,
            u_ref,
            phi_ref,
            table_u,
            table_s,
        };
        Self::build(
            Kind::Parallel(Arc::new(data)),
            format!("parallel:base={},mu={mu}", base.label),
            natural,
            0.0,
        )
    }

    pub fn from_spec(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, args) = match text.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (text, None),
        };
        let single = |key: &str, default: f64| -> Result<f64> {
            match args {
                None => Ok(default),
                Some(a) => match a.split_once('=') {
                    Some((k, v)) if k.trim() == key => spec_number(v),
                    _ => Err(Error::Parse(format!("expected {key}=<value> for {name}"))),
                },
            }
        };
        match name {
            "circle" => Self::circle(single("r", 1.0)?),
            "catenary" => Self::catenary(single("a", 1.0)?),
            "torus" => Self::torus(single("a", 2.0)?),
            "phi" => {
                let args = args.ok_or_else(|| Error::Parse("phi needs an expression".into()))?;
                let mut parts = args.split(';');
                let expr = parts.next().unwrap_or("").trim();
                let (mut f0, mut u0, mut range, mut margin) = (1.0, 0.0, None, 0.0);
                for part in parts {
                    let (k, v) = part
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
                    match k.trim() {
                        "f0" => f0 = spec_number(v)?,
                        "u0" => u0 = spec_number(v)?,
                        "margin" => margin = spec_number(v)?,
                        "range" => {
                            let (a, b) = v
                                .split_once(':')
                                .ok_or_else(|| Error::Parse(format!("range needs a:b, got {v:?}")))?;
                            range = Some((spec_number(a)?, spec_number(b)?));
                        }
                        other => return Err(Error::Parse(format!("unknown phi key {other:?}"))),
                    }
                }
                let range = range.ok_or_else(|| Error::Parse("phi profile needs range=a:b".into()))?;
                Self::from_phi_expr_with_margin(expr, f0, u0, range, margin)
            }
            "parallel" => {
                let args = args.ok_or_else(|| Error::Parse("parallel needs base=..,mu=..".into()))?;
                let base = args
                    .strip_prefix("base=")
                    .ok_or_else(|| Error::Parse("parallel needs base=<profile>".into()))?;
                let (base, mu) = base
                    .rsplit_once(",mu=")
                    .ok_or_else(|| Error::Parse("parallel needs ,mu=<value>".into()))?;
                Self::parallel(Arc::new(Self::from_spec(base)?), spec_number(mu)?)
            }
            _ => Err(Error::Parse(format!("unknown profile {name:?}"))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn natural_range(&self) -> (f64, f64) {
        self.natural
    }

    /// Fraction of the natural range cut at each end.
    pub fn singular_margin(&self) -> f64 {
        self.margin
    }

    pub fn regular_range(&self) -> (f64, f64) {
        let (a, b) = self.natural;
        let cut = self.margin * (b - a);
        (a + cut, b - cut)
    }

    pub fn max_order(&self) -> usize {
        match &self.kind {
            Kind::Parallel(d) => d.base.max_order().saturating_sub(1),
            _ => MAX_ORDER,
        }
    }

    /// Taylor coefficients `(f_0..=f_order, g_0..=g_order)` at `u`.
    pub fn taylor(&self, u: f64, order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if order > self.max_order() {
            return Err(Error::InsufficientOrder {
                needed: order,
                available: self.max_order(),
            });
        }
        if !u.is_finite() {
            return Err(Error::SingularDomain { u, v: 0.0 });
        }
        match &self.kind {
            Kind::Circle { r } => {
                let (s, c) = series::sin_cos(u / r, order);
                let mut scale = *r;
                let mut f = Vec::with_capacity(order + 1);
                let mut g = Vec::with_capacity(order + 1);
                for k in 0..=order {
                    f.push(scale * s[k]);
                    g.push(-scale * c[k]);
                    scale /= r;
                }
                Ok((f, g))
            }
            Kind::Catenary { a } => {
                let f = series::powf(&[a * a + u * u, 2.0 * u, 1.0], 0.5, order);
                let t = series::asinh(u / a, order);
                let mut scale = *a;
                let g = t
                    .iter()
                    .map(|tk| {
                        let v = scale * tk;
                        scale /= a;
                        v
                    })
                    .collect();
                Ok((f, g))
            }
            Kind::Torus { a } => {
                let (s, mut c) = series::sin_cos(u, order);
                c[0] += a;
                Ok((c, s))
            }
            Kind::Phi(d) => self.phi_taylor(d, u, order),
            Kind::Parallel(d) => self.parallel_taylor(d, u, order),
        }
    }

    fn phi_taylor(&self, d: &PhiData, u: f64, order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let (a, b) = self.natural;
        let slack = 1e-9 * (b - a);
        if u < a - slack || u > b + slack {
            return Err(Error::SingularDomain { u, v: 0.0 });
        }
        let m = order.saturating_sub(1);
        let p = (d.phi)(u, m)?;
        let (s0, c0) = series::sin_cos(p[0], m);
        let mut delta = p.clone();
        delta[0] = 0.0;
        let sp = series::compose(&s0, &delta, m);
        let cp = series::compose(&c0, &delta, m);
        let j = nearest(&d.nodes, u);
        let angle = |t: f64| -> f64 { (d.phi)(t, 0).map(|c| c[0]).unwrap_or(f64::NAN) };
        let f0 = d.f[j] + quadrature::integrate(|t| angle(t).cos(), d.nodes[j], u, QUAD_TOL);
        let g0 = d.g[j] + quadrature::integrate(|t| angle(t).sin(), d.nodes[j], u, QUAD_TOL);
        let mut f = vec![f0];
        let mut g = vec![g0];
        for k in 1..=order {
            f.push(cp[k - 1] / k as f64);
            g.push(sp[k - 1] / k as f64);
        }
        Ok((f, g))
    }

    /// Base parameter at arc length `s` of the offset curve.
    fn parallel_base_point(&self, d: &ParallelData, s: f64) -> Result<f64> {
        let (lo, hi) = self.natural;
        let slack = 1e-9 * (hi - lo);
        if s < lo - slack || s > hi + slack {
            return Err(Error::SingularDomain { u: s, v: 0.0 });
        }
        let n = d.table_s.len();
        // table_s is monotone in the node index, increasing when sigma > 0
        let key = |i: usize| d.sigma * d.table_s[i];
        let target = d.sigma * s;
        let (mut l, mut r) = (0usize, n - 1);
        while r - l > 1 {
            let mid = (l + r) / 2;
            if key(mid) <= target {
                l = mid;
            } else {
                r = mid;
            }
        }
        let (mut ua, mut ub) = (d.table_u[l], d.table_u[r]);
        let arc = |u: f64| -> Result<(f64, f64)> {
            let (phi, kappa) = d.base.turning_angle(u)?;
            Ok((
                d.sigma * ((u - d.u_ref) - d.mu * (phi - d.phi_ref)) - s,
                d.sigma * (1.0 - d.mu * kappa),
            ))
        };
        let (sa, _) = arc(ua)?;
        if sa.abs() <= 1e-15 {
            return Ok(ua);
        }
        let mut u = 0.5 * (ua + ub);
        for _ in 0..60 {
            let (val, slope) = arc(u)?;
            if val.abs() <= 1e-15 * (1.0 + s.abs()) {
                break;
            }
            // keep the bracket in terms of sign(val) relative to sign(sa)
            if (val > 0.0) == (sa > 0.0) {
                ua = u;
            } else {
                ub = u;
            }
            let newton = u - val / slope;
            u = if newton > ua.min(ub) && newton < ua.max(ub) {
                newton
            } else {
                0.5 * (ua + ub)
            };
            if (ub - ua).abs() < 1e-16 {
                break;
            }
        }
        Ok(u)
    }

    fn parallel_taylor(&self, d: &ParallelData, s: f64, order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let u0 = self.parallel_base_point(d, s)?;
        let (f, g) = d.base.taylor(u0, order + 1)?;
        let mu = d.mu;
        let big_f: Vec<f64> = (0..=order)
            .map(|k| f[k] - mu * (k + 1) as f64 * g[k + 1])
            .collect();
        let big_g: Vec<f64> = (0..=order)
            .map(|k| g[k] + mu * (k + 1) as f64 * f[k + 1])
            .collect();
        if order == 0 {
            return Ok((big_f, big_g));
        }
        let phi = phi_series(&f, &g, 0.0, order);
        let mut arc = vec![0.0; order + 1];
        arc[1] = d.sigma * (1.0 - mu * phi[1]);
        for k in 2..=order {
            arc[k] = -d.sigma * mu * phi[k];
        }
        let t = series::reversion(&arc, order);
        Ok((
            series::compose(&big_f, &t, order),
            series::compose(&big_g, &t, order),
        ))
    }

    /// `f` and `g` as jets in `u` at `(u, ·)`.
    pub fn eval(&self, u: f64, order: usize) -> Result<(Jet2, Jet2)> {
        let (f, g) = self.taylor(u, order)?;
        Ok((
            Jet2::from_univariate(Var::U, &f, order),
            Jet2::from_univariate(Var::U, &g, order),
        ))
    }

    /// Continuous turning angle `φ` (`f' = cos φ`, `g' = sin φ`) and the profile
    /// curvature `κ = φ' = f'g'' - g'f''`.
    pub fn turning_angle(&self, u: f64) -> Result<(f64, f64)> {
        let (f, g) = self.taylor(u, 2)?;
        let t = &self.unwrap;
        let (a, b) = (t.nodes[0], t.nodes[t.nodes.len() - 1]);
        let slack = 1e-9 * (b - a);
        if u < a - slack || u > b + slack {
            return Err(Error::SingularDomain { u, v: 0.0 });
        }
        let j = nearest(&t.nodes, u);
        let principal = g[1].atan2(f[1]);
        let phi = t.phi[j] + wrap_angle(principal - t.principal[j]);
        let kappa = f[1] * 2.0 * g[2] - g[1] * 2.0 * f[2];
        Ok((phi, kappa))
    }

    /// Taylor coefficients `φ_0..=φ_order` of the turning angle at `u`.
    pub fn turning_series(&self, u: f64, order: usize) -> Result<Vec<f64>> {
        let (phi0, _) = self.turning_angle(u)?;
        let (f, g) = self.taylor(u, order + 1)?;
        Ok(phi_series(&f, &g, phi0, order))
    }

    /// This profile's turning angle as a [`PhiFn`], e.g. to rebuild it with
    /// [`Profile::from_phi`].
    pub fn turning_fn(self: &Arc<Self>) -> PhiFn {
        let me = Arc::clone(self);
        Arc::new(move |u, order| me.turning_series(u, order))
    }
}
