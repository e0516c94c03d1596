//! Offset surfaces `x* = x + μ n` and the relations they share with their base.

use serde::Serialize;

use super::{Frame, Grid, SurfacePatch, FOCAL_GUARD};
use crate::error::{Error, Result};
use crate::jets::{cross3, values3};

/// `1 - 2μH + μ²K` at a base point, or a focal-degeneracy error.
pub(super) fn focal_factor(base: &SurfacePatch, mu: f64, u: f64, v: f64) -> Result<f64> {
    let frame = Frame::new(base, u, v, 0)?;
    let (h, k) = frame.mean_gauss()?;
    let factor = 1.0 - 2.0 * mu * h.value() + mu * mu * k.value();
    if factor.abs() < FOCAL_GUARD {
        return Err(Error::FocalDegeneracy { u, v, factor });
    }
    Ok(factor)
}

#[derive(Debug, Clone, Serialize)]
pub struct ParallelRow {
    pub identity: String,
    pub max_error: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Which closed form for the offset's sum of principal radii the samples support.
#[derive(Debug, Clone, Serialize)]
pub struct RadiiShift {
    /// `max |R* - (R - 2μ)|`
    pub err_minus_two_mu: f64,
    /// `max |R* - (R - μ)|`
    pub err_minus_mu: f64,
    /// `"R-2mu"`, `"R-mu"`, `"both"` (only when μ ≈ 0) or `"neither"`.
    pub supported: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParallelReport {
    pub base: String,
    pub mu: f64,
    pub grid: String,
    pub rows: Vec<ParallelRow>,
    pub radii_shift: RadiiShift,
}

impl ParallelReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, identity: &str) -> Option<&ParallelRow> {
        self.rows.iter().find(|r| r.identity == identity)
    }
}

fn max_abs(acc: &mut f64, x: f64) {
    *acc = acc.max(x.abs());
}

/// Weingarten residual `n_i + b_ij g^{jr} x_r`, largest component.
fn weingarten_residual(f: &Frame) -> Result<f64> {
    let ginv = f.first.inverse()?;
    let (gi11, gi12, gi22) = (ginv.i11.value(), ginv.i12.value(), ginv.i22.value());
    let b = f.second.values();
    let (xu, xv) = (values3(&f.xu), values3(&f.xv));
    let (nu, nv) = (values3(&f.nu), values3(&f.nv));
    let mut worst: f64 = 0.0;
    for (i, ni) in [nu, nv].iter().enumerate() {
        // shape operator column: s^r_i = b_ij g^{jr}
        let s1 = b[i][0] * gi11 + b[i][1] * gi12;
        let s2 = b[i][0] * gi12 + b[i][1] * gi22;
        for c in 0..3 {
            max_abs(&mut worst, ni[c] + s1 * xu[c] + s2 * xv[c]);
        }
    }
    Ok(worst)
}

/// Checks the offset relations pointwise over `grid`:
/// `K* = K/D`, `H* = (H - μK)/D` with `D = 1 - 2μH + μ²K`, shared third form and
/// Gauss map, Weingarten's equation on both surfaces, and
/// `x*_u × x*_v = D (x_u × x_v)`. It also measures `R*` against `R - 2μ` and
/// `R - μ`.
pub fn parallel_invariant_check(
    base: &SurfacePatch,
    mu: f64,
    grid: Grid,
    tol: f64,
) -> Result<ParallelReport> {
    let offset = SurfacePatch::parallel(base.clone(), mu)?;
    let names = [
        "gauss_curvature_relation",
        "mean_curvature_relation",
        "third_form_shared",
        "gauss_map_shared",
        "weingarten_base",
        "weingarten_parallel",
        "cross_product_factor",
    ];
    let mut err = [0.0f64; 7];
    let (mut e2, mut e1) = (0.0f64, 0.0f64);
    for (u, v) in grid.points(&base.domain()) {
        let fb = Frame::new(base, u, v, 0)?;
        let fp = Frame::new(&offset, u, v, 0)?;
        let (h, k) = fb.mean_gauss()?;
        let (hs, ks) = fp.mean_gauss()?;
        let (h, k, hs, ks) = (h.value(), k.value(), hs.value(), ks.value());
        let d = 1.0 - 2.0 * mu * h + mu * mu * k;
        max_abs(&mut err[0], ks - k / d);
        max_abs(&mut err[1], hs - (h - mu * k) / d);
        let (eb, ep) = (fb.third.values(), fp.third.values());
        for i in 0..2 {
            for j in 0..2 {
                max_abs(&mut err[2], ep[i][j] - eb[i][j]);
            }
        }
        let (nb, np) = (values3(&fb.n), values3(&fp.n));
        for c in 0..3 {
            max_abs(&mut err[3], np[c] - nb[c]);
        }
        max_abs(&mut err[4], weingarten_residual(&fb)?);
        max_abs(&mut err[5], weingarten_residual(&fp)?);
        let cb = values3(&cross3(&fb.xu, &fb.xv));
        let cp = values3(&cross3(&fp.xu, &fp.xv));
        for c in 0..3 {
            max_abs(&mut err[6], cp[c] - d * cb[c]);
        }
        let (r, rs) = (2.0 * h / k, 2.0 * hs / ks);
        max_abs(&mut e2, rs - (r - 2.0 * mu));
        max_abs(&mut e1, rs - (r - mu));
    }
    let rows = names
        .iter()
        .zip(err)
        .map(|(name, e)| ParallelRow {
            identity: name.to_string(),
            max_error: e,
            tol,
            pass: e <= tol,
        })
        .collect();
    let supported = match (e2 <= tol, e1 <= tol) {
        (true, true) => "both",
        (true, false) => "R-2mu",
        (false, true) => "R-mu",
        (false, false) => "neither",
    };
    Ok(ParallelReport {
        base: base.label().to_string(),
        mu,
        grid: grid.label(),
        rows,
        radii_shift: RadiiShift {
            err_minus_two_mu: e2,
            err_minus_mu: e1,
            supported: supported.to_string(),
        },
    })
}
