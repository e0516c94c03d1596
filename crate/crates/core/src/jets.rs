//! Truncated bivariate Taylor jets.
//!
//! A [`Jet2`] of order `m` holds the Taylor coefficients
//! `c[i][j] = ∂^{i+j} f / ∂u^i ∂v^j / (i! j!)` for all `i + j <= m` at a single
//! expansion point. Arithmetic is exact up to truncation: products and
//! quotients discard every term of total degree above `m`.
//!
//! Coefficients are stored densely by total degree, so a jet of order `m`
//! uses the first `(m + 1)(m + 2) / 2` slots and truncation is a prefix.
//!
//! [`fd_oracle`] is an independent central-difference estimator used to check
//! jet derivatives; it never touches jet arithmetic.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::series;

pub const MAX_ORDER: usize = 10;
const SLOTS: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;

#[inline]
fn idx(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

#[inline]
pub fn slot_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    U,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Log,
    Sqrt,
    Recip,
    Asinh,
    Atan,
}

#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    order: usize,
    c: [f64; SLOTS],
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet2")
            .field("order", &self.order)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

impl Jet2 {
    pub fn zero(order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        Jet2 {
            order,
            c: [0.0; SLOTS],
        }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.c[0] = value;
        j
    }

    /// Coordinate jet: `value + (u - u0)` or `value + (v - v0)`.
    pub fn variable(which: Var, value: f64, order: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::Bounds {
                order,
                max: MAX_ORDER,
            });
        }
        let mut j = Self::constant(value, order);
        if order >= 1 {
            match which {
                Var::U => j.c[idx(1, 0)] = 1.0,
                Var::V => j.c[idx(0, 1)] = 1.0,
            }
        }
        Ok(j)
    }

    /// Jet in `u` only, from univariate Taylor coefficients.
    pub fn from_univariate(which: Var, coeffs: &[f64], order: usize) -> Self {
        let mut j = Self::zero(order);
        for (k, &ck) in coeffs.iter().enumerate().take(order + 1) {
            match which {
                Var::U => j.c[idx(k, 0)] = ck,
                Var::V => j.c[idx(0, k)] = ck,
            }
        }
        j
    }

    /// Univariate coefficients along one variable (the other held fixed).
    pub fn univariate(&self, which: Var) -> Vec<f64> {
        (0..=self.order)
            .map(|k| match which {
                Var::U => self.c[idx(k, 0)],
                Var::V => self.c[idx(0, k)],
            })
            .collect()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient `(i, j)`; zero beyond the jet order.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.c[idx(i, j)]
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, value: f64) {
        assert!(i + j <= self.order);
        self.c[idx(i, j)] = value;
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..slot_count(self.order)]
    }

    /// `∂^{i+j} f / ∂u^i ∂v^j` at the expansion point.
    pub fn partial(&self, i: usize, j: usize) -> Result<f64> {
        if i + j > self.order {
            return Err(Error::InsufficientOrder {
                needed: i + j,
                available: self.order,
            });
        }
        Ok(self.c[idx(i, j)] * factorial(i) * factorial(j))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let mut out = Self::zero(order);
        let n = slot_count(order);
        out.c[..n].copy_from_slice(&self.c[..n]);
        out
    }

    /// Partial derivative as a jet of one lower order.
    pub fn diff(&self, which: Var) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::InsufficientOrder {
                needed: 1,
                available: 0,
            });
        }
        let m = self.order - 1;
        let mut out = Self::zero(m);
        for d in 0..=m {
            for j in 0..=d {
                let i = d - j;
                out.c[idx(i, j)] = match which {
                    Var::U => (i + 1) as f64 * self.c[idx(i + 1, j)],
                    Var::V => (j + 1) as f64 * self.c[idx(i, j + 1)],
                };
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for x in &mut out.c[..slot_count(self.order)] {
            *x *= s;
        }
        out
    }

    pub fn add_scalar(&self, s: f64) -> Self {
        let mut out = *self;
        out.c[0] += s;
        out
    }

    fn mul_jet(&self, rhs: &Self) -> Self {
        let m = self.order.min(rhs.order);
        let mut out = Self::zero(m);
        for d in 0..=m {
            for j in 0..=d {
                let i = d - j;
                let mut s = 0.0;
                for a in 0..=i {
                    for b in 0..=j {
                        let x = self.c[idx(a, b)];
                        if x != 0.0 {
                            s += x * rhs.c[idx(i - a, j - b)];
                        }
                    }
                }
                out.c[idx(i, j)] = s;
            }
        }
        out
    }

    /// Truncated quotient; fails when the divisor's constant term vanishes.
    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        let b0 = rhs.c[0];
        if b0 == 0.0 || !b0.is_finite() {
            return Err(Error::SingularJet(format!(
                "division by jet with constant term {b0}"
            )));
        }
        let m = self.order.min(rhs.order);
        let mut out = Self::zero(m);
        for d in 0..=m {
            for j in 0..=d {
                let i = d - j;
                let mut s = self.c[idx(i, j)];
                for a in 0..=i {
                    for b in 0..=j {
                        if a + b == 0 {
                            continue;
                        }
                        s -= rhs.c[idx(a, b)] * out.c[idx(i - a, j - b)];
                    }
                }
                out.c[idx(i, j)] = s / b0;
            }
        }
        Ok(out)
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(1.0, self.order).checked_div(self)
    }

    /// `Σ t_k (self - self(0))^k` for univariate coefficients `t`.
    pub fn compose(&self, t: &[f64]) -> Self {
        let m = self.order;
        let mut delta = *self;
        delta.c[0] = 0.0;
        let n = t.len().min(m + 1);
        if n == 0 {
            return Self::zero(m);
        }
        let mut out = Self::constant(t[n - 1], m);
        for k in (0..n - 1).rev() {
            out = out.mul_jet(&delta);
            out.c[0] += t[k];
        }
        out
    }

    pub fn sin(&self) -> Self {
        self.compose(&series::sin_cos(self.c[0], self.order).0)
    }

    pub fn cos(&self) -> Self {
        self.compose(&series::sin_cos(self.c[0], self.order).1)
    }

    pub fn sinh(&self) -> Self {
        self.compose(&series::sinh_cosh(self.c[0], self.order).0)
    }

    pub fn cosh(&self) -> Self {
        self.compose(&series::sinh_cosh(self.c[0], self.order).1)
    }

    pub fn exp(&self) -> Self {
        self.compose(&series::exp(self.c[0], self.order))
    }

    pub fn atan(&self) -> Self {
        self.compose(&series::atan(self.c[0], self.order))
    }

    pub fn asinh(&self) -> Self {
        self.compose(&series::asinh(self.c[0], self.order))
    }

    pub fn ln(&self) -> Result<Self> {
        let x0 = self.c[0];
        if x0 <= 0.0 || !x0.is_finite() {
            return Err(Error::SingularJet(format!("log of {x0}")));
        }
        Ok(self.compose(&series::ln(x0, self.order)))
    }

    pub fn sqrt(&self) -> Result<Self> {
        let x0 = self.c[0];
        if x0 <= 0.0 || !x0.is_finite() {
            return Err(Error::SingularJet(format!("sqrt of {x0}")));
        }
        Ok(self.compose(&series::power(x0, 0.5, self.order)))
    }

    pub fn apply(&self, f: Elementary) -> Result<Self> {
        Ok(match f {
            Elementary::Sin => self.sin(),
            Elementary::Cos => self.cos(),
            Elementary::Sinh => self.sinh(),
            Elementary::Cosh => self.cosh(),
            Elementary::Exp => self.exp(),
            Elementary::Log => self.ln()?,
            Elementary::Sqrt => self.sqrt()?,
            Elementary::Recip => self.recip()?,
            Elementary::Asinh => self.asinh(),
            Elementary::Atan => self.atan(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = slot_count(self.order.min(other.order));
        self.c[..n]
            .iter()
            .zip(&other.c[..n])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl Add for Jet2 {
    type Output = Jet2;
    #[allow(clippy::op_ref)]
    fn add(self, rhs: Jet2) -> Jet2 {
        &self + &rhs
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        let m = self.order.min(rhs.order);
        let mut out = self.truncate(m);
        for (o, r) in out.c[..slot_count(m)].iter_mut().zip(&rhs.c) {
            *o += r;
        }
        out
    }
}

impl AddAssign<&Jet2> for Jet2 {
    fn add_assign(&mut self, rhs: &Jet2) {
        *self = &*self + rhs;
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    #[allow(clippy::op_ref)]
    fn sub(self, rhs: Jet2) -> Jet2 {
        &self - &rhs
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        let m = self.order.min(rhs.order);
        let mut out = self.truncate(m);
        for (o, r) in out.c[..slot_count(m)].iter_mut().zip(&rhs.c) {
            *o -= r;
        }
        out
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        self.mul_jet(&rhs)
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        self.mul_jet(rhs)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

/// Dot product of two jet 3-vectors.
pub fn dot3(a: &[Jet2; 3], b: &[Jet2; 3]) -> Jet2 {
    ((a[0] * b[0]) + (a[1] * b[1])) + (a[2] * b[2])
}

pub fn cross3(a: &[Jet2; 3], b: &[Jet2; 3]) -> [Jet2; 3] {
    [
        (a[1] * b[2]) - (a[2] * b[1]),
        (a[2] * b[0]) - (a[0] * b[2]),
        (a[0] * b[1]) - (a[1] * b[0]),
    ]
}

pub fn diff3(a: &[Jet2; 3], which: Var) -> Result<[Jet2; 3]> {
    Ok([a[0].diff(which)?, a[1].diff(which)?, a[2].diff(which)?])
}

pub fn truncate3(a: &[Jet2; 3], order: usize) -> [Jet2; 3] {
    [a[0].truncate(order), a[1].truncate(order), a[2].truncate(order)]
}

pub fn values3(a: &[Jet2; 3]) -> [f64; 3] {
    [a[0].value(), a[1].value(), a[2].value()]
}

// Second-order central stencils, (offset, weight) in units of h.
const STENCILS: [&[(i32, f64)]; 5] = [
    &[(0, 1.0)],
    &[(-1, -0.5), (1, 0.5)],
    &[(-1, 1.0), (0, -2.0), (1, 1.0)],
    &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
    &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
];

fn central<F: Fn(f64, f64) -> f64>(f: &F, u: f64, v: f64, i: usize, j: usize, h: f64) -> f64 {
    let mut s = 0.0;
    for &(a, wa) in STENCILS[i] {
        for &(b, wb) in STENCILS[j] {
            s += wa * wb * f(u + a as f64 * h, v + b as f64 * h);
        }
    }
    s / h.powi((i + j) as i32)
}

/// Central finite-difference estimate of `∂^{i+j} f / ∂u^i ∂v^j` at `p`.
///
/// `h` is the step used for first derivatives. Derivatives of total order `k`
/// use the larger step `h^(2/(k+1))` to keep roundoff in check, and every
/// estimate is Richardson-extrapolated from steps `h_k` and `h_k / 2`.
/// Orders above 4 are clamped to the highest stencil available.
pub fn fd_oracle<F: Fn(f64, f64) -> f64>(f: F, p: (f64, f64), i: usize, j: usize, h: f64) -> f64 {
    let (i, j) = (i.min(4), j.min(4));
    let k = i + j;
    if k == 0 {
        return f(p.0, p.1);
    }
    let hk = h.powf(2.0 / (k as f64 + 1.0));
    let coarse = central(&f, p.0, p.1, i, j, hk);
    let fine = central(&f, p.0, p.1, i, j, hk / 2.0);
    (4.0 * fine - coarse) / 3.0
}
