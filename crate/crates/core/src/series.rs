//! Univariate truncated power series, stored as `c[k]` = coefficient of `t^k`.
//!
//! These back the elementary functions on [`Jet2`](crate::jets::Jet2): a function is
//! expanded around the jet's constant term here and then composed with the jet's
//! nilpotent part.

pub(crate) fn mul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m + 1];
    for (i, &ai) in a.iter().enumerate().take(m + 1) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(m + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn get(a: &[f64], k: usize) -> f64 {
    a.get(k).copied().unwrap_or(0.0)
}

/// `1 / a`; caller guarantees `a[0] != 0`.
pub(crate) fn recip(a: &[f64], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m + 1];
    out[0] = 1.0 / a[0];
    for k in 1..=m {
        let s: f64 = (1..=k).map(|j| get(a, j) * out[k - j]).sum();
        out[k] = -s / a[0];
    }
    out
}

/// `a^alpha` by the J.C.P. Miller recurrence; caller guarantees `a[0] > 0`.
pub(crate) fn powf(a: &[f64], alpha: f64, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m + 1];
    out[0] = a[0].powf(alpha);
    for k in 1..=m {
        let mut s = 0.0;
        for j in 1..=k {
            s += (alpha * j as f64 - (k - j) as f64) * get(a, j) * out[k - j];
        }
        out[k] = s / (k as f64 * a[0]);
    }
    out
}

/// Antiderivative with constant term `c0`.
pub(crate) fn integrate(a: &[f64], c0: f64, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m + 1];
    out[0] = c0;
    for k in 1..=m {
        out[k] = get(a, k - 1) / k as f64;
    }
    out
}

pub(crate) fn derivative(a: &[f64]) -> Vec<f64> {
    (1..a.len()).map(|k| k as f64 * a[k]).collect()
}

/// `a(b(t))` where `b[0] == 0`.
pub(crate) fn compose(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    debug_assert!(b.first().is_none_or(|&b0| b0 == 0.0));
    let n = a.len().min(m + 1);
    let mut out = vec![0.0; m + 1];
    if n == 0 {
        return out;
    }
    out[0] = a[n - 1];
    for k in (0..n - 1).rev() {
        out = mul(&out, b, m);
        out[0] += a[k];
    }
    out
}

/// Series reversion: given `s` with `s[0] == 0, s[1] != 0`, returns `r` with
/// `s(r(t)) = t` through order `m`.
pub(crate) fn reversion(s: &[f64], m: usize) -> Vec<f64> {
    let ds = derivative(s);
    let mut r = vec![0.0; m + 1];
    if m == 0 {
        return r;
    }
    r[1] = 1.0 / s[1];
    // Newton on series: r <- r - (s(r) - t) / s'(r); each pass doubles the
    // number of correct coefficients.
    let mut correct = 1;
    while correct < m {
        let mut sr = compose(s, &r, m);
        sr[1] -= 1.0;
        let dsr = compose(&ds, &r, m);
        let step = mul(&sr, &recip(&dsr, m), m);
        for k in 0..=m {
            r[k] -= step[k];
        }
        r[0] = 0.0;
        correct *= 2;
    }
    r
}

/// Taylor coefficients of `sin` and `cos` at `x0`.
pub(crate) fn sin_cos(x0: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
    let (s, c) = x0.sin_cos();
    // k-th derivative cycles through sin, cos, -sin, -cos.
    let sin_d = [s, c, -s, -c];
    let cos_d = [c, -s, -c, s];
    let mut fact = 1.0;
    let mut sv = Vec::with_capacity(m + 1);
    let mut cv = Vec::with_capacity(m + 1);
    for k in 0..=m {
        if k > 0 {
            fact *= k as f64;
        }
        sv.push(sin_d[k % 4] / fact);
        cv.push(cos_d[k % 4] / fact);
    }
    (sv, cv)
}

pub(crate) fn exp(x0: f64, m: usize) -> Vec<f64> {
    let e = x0.exp();
    let mut out = Vec::with_capacity(m + 1);
    let mut fact = 1.0;
    for k in 0..=m {
        if k > 0 {
            fact *= k as f64;
        }
        out.push(e / fact);
    }
    out
}

pub(crate) fn sinh_cosh(x0: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
    let (s, c) = (x0.sinh(), x0.cosh());
    let mut fact = 1.0;
    let mut sv = Vec::with_capacity(m + 1);
    let mut cv = Vec::with_capacity(m + 1);
    for k in 0..=m {
        if k > 0 {
            fact *= k as f64;
        }
        let (ds, dc) = if k % 2 == 0 { (s, c) } else { (c, s) };
        sv.push(ds / fact);
        cv.push(dc / fact);
    }
    (sv, cv)
}

pub(crate) fn ln(x0: f64, m: usize) -> Vec<f64> {
    let mut out = vec![x0.ln()];
    let mut p = 1.0;
    for k in 1..=m {
        p *= x0;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        out.push(sign / (k as f64 * p));
    }
    out
}

/// Coefficients of `(x0 + t)^alpha`.
pub(crate) fn power(x0: f64, alpha: f64, m: usize) -> Vec<f64> {
    powf(&[x0, 1.0], alpha, m)
}

pub(crate) fn atan(x0: f64, m: usize) -> Vec<f64> {
    // d/dx atan x = 1 / (1 + x^2)
    let q = [1.0 + x0 * x0, 2.0 * x0, 1.0];
    let d = recip(&q, m.saturating_sub(1));
    integrate(&d, x0.atan(), m)
}

pub(crate) fn asinh(x0: f64, m: usize) -> Vec<f64> {
    // d/dx asinh x = (1 + x^2)^(-1/2)
    let q = [1.0 + x0 * x0, 2.0 * x0, 1.0];
    let d = powf(&q, -0.5, m.saturating_sub(1));
    integrate(&d, x0.asinh(), m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reversion_inverts_exp_minus_one() {
        // s(t) = e^t - 1  =>  r(t) = ln(1 + t)
        let mut s = exp(0.0, 8);
        s[0] = 0.0;
        let r = reversion(&s, 8);
        let expect = ln(1.0, 8);
        for k in 1..=8 {
            assert!((r[k] - expect[k]).abs() < 1e-12, "k={k}: {} vs {}", r[k], expect[k]);
        }
    }

    #[test]
    fn atan_series_matches_known_maclaurin() {
        let a = atan(0.0, 7);
        let expect = [0.0, 1.0, 0.0, -1.0 / 3.0, 0.0, 1.0 / 5.0, 0.0, -1.0 / 7.0];
        for k in 0..8 {
            assert!((a[k] - expect[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn asinh_series_at_zero() {
        let a = asinh(0.0, 5);
        let expect = [0.0, 1.0, 0.0, -1.0 / 6.0, 0.0, 3.0 / 40.0];
        for k in 0..6 {
            assert!((a[k] - expect[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn compose_sin_of_series() {
        // sin(2t) through order 5
        let (s, _) = sin_cos(0.0, 5);
        let out = compose(&s, &[0.0, 2.0], 5);
        let expect = [0.0, 2.0, 0.0, -8.0 / 6.0, 0.0, 32.0 / 120.0];
        for k in 0..6 {
            assert!((out[k] - expect[k]).abs() < 1e-14);
        }
    }
}
