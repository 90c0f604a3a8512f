//! Scalar numerics shared by several modules.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal CDF via `erfc`, accurate to a few ulps in both tails.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&mut f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Black–Scholes European call with continuous dividend yield `q`.
pub fn bs_call(spot: f64, strike: f64, rate: f64, q: f64, sigma: f64, t: f64) -> f64 {
    let fwd = spot * ((rate - q) * t).exp();
    let df = (-rate * t).exp();
    if sigma <= 0.0 || t <= 0.0 {
        return df * (fwd - strike).max(0.0);
    }
    if strike <= 0.0 {
        return df * (fwd - strike);
    }
    let sd = sigma * t.sqrt();
    let d1 = ((fwd / strike).ln() + 0.5 * sd * sd) / sd;
    let d2 = d1 - sd;
    df * (fwd * norm_cdf(d1) - strike * norm_cdf(d2))
}

/// Black–Scholes European put with continuous dividend yield `q`.
pub fn bs_put(spot: f64, strike: f64, rate: f64, q: f64, sigma: f64, t: f64) -> f64 {
    let fwd = spot * ((rate - q) * t).exp();
    let df = (-rate * t).exp();
    if sigma <= 0.0 || t <= 0.0 || strike <= 0.0 {
        return df * (strike - fwd).max(0.0);
    }
    let sd = sigma * t.sqrt();
    let d1 = ((fwd / strike).ln() + 0.5 * sd * sd) / sd;
    let d2 = d1 - sd;
    df * (strike * norm_cdf(-d2) - fwd * norm_cdf(-d1))
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_values() {
        assert_eq!(norm_cdf(0.0), 0.5);
        assert!((norm_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((norm_cdf(-3.0) - 1.349_898_031_630_094_6e-3).abs() < 1e-17);
        assert!((norm_cdf(-10.0) - 7.619_853_024_160_527e-24).abs() < 1e-36);
    }

    #[test]
    fn simpson_integrates_smooth_function() {
        let v = adaptive_simpson(|x| x.sin(), 0.0, PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn put_call_parity() {
        let (s, k, r, q, v, t) = (100.0, 95.0, 0.03, 0.01, 0.25, 0.7);
        let lhs = bs_call(s, k, r, q, v, t) - bs_put(s, k, r, q, v, t);
        let rhs = s * (-q * t).exp() - k * (-r * t).exp();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
