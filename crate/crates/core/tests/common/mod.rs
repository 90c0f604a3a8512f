#![allow(dead_code)]

use cobro_core::ctmc::{Generator, RegimeConfig};
use cobro_core::fourier::MarketParams;
use cobro_core::numeric::norm_cdf;

pub fn reference_generator() -> Generator {
    Generator::new(&[[-1.0, 0.8, 0.2], [0.4, -1.0, 0.6], [0.3, 0.7, -1.0]]).unwrap()
}

/// α = [0.3, 0.6, 0.9], Q0 = e₁.
pub fn first_set() -> RegimeConfig {
    RegimeConfig::new(reference_generator(), vec![1.0, 0.0, 0.0], vec![0.3, 0.6, 0.9]).unwrap()
}

/// α = [0.3, 0.6, 0.95], Q0 = [0.2, 0, 0.8].
pub fn second_set() -> RegimeConfig {
    RegimeConfig::new(reference_generator(), vec![0.2, 0.0, 0.8], vec![0.3, 0.6, 0.95]).unwrap()
}

pub fn market() -> MarketParams {
    MarketParams::new(0.05, 100.0, 120.0, 0.2, 0.3).unwrap()
}

pub fn strikes() -> Vec<f64> {
    (0..7).map(|i| 80.0 + 10.0 * i as f64).collect()
}

/// Kolmogorov–Smirnov distance between the sample and N(0, var).
pub fn ks_normal(xs: &[f64], var: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let sd = var.sqrt();
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = norm_cdf(x / sd);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
