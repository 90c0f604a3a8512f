//! Valuation of rainbow options, Quanto puts and covariance derivatives.

mod covariance;
mod quanto;
mod rainbow;

pub use covariance::{covariance_option_value, covariance_swap_value};
pub use quanto::{quanto_put_price, QuantoSpec};
pub use rainbow::{
    bump_delta, delta_s1_fourier, mc_price_from_samples, mc_price_rainbow, price_constant_rho, rainbow_price_fourier,
    sample_m, RainbowPricer,
};

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Fourier,
    ClosedConstant,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Fourier => "fourier",
            Method::ClosedConstant => "closed_constant",
            Method::MonteCarlo => "monte_carlo",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceResult {
    pub value: f64,
    /// Standard error of the estimate; `None` for deterministic methods.
    pub stderr: Option<f64>,
    pub method: Method,
}

impl PriceResult {
    pub(crate) fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            stderr: None,
            method,
        }
    }

    pub(crate) fn estimate(value: f64, stderr: f64) -> Self {
        Self {
            value,
            stderr: Some(stderr),
            method: Method::MonteCarlo,
        }
    }
}
