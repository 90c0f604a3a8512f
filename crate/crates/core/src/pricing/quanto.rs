use num_complex::Complex64;

use super::{Method, PriceResult};
use crate::ctmc::{laplace_t, RegimeConfig};
use crate::error::{Error, Result};
use crate::numeric::norm_cdf;

/// Foreign equity put settled at the fixed exchange rate `r0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantoSpec {
    /// Domestic rate.
    pub r1: f64,
    /// Foreign rate.
    pub r2: f64,
    pub s0: f64,
    pub r0: f64,
    /// Equity volatility.
    pub sigma1: f64,
    /// Exchange-rate volatility.
    pub sigma2: f64,
    pub strike: f64,
    pub maturity: f64,
}

impl QuantoSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.s0 > 0.0 && self.r0 > 0.0 && self.maturity > 0.0) {
            return Err(Error::invalid("Quanto spot, exchange rate and maturity must be positive"));
        }
        if !(self.sigma1 >= 0.0 && self.sigma2 >= 0.0 && self.strike >= 0.0) {
            return Err(Error::invalid("Quanto volatilities and strike must be nonnegative"));
        }
        if !(self.r1.is_finite() && self.r2.is_finite()) {
            return Err(Error::invalid("Quanto rates must be finite"));
        }
        Ok(())
    }
}

/// `R₀(K e^{−r₁t} N(−d₂) − S₀ e^{−(r₁t − r₂t + ln E)} N(−d₁))` with
/// `ln E = ln E[exp(σ₁σ₂ ∫ρ)] = −σ₁σ₂t + ln L_t(2σ₁σ₂)`.
pub fn quanto_put_price(q: &QuantoSpec, cfg: &RegimeConfig) -> Result<PriceResult> {
    q.validate()?;
    let t = q.maturity;
    let s12 = q.sigma1 * q.sigma2;
    let lt = laplace_t(cfg, t, Complex64::new(2.0 * s12, 0.0))?.re;
    if !(lt > 0.0) {
        return Err(Error::Numerical(format!("Laplace transform {lt} is not positive")));
    }
    let ln_e = -s12 * t + lt.ln();
    let disc_fwd = q.s0 * (-(q.r1 * t - q.r2 * t + ln_e)).exp();
    let disc_k = q.strike * (-q.r1 * t).exp();
    let value = if q.sigma1 == 0.0 || q.strike == 0.0 {
        (disc_k - disc_fwd).max(0.0)
    } else {
        let sd = q.sigma1 * t.sqrt();
        let d1 = ((q.s0 / q.strike).ln() + (q.r2 + 0.5 * q.sigma1 * q.sigma1) * t - ln_e) / sd;
        let d2 = d1 - sd;
        disc_k * norm_cdf(-d2) - disc_fwd * norm_cdf(-d1)
    };
    Ok(PriceResult::exact(q.r0 * value.max(0.0), Method::ClosedConstant))
}
