use super::{Method, PriceResult};
use crate::ctmc::{expected_clock, RegimeConfig};
use crate::error::{Error, Result};
use crate::fourier::MarketParams;
use crate::numeric::mean_stderr;
use crate::par;
use crate::rng::substream;
use crate::simulate::{CdEndpoint, ChainSampling};

/// `e^{−rt}(σ₁σ₂(2E[T_t] − t) − K)`.
pub fn covariance_swap_value(cfg: &RegimeConfig, market: &MarketParams, t: f64, strike_k: f64) -> Result<PriceResult> {
    if !(t > 0.0) {
        return Err(Error::invalid("covariance swap needs t > 0"));
    }
    let s12 = market.sigma1 * market.sigma2;
    let cov = s12 * (2.0 * expected_clock(cfg, t)? - t);
    Ok(PriceResult::exact((-market.r * t).exp() * (cov - strike_k), Method::ClosedConstant))
}

/// `e^{−rt} E[max(σ₁σ₂(2T_t − t) − K, 0)]` by Monte Carlo over sampled
/// clocks. When the strike lies outside the range `T_t` can reach, the
/// option is a swap or worthless and is valued exactly.
pub fn covariance_option_value(
    cfg: &RegimeConfig,
    market: &MarketParams,
    t: f64,
    strike_k: f64,
    n_paths: usize,
    seed: u64,
) -> Result<PriceResult> {
    if !(t > 0.0) {
        return Err(Error::invalid("covariance option needs t > 0"));
    }
    let s12 = market.sigma1 * market.sigma2;
    let (lo, hi) = cfg.alpha_range();
    let (cov_lo, cov_hi) = (s12 * (2.0 * lo - 1.0) * t, s12 * (2.0 * hi - 1.0) * t);
    if strike_k >= cov_hi {
        return Ok(PriceResult::exact(0.0, Method::ClosedConstant));
    }
    if strike_k <= cov_lo {
        return covariance_swap_value(cfg, market, t, strike_k);
    }
    if n_paths < 2 {
        return Err(Error::invalid("covariance option needs at least two paths"));
    }
    let df = (-market.r * t).exp();
    let sim = CdEndpoint::new(cfg, t, ChainSampling::Exact)?;
    let payoffs = par::map_indexed(n_paths, |i| {
        let (clock, _) = sim.clock(&mut substream(seed, i as u64));
        df * (s12 * (2.0 * clock - t) - strike_k).max(0.0)
    });
    let (mean, se) = mean_stderr(&payoffs);
    Ok(PriceResult::estimate(mean, se))
}
