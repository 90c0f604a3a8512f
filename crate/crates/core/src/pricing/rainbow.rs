use super::{Method, PriceResult};
use crate::ctmc::RegimeConfig;
use crate::error::{Error, Result};
use crate::fourier::{payoff_params, CharFn, FourierGrid, MarketParams, RainbowSpec, Slice, Style};
use crate::numeric::mean_stderr;
use crate::par;
use crate::rng::substream;
use crate::simulate::{CdEndpoint, ChainSampling};

/// Prices below this are treated as a failed inversion rather than round-off.
const NEGATIVE_TOL: f64 = 1e-6;

type SliceKey = [u64; 7];

fn slice_key(g3: [f64; 2], g4: [f64; 2], g5: [f64; 2], x: f64) -> SliceKey {
    [g3[0], g3[1], g4[0], g4[1], g5[0], g5[1], x].map(f64::to_bits)
}

/// Fourier pricer for one style and maturity. Inversion slices depend on
/// the strike only through terms that are cheap to re-sum, so they are
/// cached and shared across strikes.
#[derive(Debug, Clone)]
pub struct RainbowPricer {
    phi: CharFn,
    market: MarketParams,
    style: Style,
    maturity: f64,
    grid: FourierGrid,
    method: Method,
    slices: Vec<(SliceKey, Slice)>,
}

impl RainbowPricer {
    pub fn new(cfg: &RegimeConfig, market: &MarketParams, style: Style, maturity: f64, grid: &FourierGrid) -> Result<Self> {
        market.validate()?;
        grid.validate()?;
        Ok(Self {
            phi: CharFn::new(cfg, maturity)?,
            market: *market,
            style,
            maturity,
            grid: *grid,
            method: Method::Fourier,
            slices: Vec::new(),
        })
    }

    /// Single-state pricer with constant correlation `rho`.
    pub fn constant(market: &MarketParams, style: Style, maturity: f64, rho: f64, grid: &FourierGrid) -> Result<Self> {
        let mut p = Self::new(&RegimeConfig::constant(rho)?, market, style, maturity, grid)?;
        p.method = Method::ClosedConstant;
        Ok(p)
    }

    pub fn style(&self) -> Style {
        self.style
    }

    pub fn maturity(&self) -> f64 {
        self.maturity
    }

    fn slice(&mut self, g3: [f64; 2], g4: [f64; 2], g5: [f64; 2], x: f64) -> Result<&Slice> {
        let key = slice_key(g3, g4, g5, x);
        let idx = match self.slices.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                let s = Slice::new(&self.phi, g3, g4, g5, x, &self.grid)?;
                self.slices.push((key, s));
                self.slices.len() - 1
            }
        };
        Ok(&self.slices[idx].1)
    }

    fn spec(&self, strike: f64) -> Result<RainbowSpec> {
        RainbowSpec::new(self.style, strike, self.maturity)
    }

    pub fn price(&mut self, strike: f64) -> Result<PriceResult> {
        let spec = self.spec(strike)?;
        if spec.style.is_put() && strike == 0.0 {
            return Ok(PriceResult::exact(0.0, self.method));
        }
        let params = payoff_params(&self.market, &spec)?;
        let mut undiscounted = params.cash;
        for (g, x1, x) in params.terms() {
            undiscounted += self.slice(g.g3, g.g4, g.g5, x)?.value(g.g1, g.g2, x1);
        }
        let value = (-self.market.r * self.maturity).exp() * undiscounted;
        if !value.is_finite() || value < -NEGATIVE_TOL {
            return Err(Error::GridTooCoarse(format!(
                "{} price {value:e} at strike {strike} is negative",
                self.style
            )));
        }
        Ok(PriceResult::exact(value.max(0.0), self.method))
    }

    pub fn prices(&mut self, strikes: &[f64]) -> Result<Vec<f64>> {
        strikes.iter().map(|&k| self.price(k).map(|p| p.value)).collect()
    }

    /// `∂Price/∂S0¹` for a call on the max. The boundary terms from the
    /// dependence of `k = ln(B1/B2)` cancel between the two legs, leaving
    /// `e^{−rτ}[(B1/S0¹) E[e^{θ₁ᵀM} 1{…}] + (1/S0¹) ∂G¹/∂x1]`.
    pub fn delta_s1(&mut self, strike: f64) -> Result<f64> {
        if self.style != Style::CallOnMax {
            return Err(Error::UnsupportedStyle {
                operation: "Fourier delta",
                style: self.style.to_string(),
            });
        }
        let spec = self.spec(strike)?;
        let params = payoff_params(&self.market, &spec)?;
        let [(g, x1, x), _] = params.terms();
        let s0 = self.market.s0_1;
        let drift = params.term1.b / s0;
        let slice = self.slice(g.g3, g.g4, g.g5, x)?;
        let d = drift * slice.value(0.0, 1.0, x1) + slice.dx1(g.g1, g.g2, x1) / s0;
        Ok((-self.market.r * self.maturity).exp() * d)
    }
}

/// `e^{−rτ}[cash + G(k₁, k; a₁, b₁, θ₁, c₁, c) + G(k₂, −k; a₂, b₂, θ₂, c₂, −c)]`.
pub fn rainbow_price_fourier(cfg: &RegimeConfig, market: &MarketParams, spec: &RainbowSpec, grid: &FourierGrid) -> Result<PriceResult> {
    RainbowPricer::new(cfg, market, spec.style, spec.maturity, grid)?.price(spec.strike)
}

/// The same pipeline with a single-state chain of local correlation `rho`.
pub fn price_constant_rho(market: &MarketParams, spec: &RainbowSpec, rho: f64, grid: &FourierGrid) -> Result<PriceResult> {
    RainbowPricer::constant(market, spec.style, spec.maturity, rho, grid)?.price(spec.strike)
}

/// Delta with respect to the first spot for a call on the max.
pub fn delta_s1_fourier(cfg: &RegimeConfig, market: &MarketParams, spec: &RainbowSpec, grid: &FourierGrid) -> Result<f64> {
    RainbowPricer::new(cfg, market, spec.style, spec.maturity, grid)?.delta_s1(spec.strike)
}

/// Central bump-and-reprice sensitivity to spot `asset` (1 or 2), bump `rel·S0`.
pub fn bump_delta(
    cfg: &RegimeConfig,
    market: &MarketParams,
    spec: &RainbowSpec,
    grid: &FourierGrid,
    asset: u8,
    rel: f64,
) -> Result<f64> {
    let bumped = |sign: f64| -> Result<f64> {
        let mut m = *market;
        let h = match asset {
            1 => {
                m.s0_1 += sign * rel * market.s0_1;
                rel * market.s0_1
            }
            2 => {
                m.s0_2 += sign * rel * market.s0_2;
                rel * market.s0_2
            }
            _ => return Err(Error::invalid(format!("asset index {asset} must be 1 or 2"))),
        };
        Ok(rainbow_price_fourier(cfg, &m, spec, grid)?.value / h)
    };
    Ok(0.5 * (bumped(1.0)? - bumped(-1.0)?))
}

/// Independent draws of `M_τ = (X_T, Y_S)`; draw `i` uses substream `i`.
pub fn sample_m(cfg: &RegimeConfig, tau: f64, n_paths: usize, seed: u64) -> Result<Vec<[f64; 2]>> {
    let sim = CdEndpoint::new(cfg, tau, ChainSampling::Exact)?;
    Ok(par::map_indexed(n_paths, |i| {
        let e = sim.sample(&mut substream(seed, i as u64));
        [0.5 * (e.b_t + e.w_t), 0.5 * (e.b_t - e.w_t)]
    }))
}

/// Discounted sample mean of the payoff over pre-drawn `M` values.
pub fn mc_price_from_samples(samples: &[[f64; 2]], market: &MarketParams, spec: &RainbowSpec) -> PriceResult {
    let df = (-market.r * spec.maturity).exp();
    let payoffs: Vec<f64> = samples
        .iter()
        .map(|&m| {
            let (s1, s2) = market.terminal_spots(spec.maturity, m);
            df * spec.style.payoff(s1, s2, spec.strike)
        })
        .collect();
    let (mean, se) = mean_stderr(&payoffs);
    PriceResult::estimate(mean, se)
}

/// Monte Carlo oracle from common-decomposition endpoints.
pub fn mc_price_rainbow(
    cfg: &RegimeConfig,
    market: &MarketParams,
    spec: &RainbowSpec,
    n_paths: usize,
    seed: u64,
) -> Result<PriceResult> {
    if n_paths < 100 {
        return Err(Error::invalid("Monte Carlo pricing needs at least 100 paths"));
    }
    market.validate()?;
    let samples = sample_m(cfg, spec.maturity, n_paths, seed)?;
    Ok(mc_price_from_samples(&samples, market, spec))
}
