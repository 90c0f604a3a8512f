//! Calibration of the constant-correlation model, implied correlation and
//! the error analysis of replacing a dynamic correlation by a constant one.

use crate::ctmc::{expected_rho_bar, stationary_distribution, RegimeConfig};
use crate::error::{Error, Result};
use crate::fourier::{FourierGrid, MarketParams, RainbowSpec, Style};
use crate::numeric::mean_stderr;
use crate::par;
use crate::pricing::RainbowPricer;
use crate::rng::substream;
use crate::simulate::{CdEndpoint, ChainSampling};

/// Correlations are kept inside `[−RHO_BOUND, RHO_BOUND]`.
pub const RHO_BOUND: f64 = 0.999;

/// Observed prices of one style and maturity across strikes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuoteSet {
    pub style: Style,
    pub maturity: f64,
    pub market: MarketParams,
    pub entries: Vec<(f64, f64)>,
}

impl QuoteSet {
    pub fn new(style: Style, maturity: f64, market: MarketParams, entries: Vec<(f64, f64)>) -> Result<Self> {
        market.validate()?;
        RainbowSpec::new(style, 0.0, maturity)?;
        if entries.is_empty() {
            return Err(Error::invalid("calibration needs at least one quote"));
        }
        for (i, &(k, p)) in entries.iter().enumerate() {
            if !(k >= 0.0) || !(p > 0.0) || !p.is_finite() {
                return Err(Error::invalid(format!("quote ({k}, {p}) needs a nonnegative strike and positive price")));
            }
            if entries[..i].iter().any(|&(k2, _)| k2 == k) {
                return Err(Error::invalid(format!("duplicate strike {k}")));
            }
        }
        Ok(Self {
            style,
            maturity,
            market,
            entries,
        })
    }

    pub fn strikes(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.0).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    /// Central-difference step for `L′(ρ)`.
    pub fd_step: f64,
    /// Stop once `|L′(ρ)|` falls below this.
    pub gradient_tol: f64,
    pub max_iterations: usize,
    /// The first step moves `ρ` by this much: step size `|move / L′(ρ₀)|`.
    pub initial_move: f64,
    pub rho0: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            fd_step: 1e-4,
            gradient_tol: 1e-4,
            max_iterations: 10_000,
            initial_move: 0.01,
            rho0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub rho_star: f64,
    pub iterations: usize,
    pub final_gradient: f64,
    pub objective: f64,
    /// Accepted iterates `(ρ, L(ρ))`, starting at `ρ₀`.
    pub trace: Vec<(f64, f64)>,
}

/// `L(ρ) = Σ (Price^c(ρ; K) − quote(K))²`.
pub fn calibration_objective(quotes: &QuoteSet, rho: f64, grid: &FourierGrid) -> Result<f64> {
    let mut pricer = RainbowPricer::constant(&quotes.market, quotes.style, quotes.maturity, rho, grid)?;
    let mut total = 0.0;
    for &(k, p) in &quotes.entries {
        total += (pricer.price(k)?.value - p).powi(2);
    }
    Ok(total)
}

/// Gradient descent on `L(ρ)` from `ρ₀` with fixed step `|0.01/L′(ρ₀)|`,
/// halved whenever a step would increase the objective.
pub fn calibrate_constant_rho(quotes: &QuoteSet, grid: &FourierGrid) -> Result<CalibrationResult> {
    calibrate_with(quotes, grid, &CalibrationOptions::default())
}

/// As [`calibrate_constant_rho`]. Each iterate costs the two evaluations of
/// the central difference; their mean stands in for `L(ρ)` (error
/// `h²L″/2`, the same at neighbouring iterates) in the descent test.
pub fn calibrate_with(quotes: &QuoteSet, grid: &FourierGrid, opts: &CalibrationOptions) -> Result<CalibrationResult> {
    let h = opts.fd_step;
    let bound = RHO_BOUND - h;
    let objective = |rho: f64| calibration_objective(quotes, rho, grid);
    let probe = |rho: f64| -> Result<(f64, f64)> {
        let up = objective(rho + h)?;
        let down = objective(rho - h)?;
        Ok((0.5 * (up + down), (up - down) / (2.0 * h)))
    };
    let done = |rho: f64, iterations: usize, grad: f64, trace: Vec<(f64, f64)>| -> Result<CalibrationResult> {
        Ok(CalibrationResult {
            rho_star: rho,
            iterations,
            final_gradient: grad,
            objective: objective(rho)?,
            trace,
        })
    };

    let mut rho = opts.rho0.clamp(-bound, bound);
    let (mut value, mut grad) = probe(rho)?;
    let mut trace = vec![(rho, value)];
    if grad.abs() < opts.gradient_tol {
        return done(rho, 0, grad, trace);
    }
    let mut step = (opts.initial_move / grad).abs();
    for iteration in 1..=opts.max_iterations {
        let candidate = (rho - step * grad).clamp(-bound, bound);
        let (cand_value, cand_grad) = probe(candidate)?;
        if cand_value > value {
            step *= 0.5;
            if step * grad.abs() < f64::EPSILON {
                break;
            }
            continue;
        }
        rho = candidate;
        value = cand_value;
        grad = cand_grad;
        trace.push((rho, value));
        let pinned = (rho.abs() - bound).abs() < f64::EPSILON && rho * grad < 0.0;
        if grad.abs() < opts.gradient_tol || pinned {
            return done(rho, iteration, grad, trace);
        }
    }
    Err(Error::NonConvergence {
        iterations: trace.len() - 1,
        detail: format!(
            "gradient {grad:e} at rho {rho}; last iterates {:?}",
            &trace[trace.len().saturating_sub(5)..]
        ),
    })
}

/// Bracket ends tried in turn: near `|ρ| = 1` the Gaussian `Φ` barely decays
/// along one direction and a given grid may not resolve the price.
const BRACKET_ENDS: [f64; 9] = [RHO_BOUND, 0.995, 0.99, 0.98, 0.95, 0.9, 0.85, 0.8, 0.7];

/// Constant correlation whose price equals `price`, by bisection on
/// `[−0.999, 0.999]` to `|Δρ| < 1e-6`. An end the grid cannot price is
/// pulled inwards to the first of 0.995, 0.99, ..., 0.7 it can.
pub fn implied_correlation(price: f64, market: &MarketParams, spec: &RainbowSpec, grid: &FourierGrid) -> Result<f64> {
    let f = |rho: f64| -> Result<f64> {
        Ok(RainbowPricer::constant(market, spec.style, spec.maturity, rho, grid)?.price(spec.strike)?.value)
    };
    let end = |sign: f64| -> Result<(f64, f64)> {
        let mut last = None;
        for r in BRACKET_ENDS {
            match f(sign * r) {
                Ok(v) => return Ok((sign * r, v)),
                Err(e @ Error::GridTooCoarse(_)) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one bracket end"))
    };
    let (mut lo, f_lo) = end(-1.0)?;
    let (mut hi, f_hi) = end(1.0)?;
    let (min, max) = (f_lo.min(f_hi), f_lo.max(f_hi));
    if !(price > 0.0) || price < min || price > max {
        return Err(Error::Unattainable { price, lo: min, hi: max });
    }
    let increasing = f_hi >= f_lo;
    while hi - lo >= 1e-6 {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? < price) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Samples of `ρ̄_τ = 2T_τ/τ − 1` from exactly sampled chain paths.
pub fn sample_rho_bar(cfg: &RegimeConfig, tau: f64, n_paths: usize, seed: u64) -> Result<Vec<f64>> {
    let sim = CdEndpoint::new(cfg, tau, ChainSampling::Exact)?;
    Ok(par::map_indexed(n_paths, |i| {
        let (clock, _) = sim.clock(&mut substream(seed, i as u64));
        2.0 * clock / tau - 1.0
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorApprox {
    pub mean_rho_bar: f64,
    pub var_rho_bar: f64,
    /// `Price^c(E ρ̄)`.
    pub first_order: f64,
    /// `Price^c(E ρ̄) + ½ Var(ρ̄) ∂²Price^c/∂ρ²(E ρ̄)`.
    pub value: f64,
}

/// Second-order expansion of a price in `ρ̄` around its mean, with a central
/// second difference of step `h`.
pub fn taylor_expansion(
    mut price_c: impl FnMut(f64) -> Result<f64>,
    mean: f64,
    var: f64,
    h: f64,
) -> Result<TaylorApprox> {
    let centre = price_c(mean)?;
    let value = if var == 0.0 {
        centre
    } else {
        let m = mean.clamp(-RHO_BOUND + h, RHO_BOUND - h);
        let second = (price_c(m + h)? - 2.0 * price_c(m)? + price_c(m - h)?) / (h * h);
        centre + 0.5 * var * second
    };
    Ok(TaylorApprox {
        mean_rho_bar: mean,
        var_rho_bar: var,
        first_order: centre,
        value,
    })
}

/// `Price^d ≈ Price^c(E ρ̄_τ) + ½ Var(ρ̄_τ) ∂²Price^c/∂ρ²`, with `E ρ̄_τ` by
/// quadrature and `Var ρ̄_τ` by Monte Carlo over chain paths.
pub fn taylor_price_approx(
    cfg: &RegimeConfig,
    market: &MarketParams,
    spec: &RainbowSpec,
    grid: &FourierGrid,
    n_chain_paths: usize,
    seed: u64,
) -> Result<TaylorApprox> {
    let tau = spec.maturity;
    let mean = expected_rho_bar(cfg, tau)?;
    let var = if cfg.is_constant() {
        0.0
    } else {
        if n_chain_paths < 2 {
            return Err(Error::invalid("variance estimate needs at least two chain paths"));
        }
        let xs = sample_rho_bar(cfg, tau, n_chain_paths, seed)?;
        let (_, se) = mean_stderr(&xs);
        se * se * xs.len() as f64
    };
    let price_c = |rho: f64| -> Result<f64> {
        Ok(RainbowPricer::constant(market, spec.style, tau, rho, grid)?.price(spec.strike)?.value)
    };
    taylor_expansion(price_c, mean, var, 0.01)
}

/// `(price_constant − price_dynamic) / price_dynamic`.
pub fn relative_error(price_constant: f64, price_dynamic: f64) -> Result<f64> {
    if price_dynamic == 0.0 {
        return Err(Error::invalid("relative error against a zero price"));
    }
    Ok((price_constant - price_dynamic) / price_dynamic)
}

/// Ergodic limit `2αᵀπ − 1` of the estimated constant correlation.
pub fn rho_hat_stationary(cfg: &RegimeConfig) -> Result<f64> {
    let pi = stationary_distribution(cfg.generator())?;
    Ok(2.0 * pi.iter().zip(cfg.alpha()).map(|(p, a)| p * a).sum::<f64>() - 1.0)
}
