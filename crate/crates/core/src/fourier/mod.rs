//! Characteristic function of `M_τ = (X_{T_τ}, Y_{S_τ})`, the rainbow payoff
//! representation and the two-dimensional Fourier inversion of
//! `G(x1, x) = E[(γ1 + γ2 e^{γ3ᵀM}) 1{γ4ᵀM ≤ x1} 1{γ5ᵀM ≤ x}]`.

mod charfn;
mod inversion;
mod payoff;

pub use charfn::{char_fn_m, CharFn};
pub use inversion::{g_hat, invert_g, Gammas, Slice};
pub use payoff::{payoff_params, PayoffParams, Term};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Two-asset geometric Brownian market.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    pub r: f64,
    pub s0_1: f64,
    pub s0_2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
}

impl MarketParams {
    pub fn new(r: f64, s0_1: f64, s0_2: f64, sigma1: f64, sigma2: f64) -> Result<Self> {
        let m = Self {
            r,
            s0_1,
            s0_2,
            sigma1,
            sigma2,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.r.is_finite() {
            return Err(Error::invalid("rate must be finite"));
        }
        if !(self.s0_1 > 0.0 && self.s0_2 > 0.0) || !self.s0_1.is_finite() || !self.s0_2.is_finite() {
            return Err(Error::invalid("spot prices must be positive"));
        }
        if !(self.sigma1 > 0.0 && self.sigma2 > 0.0) || !self.sigma1.is_finite() || !self.sigma2.is_finite() {
            return Err(Error::invalid("volatilities must be positive"));
        }
        Ok(())
    }

    /// Risk-neutral forward-like scale `S0ⁱ e^{(r − σᵢ²/2)τ}`.
    pub fn drifted_spots(&self, tau: f64) -> (f64, f64) {
        (
            self.s0_1 * ((self.r - 0.5 * self.sigma1 * self.sigma1) * tau).exp(),
            self.s0_2 * ((self.r - 0.5 * self.sigma2 * self.sigma2) * tau).exp(),
        )
    }

    /// Exponent vectors with `S_τⁱ = Bᵢ e^{Θᵢᵀ M}`.
    pub fn thetas(&self) -> ([f64; 2], [f64; 2]) {
        ([self.sigma1, self.sigma1], [self.sigma2, -self.sigma2])
    }

    /// Terminal prices for a realization of `M = (X_T, Y_S)`.
    pub fn terminal_spots(&self, tau: f64, m: [f64; 2]) -> (f64, f64) {
        let (b1, b2) = self.drifted_spots(tau);
        let (t1, t2) = self.thetas();
        (b1 * (t1[0] * m[0] + t1[1] * m[1]).exp(), b2 * (t2[0] * m[0] + t2[1] * m[1]).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Style {
    BestOfAssetsOrCash,
    Put2Call1,
    CallOnMax,
    CallOnMin,
    PutOnMax,
    PutOnMin,
}

impl Style {
    pub const ALL: [Style; 6] = [
        Style::BestOfAssetsOrCash,
        Style::Put2Call1,
        Style::CallOnMax,
        Style::CallOnMin,
        Style::PutOnMax,
        Style::PutOnMin,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Style::BestOfAssetsOrCash => "best-of-assets-or-cash",
            Style::Put2Call1 => "put2-call1",
            Style::CallOnMax => "call-on-max",
            Style::CallOnMin => "call-on-min",
            Style::PutOnMax => "put-on-max",
            Style::PutOnMin => "put-on-min",
        }
    }

    pub fn payoff(&self, s1: f64, s2: f64, strike: f64) -> f64 {
        match self {
            Style::BestOfAssetsOrCash => s1.max(s2).max(strike),
            Style::Put2Call1 => (s1 - s2).max(0.0),
            Style::CallOnMax => (s1.max(s2) - strike).max(0.0),
            Style::CallOnMin => (s1.min(s2) - strike).max(0.0),
            Style::PutOnMax => (strike - s1.max(s2)).max(0.0),
            Style::PutOnMin => (strike - s1.min(s2)).max(0.0),
        }
    }

    pub fn is_call(&self) -> bool {
        matches!(self, Style::CallOnMax | Style::CallOnMin)
    }

    pub fn is_put(&self) -> bool {
        matches!(self, Style::PutOnMax | Style::PutOnMin)
    }
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Style {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        let style = match key.as_str() {
            "bestofassetsorcash" | "bestof" => Style::BestOfAssetsOrCash,
            "put2call1" | "exchange" => Style::Put2Call1,
            "callonmax" => Style::CallOnMax,
            "callonmin" => Style::CallOnMin,
            "putonmax" => Style::PutOnMax,
            "putonmin" => Style::PutOnMin,
            _ => return Err(Error::invalid(format!("unknown option style '{s}'"))),
        };
        Ok(style)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RainbowSpec {
    pub style: Style,
    pub strike: f64,
    pub maturity: f64,
}

impl RainbowSpec {
    pub fn new(style: Style, strike: f64, maturity: f64) -> Result<Self> {
        if !(maturity > 0.0) || !maturity.is_finite() {
            return Err(Error::invalid(format!("maturity {maturity} must be positive")));
        }
        if !(strike >= 0.0) || !strike.is_finite() {
            return Err(Error::invalid(format!("strike {strike} must be nonnegative")));
        }
        Ok(Self { style, strike, maturity })
    }

    pub fn with_strike(&self, strike: f64) -> Result<Self> {
        Self::new(self.style, strike, self.maturity)
    }
}

/// Truncation, step and contour of the discretized inversion integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierGrid {
    pub n1: usize,
    pub n: usize,
    pub eta1: f64,
    pub eta: f64,
    pub lam1_im: f64,
    pub lam_im: f64,
}

impl Default for FourierGrid {
    fn default() -> Self {
        Self {
            n1: 1000,
            n: 1000,
            eta1: 0.1,
            eta: 0.1,
            lam1_im: 1.0,
            lam_im: 1.0,
        }
    }
}

impl FourierGrid {
    /// Same frequency range as the default with 2.5× fewer nodes per axis.
    pub fn coarse() -> Self {
        Self {
            n1: 400,
            n: 400,
            eta1: 0.25,
            eta: 0.25,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.n == 0 {
            return Err(Error::invalid("Fourier grid needs n1, n >= 1"));
        }
        if !(self.eta1 > 0.0 && self.eta > 0.0) || !self.eta1.is_finite() || !self.eta.is_finite() {
            return Err(Error::invalid("Fourier grid steps must be positive"));
        }
        if !(self.lam1_im > 0.0 && self.lam_im > 0.0) || !self.lam1_im.is_finite() || !self.lam_im.is_finite() {
            return Err(Error::invalid("Fourier contour must lie strictly above the real axis"));
        }
        Ok(())
    }
}
