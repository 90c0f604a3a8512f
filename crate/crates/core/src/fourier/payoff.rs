use super::inversion::Gammas;
use super::{MarketParams, RainbowSpec, Style};
use crate::error::{Error, Result};

/// One indicator-exponential term `(a + b e^{θᵀM}) 1{cᵢᵀM ≤ kᵢ} 1{±cᵀM ≤ ±k}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub a: f64,
    pub b: f64,
    pub theta: [f64; 2],
    pub c_i: [f64; 2],
    pub k_i: f64,
}

/// Payoff written as
/// `cash + (a₁ + b₁e^{θ₁ᵀM})1{c₁ᵀM≤k₁}1{cᵀM≤k} + (a₂ + b₂e^{θ₂ᵀM})1{c₂ᵀM≤k₂}1{cᵀM≥k}`.
///
/// `cash` is zero for every style except best-of-assets-or-cash, whose
/// payoff `max(S¹, S², K)` is `K` plus a call on the max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffParams {
    pub cash: f64,
    pub term1: Term,
    pub term2: Term,
    pub c: [f64; 2],
    pub k: f64,
}

fn dot(u: [f64; 2], m: [f64; 2]) -> f64 {
    u[0] * m[0] + u[1] * m[1]
}

fn neg(u: [f64; 2]) -> [f64; 2] {
    [-u[0], -u[1]]
}

impl PayoffParams {
    /// Evaluates the representation at `M`.
    pub fn evaluate(&self, m: [f64; 2]) -> f64 {
        let side = dot(self.c, m);
        let part = |t: &Term| (t.a + t.b * dot(t.theta, m).exp()) * f64::from(u8::from(dot(t.c_i, m) <= t.k_i));
        let mut v = self.cash;
        if side <= self.k {
            v += part(&self.term1);
        }
        if side >= self.k {
            v += part(&self.term2);
        }
        v
    }

    /// Inversion inputs `(γ, x1, x)` of the two terms; the second term's
    /// region `cᵀM ≥ k` is written as `(−c)ᵀM ≤ −k`.
    pub fn terms(&self) -> [(Gammas, f64, f64); 2] {
        let g = |t: &Term, c: [f64; 2]| Gammas {
            g1: t.a,
            g2: t.b,
            g3: t.theta,
            g4: t.c_i,
            g5: c,
        };
        [
            (g(&self.term1, self.c), self.term1.k_i, self.k),
            (g(&self.term2, neg(self.c)), self.term2.k_i, -self.k),
        ]
    }
}

/// Representation of a rainbow payoff in terms of `M_τ`.
///
/// A zero strike has no logarithm; calls on the max/min and best-of then
/// use always-true strike indicators (`cᵢ = 0`, `kᵢ = 1`), and puts are
/// rejected because their payoff vanishes identically.
pub fn payoff_params(market: &MarketParams, spec: &RainbowSpec) -> Result<PayoffParams> {
    market.validate()?;
    let tau = spec.maturity;
    let (b1, b2) = market.drifted_spots(tau);
    let (t1, t2) = market.thetas();
    let c = [t2[0] - t1[0], t2[1] - t1[1]];
    let k = (b1 / b2).ln();
    let strike = spec.strike;
    let zero_strike = strike == 0.0;

    let term = |a: f64, b: f64, theta: [f64; 2], c_i: [f64; 2], k_i: f64| Term { a, b, theta, c_i, k_i };
    let call_leg = |b: f64, theta: [f64; 2]| {
        if zero_strike {
            term(0.0, b, theta, [0.0, 0.0], 1.0)
        } else {
            term(-strike, b, theta, neg(theta), (b / strike).ln())
        }
    };
    let put_leg = |b: f64, theta: [f64; 2]| term(strike, -b, theta, theta, (strike / b).ln());

    let params = match spec.style {
        Style::CallOnMax | Style::BestOfAssetsOrCash => PayoffParams {
            cash: if spec.style == Style::BestOfAssetsOrCash { strike } else { 0.0 },
            term1: call_leg(b1, t1),
            term2: call_leg(b2, t2),
            c,
            k,
        },
        Style::CallOnMin => PayoffParams {
            cash: 0.0,
            term1: call_leg(b2, t2),
            term2: call_leg(b1, t1),
            c,
            k,
        },
        Style::PutOnMax | Style::PutOnMin if zero_strike => {
            return Err(Error::invalid(format!("{} with zero strike has no log-strike representation", spec.style)));
        }
        Style::PutOnMax => PayoffParams {
            cash: 0.0,
            term1: put_leg(b1, t1),
            term2: put_leg(b2, t2),
            c,
            k,
        },
        Style::PutOnMin => PayoffParams {
            cash: 0.0,
            term1: put_leg(b2, t2),
            term2: put_leg(b1, t1),
            c,
            k,
        },
        Style::Put2Call1 => PayoffParams {
            cash: 0.0,
            term1: term(0.0, b1, t1, c, k),
            term2: term(0.0, -b2, t2, c, k),
            c: [0.0, 0.0],
            k: 0.0,
        },
    };
    Ok(params)
}
