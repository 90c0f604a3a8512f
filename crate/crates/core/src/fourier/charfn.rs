use num_complex::Complex64;

use crate::ctmc::{LaplaceTransform, RegimeConfig};
use crate::error::{Error, Result};

/// `Φ(z1, z2) = E[exp(i(z1 X_T + z2 Y_S))] = e^{−τ z2²/2} L_τ(−(z1² − z2²)/2)`.
#[derive(Debug, Clone)]
pub struct CharFn {
    laplace: LaplaceTransform,
    tau: f64,
    /// `α·τ` when the chain has a single state, making `Φ` Gaussian.
    single: Option<f64>,
}

impl CharFn {
    pub fn new(cfg: &RegimeConfig, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::invalid(format!("maturity {tau} must be positive")));
        }
        Ok(Self {
            laplace: LaplaceTransform::new(cfg, tau)?,
            tau,
            single: (cfg.n() == 1).then(|| cfg.alpha()[0] * tau),
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn eval(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        let z2sq = z2 * z2;
        let w = -0.5 * (z1 * z1 - z2sq);
        match self.single {
            Some(at) => (-0.5 * self.tau * z2sq + at * w).exp(),
            None => {
                let shift = self.laplace.log_magnitude_bound(w);
                (-0.5 * self.tau * z2sq + shift).exp() * self.laplace.eval_shifted(w, shift)
            }
        }
    }

    /// `weight · Φ(z1, z2)`, or `None` when `ln|weight| + ln|Φ|` is provably
    /// below `floor`.
    pub fn eval_above(&self, z1: Complex64, z2: Complex64, weight: Complex64, log_weight: f64, floor: f64) -> Option<Complex64> {
        let z2sq = z2 * z2;
        let w = -0.5 * (z1 * z1 - z2sq);
        let gauss = -0.5 * self.tau * z2sq;
        match self.single {
            Some(at) => {
                let e = gauss + at * w;
                (e.re + log_weight >= floor).then(|| weight * e.exp())
            }
            None => {
                let shift = self.laplace.log_magnitude_bound(w);
                (gauss.re + shift + log_weight >= floor).then(|| weight * (gauss + shift).exp() * self.laplace.eval_shifted(w, shift))
            }
        }
    }

    /// Upper bound on `ln |Φ(z1, z2)|`, cheap enough to screen lattice points.
    pub fn log_bound(&self, z1: Complex64, z2: Complex64) -> f64 {
        let z2sq = z2 * z2;
        let w = -0.5 * (z1 * z1 - z2sq);
        -0.5 * self.tau * z2sq.re + self.laplace.log_magnitude_bound(w)
    }
}

/// One-shot evaluation of the characteristic function of `M_τ`.
pub fn char_fn_m(cfg: &RegimeConfig, tau: f64, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    Ok(CharFn::new(cfg, tau)?.eval(z1, z2))
}
