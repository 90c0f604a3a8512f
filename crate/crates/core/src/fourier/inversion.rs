use std::f64::consts::PI;

use num_complex::Complex64;

use super::charfn::CharFn;
use super::FourierGrid;
use crate::ctmc::RegimeConfig;
use crate::error::{Error, Result};
use crate::par;

/// Coefficients of `G(x1, x) = E[(γ1 + γ2 e^{γ3ᵀM}) 1{γ4ᵀM ≤ x1} 1{γ5ᵀM ≤ x}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gammas {
    pub g1: f64,
    pub g2: f64,
    pub g3: [f64; 2],
    pub g4: [f64; 2],
    pub g5: [f64; 2],
}

/// Terms whose magnitude bound falls below this are not evaluated.
const SKIP_LOG: f64 = -50.0;
/// Largest tolerated mass of the integrand on the truncation boundary.
const TRUNCATION_TOL: f64 = 1e-6;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn combine(lam1: Complex64, g4: [f64; 2], lam: Complex64, g5: [f64; 2]) -> (Complex64, Complex64) {
    (lam1 * g4[0] + lam * g5[0], lam1 * g4[1] + lam * g5[1])
}

fn shift(z: (Complex64, Complex64), g3: [f64; 2]) -> (Complex64, Complex64) {
    (z.0 - I * g3[0], z.1 - I * g3[1])
}

fn g_hat_with(phi: &CharFn, g: &Gammas, lam1: Complex64, lam: Complex64) -> Complex64 {
    let z = combine(lam1, g.g4, lam, g.g5);
    let zs = shift(z, g.g3);
    -(g.g1 * phi.eval(z.0, z.1) + g.g2 * phi.eval(zs.0, zs.1)) / (lam * lam1)
}

/// Generalized Fourier transform `Ĝ(λ1, λ) = ∫∫ e^{iλ1x1 + iλx} G(x1, x) dx1 dx`.
pub fn g_hat(g: &Gammas, cfg: &RegimeConfig, tau: f64, lam1: Complex64, lam: Complex64) -> Result<Complex64> {
    if !(lam1.im > 0.0 && lam.im > 0.0) {
        return Err(Error::invalid("transform variables must have positive imaginary parts"));
    }
    let phi = CharFn::new(cfg, tau)?;
    Ok(g_hat_with(&phi, g, lam1, lam))
}

/// `G(x1, x)` by direct summation of the inversion integral on `grid`.
pub fn invert_g(x1: f64, x: f64, g: &Gammas, cfg: &RegimeConfig, tau: f64, grid: &FourierGrid) -> Result<f64> {
    let phi = CharFn::new(cfg, tau)?;
    Ok(Slice::new(&phi, g.g3, g.g4, g.g5, x, grid)?.value(g.g1, g.g2, x1))
}

/// The inversion sum with `(γ3, γ4, γ5, x)` fixed, reduced to one complex
/// coefficient pair per `λ1` node. `G` is then linear in `(γ1, γ2)` and a
/// cheap sum over the nodes in `x1`, so all strikes of a style share slices.
#[derive(Debug, Clone)]
pub struct Slice {
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    /// `gate · Re Σ_j e^{−iλ1_j x1} (γ1 r0[j] + γ2 r1[j])`.
    Rows {
        lam1: Vec<Complex64>,
        r0: Vec<Complex64>,
        r1: Vec<Complex64>,
        gate: bool,
    },
    /// `γ4 = 0`: `1{x1 ≥ 0} · (γ1 s0 + γ2 s1)`.
    Column { s0: f64, s1: f64 },
    /// `γ4 = γ5 = 0`: `1{x1 ≥ 0} 1{x ≥ 0} (γ1 + γ2 E[e^{γ3ᵀM}])`.
    Point { e3: f64, gate: bool },
}

fn is_zero(v: [f64; 2]) -> bool {
    v[0] == 0.0 && v[1] == 0.0
}

/// One term `e^{−iλx} · kernel(λ) · Φ(z)`, skipped when provably negligible.
fn screened(phi: &CharFn, z: (Complex64, Complex64), log_weight: f64, weight: Complex64) -> Complex64 {
    phi.eval_above(z.0, z.1, weight, log_weight, SKIP_LOG).unwrap_or_default()
}

impl Slice {
    pub fn new(phi: &CharFn, g3: [f64; 2], g4: [f64; 2], g5: [f64; 2], x: f64, grid: &FourierGrid) -> Result<Self> {
        grid.validate()?;
        let kind = match (is_zero(g4), is_zero(g5)) {
            (true, true) => Kind::Point {
                e3: phi.eval(-I * g3[0], -I * g3[1]).re,
                gate: x >= 0.0,
            },
            (true, false) => Self::column(phi, g3, g5, x, grid)?,
            (false, true) => Self::rows_1d(phi, g3, g4, x >= 0.0, grid)?,
            (false, false) => Self::rows_2d(phi, g3, g4, g5, x, grid)?,
        };
        Ok(Self { kind })
    }

    fn lam1_nodes(grid: &FourierGrid) -> Vec<Complex64> {
        (0..=grid.n1).map(|j| Complex64::new(j as f64 * grid.eta1, grid.lam1_im)).collect()
    }

    fn check_truncation(mass: f64) -> Result<()> {
        if mass > TRUNCATION_TOL || !mass.is_finite() {
            return Err(Error::GridTooCoarse(format!(
                "integrand mass {mass:.3e} on the truncation boundary exceeds {TRUNCATION_TOL:e}"
            )));
        }
        Ok(())
    }

    fn rows_2d(phi: &CharFn, g3: [f64; 2], g4: [f64; 2], g5: [f64; 2], x: f64, grid: &FourierGrid) -> Result<Kind> {
        let lam1 = Self::lam1_nodes(grid);
        let n = grid.n as i64;
        let lams: Vec<Complex64> = (-n..=n).map(|k| Complex64::new(k as f64 * grid.eta, grid.lam_im)).collect();
        // e^{−iλx} / λ, shared by every row.
        let phases: Vec<Complex64> = lams.iter().map(|&l| (-I * l * x).exp() / l).collect();
        let log_phases: Vec<f64> = phases.iter().map(|p| p.norm().ln()).collect();
        let scale = grid.eta1 * grid.eta / (4.0 * PI * PI);
        let last_k = lams.len() - 1;

        let rows = par::map_indexed(lam1.len(), |j| {
            let l1 = lam1[j];
            let inv_l1 = -1.0 / l1;
            let log_inv_l1 = inv_l1.norm().ln();
            let weight = if j == 0 { scale } else { 2.0 * scale };
            let (mut a0, mut a1) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            let mut edge = 0.0;
            for (k, &l) in lams.iter().enumerate() {
                let w = phases[k] * inv_l1;
                let lw = log_phases[k] + log_inv_l1;
                let z = combine(l1, g4, l, g5);
                let t0 = screened(phi, z, lw, w);
                let t1 = screened(phi, shift(z, g3), lw, w);
                a0 += t0;
                a1 += t1;
                if k == 0 || k == last_k || j == grid.n1 {
                    edge += t0.norm() + t1.norm();
                }
            }
            (a0 * weight, a1 * weight, edge * weight)
        });
        Self::check_truncation(rows.iter().map(|r| r.2).sum())?;
        Ok(Kind::Rows {
            lam1,
            r0: rows.iter().map(|r| r.0).collect(),
            r1: rows.iter().map(|r| r.1).collect(),
            gate: true,
        })
    }

    fn rows_1d(phi: &CharFn, g3: [f64; 2], g4: [f64; 2], gate: bool, grid: &FourierGrid) -> Result<Kind> {
        let lam1 = Self::lam1_nodes(grid);
        let scale = grid.eta1 / (2.0 * PI);
        let zero = Complex64::new(0.0, 0.0);
        let rows = par::map_indexed(lam1.len(), |j| {
            let l1 = lam1[j];
            let w = I / l1 * if j == 0 { scale } else { 2.0 * scale };
            let lw = w.norm().ln();
            let z = combine(l1, g4, zero, [0.0, 0.0]);
            (screened(phi, z, lw, w), screened(phi, shift(z, g3), lw, w))
        });
        let last = rows[rows.len() - 1];
        Self::check_truncation(last.0.norm() + last.1.norm())?;
        Ok(Kind::Rows {
            lam1,
            r0: rows.iter().map(|r| r.0).collect(),
            r1: rows.iter().map(|r| r.1).collect(),
            gate,
        })
    }

    fn column(phi: &CharFn, g3: [f64; 2], g5: [f64; 2], x: f64, grid: &FourierGrid) -> Result<Kind> {
        let scale = grid.eta / (2.0 * PI);
        let zero = Complex64::new(0.0, 0.0);
        let terms = par::map_indexed(grid.n + 1, |k| {
            let l = Complex64::new(k as f64 * grid.eta, grid.lam_im);
            let w = (-I * l * x).exp() * I / l * if k == 0 { scale } else { 2.0 * scale };
            let lw = w.norm().ln();
            let z = combine(zero, [0.0, 0.0], l, g5);
            (screened(phi, z, lw, w), screened(phi, shift(z, g3), lw, w))
        });
        let last = terms[terms.len() - 1];
        Self::check_truncation(last.0.norm() + last.1.norm())?;
        Ok(Kind::Column {
            s0: terms.iter().map(|t| t.0.re).sum(),
            s1: terms.iter().map(|t| t.1.re).sum(),
        })
    }

    /// `G(x1, ·)` for the slice's fixed `x`.
    pub fn value(&self, g1: f64, g2: f64, x1: f64) -> f64 {
        match &self.kind {
            Kind::Rows { lam1, r0, r1, gate } => {
                if !gate {
                    return 0.0;
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..lam1.len() {
                    acc += (-I * lam1[j] * x1).exp() * (g1 * r0[j] + g2 * r1[j]);
                }
                acc.re
            }
            Kind::Column { s0, s1 } => {
                if x1 >= 0.0 {
                    g1 * s0 + g2 * s1
                } else {
                    0.0
                }
            }
            Kind::Point { e3, gate } => {
                if *gate && x1 >= 0.0 {
                    g1 + g2 * e3
                } else {
                    0.0
                }
            }
        }
    }

    /// `∂G/∂x1` for the slice's fixed `x` (zero away from indicator jumps).
    pub fn dx1(&self, g1: f64, g2: f64, x1: f64) -> f64 {
        match &self.kind {
            Kind::Rows { lam1, r0, r1, gate } => {
                if !gate {
                    return 0.0;
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..lam1.len() {
                    acc += -I * lam1[j] * (-I * lam1[j] * x1).exp() * (g1 * r0[j] + g2 * r1[j]);
                }
                acc.re
            }
            Kind::Column { .. } | Kind::Point { .. } => 0.0,
        }
    }
}
