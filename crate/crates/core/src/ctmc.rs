//! Finite-state continuous-time Markov chains driving the correlation regime.
//!
//! Conventions: the generator is row-oriented (`a_ij` is the rate of jumping
//! from `i` to `j`, rows sum to zero), distributions are row vectors, and
//! `E[Q_t] = P(t)ᵀ q0`. Under these conventions the clock
//! `T_t = ∫ αᵀ Q_s ds` has Laplace transform `q0ᵀ exp((A + z·diag α) t) 𝟏`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Matrix};
use crate::numeric::adaptive_simpson;

const STOCHASTIC_TOL: f64 = 1e-12;

/// Transition-rate matrix of a finite chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    rates: Matrix,
}

impl Generator {
    pub fn new<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let rates = Matrix::from_rows(rows)?;
        let n = rates.n();
        if n == 0 {
            return Err(Error::invalid("generator needs at least one state"));
        }
        for i in 0..n {
            let row = rates.row(i);
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("generator row {i} is not finite")));
            }
            for (j, &v) in row.iter().enumerate() {
                if i != j && v < 0.0 {
                    return Err(Error::invalid(format!(
                        "negative off-diagonal rate a[{i}][{j}] = {v}"
                    )));
                }
            }
            let sum: f64 = row.iter().sum();
            let scale: f64 = 1.0 + row.iter().map(|v| v.abs()).sum::<f64>();
            if sum.abs() > STOCHASTIC_TOL * scale {
                return Err(Error::invalid(format!("generator row {i} sums to {sum}, not 0")));
            }
        }
        Ok(Self { rates })
    }

    /// The zero generator on `n` states: nothing ever moves.
    pub fn zero(n: usize) -> Self {
        Self {
            rates: Matrix::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.rates.n()
    }

    pub fn rate(&self, i: usize, j: usize) -> f64 {
        self.rates.get(i, j)
    }

    /// Total jump intensity out of state `i`.
    pub fn exit_rate(&self, i: usize) -> f64 {
        -self.rates.get(i, i)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.rates
    }

    /// Checks strong connectivity of the graph of positive rates.
    pub fn check_irreducible(&self) -> Result<()> {
        let n = self.n();
        let forward = reachable(n, |i, j| self.rate(i, j) > 0.0);
        if let Some(to) = forward.iter().position(|&r| !r) {
            return Err(Error::Reducible { from: 0, to });
        }
        let backward = reachable(n, |i, j| self.rate(j, i) > 0.0);
        if let Some(from) = backward.iter().position(|&r| !r) {
            return Err(Error::Reducible { from, to: 0 });
        }
        Ok(())
    }
}

fn reachable(n: usize, edge: impl Fn(usize, usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if i != j && !seen[j] && edge(i, j) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

/// Regime-switching correlation model: chain generator, initial law and the
/// per-state clock speeds `α` (local correlation `2α_i − 1` in state `i`).
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeConfig {
    generator: Generator,
    q0: Vec<f64>,
    alpha: Vec<f64>,
}

impl RegimeConfig {
    pub fn new(generator: Generator, q0: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        let n = generator.n();
        if q0.len() != n || alpha.len() != n {
            return Err(Error::invalid(format!(
                "dimension mismatch: generator has {n} states, q0 {} and alpha {}",
                q0.len(),
                alpha.len()
            )));
        }
        if q0.iter().any(|&q| !(q >= 0.0)) {
            return Err(Error::invalid("q0 entries must be nonnegative"));
        }
        let total: f64 = q0.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::invalid(format!("q0 sums to {total}, not 1")));
        }
        if let Some(a) = alpha.iter().find(|&&a| !(a > 0.0 && a < 1.0)) {
            return Err(Error::invalid(format!("alpha entry {a} is not in (0, 1)")));
        }
        Ok(Self { generator, q0, alpha })
    }

    /// Single-state model with constant local correlation `rho`.
    pub fn constant(rho: f64) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::invalid(format!("constant correlation {rho} not in (-1, 1)")));
        }
        Self::new(Generator::zero(1), vec![1.0], vec![0.5 * (1.0 + rho)])
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn q0(&self) -> &[f64] {
        &self.q0
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn n(&self) -> usize {
        self.generator.n()
    }

    pub fn with_alpha(&self, alpha: Vec<f64>) -> Result<Self> {
        Self::new(self.generator.clone(), self.q0.clone(), alpha)
    }

    pub fn with_q0(&self, q0: Vec<f64>) -> Result<Self> {
        Self::new(self.generator.clone(), q0, self.alpha.clone())
    }

    pub fn alpha_range(&self) -> (f64, f64) {
        self.alpha
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| (lo.min(a), hi.max(a)))
    }

    /// Whether the clock speed is the same in every state (constant correlation).
    pub fn is_constant(&self) -> bool {
        let (lo, hi) = self.alpha_range();
        lo == hi
    }
}

/// `P(t) = exp(A t)`, with round-off negatives clamped to zero.
pub fn transition_matrix(g: &Generator, t: f64) -> Result<Matrix> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("transition time {t} must be nonnegative")));
    }
    let mut p = linalg::expm(&g.matrix().scaled(t).to_complex())?.real();
    let n = p.n();
    for i in 0..n {
        for j in 0..n {
            let v = p.get(i, j);
            if v < 0.0 && v > -1e-12 {
                p.set(i, j, 0.0);
            }
        }
    }
    Ok(p)
}

/// Stationary law `π` with `Aᵀπ = 0`, `Σπ = 1`, for an irreducible chain.
pub fn stationary_distribution(g: &Generator) -> Result<Vec<f64>> {
    g.check_irreducible()?;
    let n = g.n();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let lhs = CMatrix::from_fn(n, |i, j| {
        if i == n - 1 {
            one
        } else {
            Complex64::new(g.rate(j, i), 0.0)
        }
    });
    let rhs = CMatrix::from_fn(n, |i, j| if i == n - 1 && j == 0 { one } else { zero });
    let sol = linalg::solve(&lhs, &rhs)?;
    let mut pi: Vec<f64> = (0..n).map(|i| sol.get(i, 0).re.max(0.0)).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    Ok(pi)
}

/// Laplace transform `z ↦ E[exp(z T_t)]` of the clock at a fixed horizon.
#[derive(Debug, Clone)]
pub struct LaplaceTransform {
    scaled_generator: CMatrix,
    scaled_alpha: Vec<f64>,
    q0: Vec<f64>,
    clock_bounds: (f64, f64),
}

impl LaplaceTransform {
    pub fn new(cfg: &RegimeConfig, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::invalid(format!("horizon {t} must be nonnegative")));
        }
        let (lo, hi) = cfg.alpha_range();
        Ok(Self {
            scaled_generator: cfg.generator().matrix().scaled(t).to_complex(),
            scaled_alpha: cfg.alpha().iter().map(|a| a * t).collect(),
            q0: cfg.q0().to_vec(),
            clock_bounds: (lo * t, hi * t),
        })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_shifted(z, 0.0)
    }

    /// `e^{−shift} E[exp(z T_t)]`, formed without evaluating the unshifted
    /// transform so that large `Re z` cannot overflow.
    pub fn eval_shifted(&self, z: Complex64, shift: f64) -> Complex64 {
        match self.q0.len() {
            1 => return (z * self.scaled_alpha[0] - shift).exp(),
            2 => return self.eval_fixed::<2>(z, shift),
            3 => return self.eval_fixed::<3>(z, shift),
            4 => return self.eval_fixed::<4>(z, shift),
            _ => {}
        }
        let mut m = self.scaled_generator.clone();
        for (i, a) in self.scaled_alpha.iter().enumerate() {
            m.set(i, i, m.get(i, i) + z * *a - shift);
        }
        // Entries are finite by construction, so expm cannot fail here.
        let e = linalg::expm(&m).expect("finite matrix");
        e.bilinear_ones(&self.q0)
    }

    fn eval_fixed<const N: usize>(&self, z: Complex64, shift: f64) -> Complex64 {
        let mut m = [[Complex64::new(0.0, 0.0); N]; N];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.scaled_generator.get(i, j);
            }
            row[i] += z * self.scaled_alpha[i] - shift;
        }
        let e = linalg::expm_fixed(&m).expect("finite matrix");
        e.iter().zip(&self.q0).filter(|(_, &q)| q != 0.0).map(|(row, &q)| row.iter().sum::<Complex64>() * q).sum()
    }

    /// Upper bound on `|E[exp(z T_t)]|` from `T_t ∈ [t·min α, t·max α]`.
    pub fn magnitude_bound(&self, z: Complex64) -> f64 {
        self.log_magnitude_bound(z).exp()
    }

    pub fn log_magnitude_bound(&self, z: Complex64) -> f64 {
        let (lo, hi) = self.clock_bounds;
        (z.re * lo).max(z.re * hi)
    }
}

/// `E[exp(z T_t)]` for the regime model.
pub fn laplace_t(cfg: &RegimeConfig, t: f64, z: Complex64) -> Result<Complex64> {
    Ok(LaplaceTransform::new(cfg, t)?.eval(z))
}

/// `E[T_t] = ∫₀ᵗ αᵀ E[Q_s] ds`.
pub fn expected_clock(cfg: &RegimeConfig, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("horizon {t} must be nonnegative")));
    }
    if cfg.is_constant() {
        return Ok(cfg.alpha()[0] * t);
    }
    let g = cfg.generator();
    let mut failure = None;
    let integral = adaptive_simpson(
        |s| match transition_matrix(g, s) {
            Ok(p) => {
                let dist = p.left_mul(cfg.q0());
                dist.iter().zip(cfg.alpha()).map(|(q, a)| q * a).sum()
            }
            Err(e) => {
                failure = Some(e);
                0.0
            }
        },
        0.0,
        t,
        1e-10,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(integral),
    }
}

/// `E[ρ̄_τ] = (1/τ) ∫₀^τ (2αᵀE[Q_s] − 1) ds`.
pub fn expected_rho_bar(cfg: &RegimeConfig, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::invalid(format!("averaging horizon {tau} must be positive")));
    }
    Ok(2.0 * expected_clock(cfg, tau)? / tau - 1.0)
}

/// A sampled piecewise-constant chain trajectory on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPath {
    pub jump_times: Vec<f64>,
    pub states: Vec<usize>,
    pub horizon: f64,
    /// Uniform-equivalent random variates consumed to build the path.
    pub draws: u64,
}

impl ChainPath {
    pub fn state_at(&self, t: f64) -> usize {
        let idx = self.jump_times.partition_point(|&s| s <= t);
        self.states[idx]
    }

    /// Fraction of `[0, horizon]` spent in each of `n` states.
    pub fn occupation_fractions(&self, n: usize) -> Vec<f64> {
        let mut occ = vec![0.0; n];
        let mut start = 0.0;
        for (k, &state) in self.states.iter().enumerate() {
            let end = self.jump_times.get(k).copied().unwrap_or(self.horizon);
            occ[state] += end - start;
            start = end;
        }
        occ.iter_mut().for_each(|o| *o /= self.horizon);
        occ
    }

    /// `T_t = ∫₀ᵗ α_{Q_s} ds` evaluated at each (nondecreasing) time in `times`.
    pub fn clock_at(&self, alpha: &[f64], times: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(times.len());
        let mut seg = 0usize;
        let mut seg_start = 0.0;
        let mut clock_at_seg_start = 0.0;
        for &t in times {
            while seg < self.jump_times.len() && self.jump_times[seg] <= t {
                let end = self.jump_times[seg];
                clock_at_seg_start += alpha[self.states[seg]] * (end - seg_start);
                seg_start = end;
                seg += 1;
            }
            out.push(clock_at_seg_start + alpha[self.states[seg]] * (t - seg_start));
        }
        out
    }
}

fn sample_categorical<R: Rng + ?Sized>(rng: &mut R, weights: impl Iterator<Item = f64>) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// Exact event-driven sampling: exponential holding times with rate `−a_ii`,
/// destinations with probabilities `a_ij / (−a_ii)`.
pub fn sample_chain_path<R: Rng + ?Sized>(cfg: &RegimeConfig, horizon: f64, rng: &mut R) -> Result<ChainPath> {
    if !(horizon > 0.0) {
        return Err(Error::invalid(format!("horizon {horizon} must be positive")));
    }
    let g = cfg.generator();
    let n = g.n();
    let mut state = sample_categorical(rng, cfg.q0().iter().copied());
    let mut draws = 1;
    let mut t = 0.0;
    let mut jump_times = Vec::new();
    let mut states = vec![state];
    loop {
        let rate = g.exit_rate(state);
        if rate <= 0.0 {
            break;
        }
        let hold: f64 = rng.sample(Exp1);
        draws += 1;
        t += hold / rate;
        if t >= horizon {
            break;
        }
        state = sample_categorical(rng, (0..n).map(|j| if j == state { 0.0 } else { g.rate(state, j) / rate }));
        draws += 1;
        jump_times.push(t);
        states.push(state);
    }
    Ok(ChainPath {
        jump_times,
        states,
        horizon,
        draws,
    })
}

/// Samples the chain only at the left endpoints of a time grid, one uniform
/// per grid cell, using the exact transition matrices `P(Δt_k)`.
#[derive(Debug, Clone)]
pub struct GridChainSampler {
    q0_cdf: Vec<f64>,
    /// Per cell, the cumulative rows of `P(Δt_k)` flattened row-major.
    cell_cdfs: Vec<std::sync::Arc<Vec<f64>>>,
    n: usize,
}

impl GridChainSampler {
    pub fn new(cfg: &RegimeConfig, steps: &[f64]) -> Result<Self> {
        let n = cfg.n();
        let mut cache: Vec<(u64, std::sync::Arc<Vec<f64>>)> = Vec::new();
        let mut cell_cdfs = Vec::with_capacity(steps.len());
        for &dt in steps {
            let key = dt.to_bits();
            if let Some((_, cdf)) = cache.iter().find(|(k, _)| *k == key) {
                cell_cdfs.push(cdf.clone());
                continue;
            }
            let p = transition_matrix(cfg.generator(), dt)?;
            let mut cdf = Vec::with_capacity(n * n);
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += p.get(i, j);
                    cdf.push(acc);
                }
            }
            let cdf = std::sync::Arc::new(cdf);
            cache.push((key, cdf.clone()));
            cell_cdfs.push(cdf);
        }
        let mut acc = 0.0;
        let q0_cdf = cfg
            .q0()
            .iter()
            .map(|q| {
                acc += q;
                acc
            })
            .collect();
        Ok(Self { q0_cdf, cell_cdfs, n })
    }

    pub fn cells(&self) -> usize {
        self.cell_cdfs.len()
    }

    fn pick(cdf: &[f64], u: f64) -> usize {
        let total = *cdf.last().unwrap();
        cdf.iter().position(|&c| u * total < c).unwrap_or(cdf.len() - 1)
    }

    /// Calls `visit(k, state)` with the state at the left end of each cell;
    /// consumes exactly one uniform per cell.
    pub fn walk<R: Rng + ?Sized>(&self, rng: &mut R, mut visit: impl FnMut(usize, usize)) {
        if self.cell_cdfs.is_empty() {
            return;
        }
        let mut state = Self::pick(&self.q0_cdf, rng.random());
        visit(0, state);
        for k in 1..self.cell_cdfs.len() {
            let cdf = &self.cell_cdfs[k - 1][state * self.n..(state + 1) * self.n];
            state = Self::pick(cdf, rng.random());
            visit(k, state);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    pub(crate) fn reference_generator() -> Generator {
        Generator::new(&[[-1.0, 0.8, 0.2], [0.4, -1.0, 0.6], [0.3, 0.7, -1.0]]).unwrap()
    }

    fn two_state() -> Generator {
        Generator::new(&[[-1.0, 1.0], [1.0, -1.0]]).unwrap()
    }

    /// Truncated power series for exp(At); oracle only.
    fn series(a: &Matrix, t: f64, terms: usize) -> Matrix {
        let n = a.n();
        let at = a.scaled(t);
        let mut sum = Matrix::identity(n);
        let mut term = Matrix::identity(n);
        for k in 1..terms {
            term = term.matmul(&at).scaled(1.0 / k as f64);
            for i in 0..n {
                for j in 0..n {
                    sum.set(i, j, sum.get(i, j) + term.get(i, j));
                }
            }
        }
        sum
    }

    #[test]
    fn generator_validation() {
        assert!(Generator::new(&[[-1.0, 1.0], [1.0, -0.5]]).is_err());
        assert!(Generator::new(&[[1.0, -1.0], [1.0, -1.0]]).is_err());
        assert!(Generator::new(&[vec![-1.0, 1.0, 0.0], vec![1.0, -1.0]]).is_err());
        let empty: [[f64; 0]; 0] = [];
        assert!(Generator::new(&empty).is_err());
    }

    #[test]
    fn config_validation() {
        let g = reference_generator();
        assert!(RegimeConfig::new(g.clone(), vec![1.0, 0.0], vec![0.3, 0.6, 0.9]).is_err());
        assert!(RegimeConfig::new(g.clone(), vec![0.5, 0.6, -0.1], vec![0.3, 0.6, 0.9]).is_err());
        assert!(RegimeConfig::new(g.clone(), vec![1.0, 0.0, 0.0], vec![0.0, 0.6, 0.9]).is_err());
        assert!(RegimeConfig::new(g, vec![0.2, 0.0, 0.8], vec![0.3, 0.6, 0.95]).is_ok());
        assert!(RegimeConfig::constant(1.0).is_err());
    }

    #[test]
    fn transition_at_zero_is_identity() {
        let p = transition_matrix(&reference_generator(), 0.0).unwrap();
        assert_eq!(p, Matrix::identity(3));
        assert!(transition_matrix(&reference_generator(), -0.1).is_err());
    }

    #[test]
    fn transition_two_state_closed_form() {
        for t in [0.05, 0.5, 2.0] {
            let p = transition_matrix(&two_state(), t).unwrap();
            let e = (-2.0 * t).exp();
            assert!((p.get(0, 0) - 0.5 * (1.0 + e)).abs() < 1e-14);
            assert!((p.get(0, 1) - 0.5 * (1.0 - e)).abs() < 1e-14);
        }
    }

    #[test]
    fn transition_matches_series_and_preserves_pi() {
        let g = reference_generator();
        let p = transition_matrix(&g, 1.0).unwrap();
        let s = series(g.matrix(), 1.0, 200);
        assert!(p.max_abs_diff(&s) < 1e-13);
        for i in 0..3 {
            assert!((p.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
        let pi = stationary_distribution(&g).unwrap();
        let moved = p.left_mul(&pi);
        for (a, b) in moved.iter().zip(&pi) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn stationary_reference_generator() {
        let pi = stationary_distribution(&reference_generator()).unwrap();
        let want = [0.2636, 0.4273, 0.3091];
        for (p, w) in pi.iter().zip(want) {
            assert!((p - w).abs() < 5e-5, "{pi:?}");
        }
        let sym = stationary_distribution(&two_state()).unwrap();
        assert!((sym[0] - 0.5).abs() < 1e-15 && (sym[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn stationary_rejects_reducible() {
        let g = Generator::new(&[[-1.0, 1.0, 0.0], [0.0, -1.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(stationary_distribution(&g), Err(Error::Reducible { .. })));
        let split = Generator::new(&[[-1.0, 1.0, 0.0], [1.0, -1.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(stationary_distribution(&split), Err(Error::Reducible { .. })));
    }

    #[test]
    fn laplace_trivial_cases() {
        let cfg = RegimeConfig::new(reference_generator(), vec![1.0, 0.0, 0.0], vec![0.3, 0.6, 0.9]).unwrap();
        let one = laplace_t(&cfg, 0.7, Complex64::new(0.0, 0.0)).unwrap();
        assert!((one - 1.0).norm() < 1e-14);
        let flat = cfg.with_alpha(vec![0.4; 3]).unwrap();
        for z in [Complex64::new(-1.3, 0.4), Complex64::new(2.0, -3.0)] {
            let got = laplace_t(&flat, 0.8, z).unwrap();
            let want = (z * 0.4 * 0.8).exp();
            assert!((got - want).norm() < 1e-13 * want.norm());
        }
    }

    #[test]
    fn expected_rho_bar_constant_alpha() {
        let cfg = RegimeConfig::new(reference_generator(), vec![0.2, 0.3, 0.5], vec![0.7; 3]).unwrap();
        assert!((expected_rho_bar(&cfg, 0.5).unwrap() - 0.4).abs() < 1e-12);
        assert!(expected_rho_bar(&cfg, 0.0).is_err());
    }

    #[test]
    fn zero_generator_never_jumps() {
        let cfg = RegimeConfig::new(Generator::zero(2), vec![0.0, 1.0], vec![0.3, 0.6]).unwrap();
        let path = sample_chain_path(&cfg, 5.0, &mut substream(1, 0)).unwrap();
        assert!(path.jump_times.is_empty());
        assert_eq!(path.states, vec![1]);
    }

    #[test]
    fn holding_times_have_exponential_mean() {
        let g = reference_generator();
        let cfg = RegimeConfig::new(g.clone(), vec![0.0, 1.0, 0.0], vec![0.3, 0.6, 0.9]).unwrap();
        let n = 100_000;
        let mut total = 0.0;
        let mut count = 0;
        let mut k = 0u64;
        while count < n {
            // Horizon long enough that the first holding time is almost never censored.
            let p = sample_chain_path(&cfg, 60.0, &mut substream(3, k)).unwrap();
            k += 1;
            if let Some(&t) = p.jump_times.first() {
                total += t;
                count += 1;
            }
        }
        let mean = total / n as f64;
        assert!((mean - 1.0 / g.exit_rate(1)).abs() < 0.01, "{mean}");
    }

    #[test]
    fn occupation_fractions_approach_pi() {
        let cfg = RegimeConfig::new(reference_generator(), vec![1.0, 0.0, 0.0], vec![0.3, 0.6, 0.9]).unwrap();
        let path = sample_chain_path(&cfg, 20_000.0, &mut substream(5, 0)).unwrap();
        let pi = stationary_distribution(cfg.generator()).unwrap();
        for (o, p) in path.occupation_fractions(3).iter().zip(&pi) {
            assert!((o - p).abs() < 0.01, "{o} vs {p}");
        }
    }

    #[test]
    fn clock_integration_matches_brute_force() {
        let cfg = RegimeConfig::new(reference_generator(), vec![1.0, 0.0, 0.0], vec![0.3, 0.6, 0.9]).unwrap();
        let path = sample_chain_path(&cfg, 3.0, &mut substream(9, 0)).unwrap();
        let times: Vec<f64> = (0..=30).map(|k| 0.1 * k as f64).collect();
        let clock = path.clock_at(cfg.alpha(), &times);
        let h = 1e-5;
        for (t, c) in times.iter().zip(&clock) {
            let steps = (t / h).round() as usize;
            let brute: f64 = (0..steps).map(|i| cfg.alpha()[path.state_at((i as f64 + 0.5) * h)] * h).sum();
            assert!((brute - c).abs() < 1e-4);
        }
    }

    #[test]
    fn grid_sampler_draws_one_uniform_per_cell() {
        let cfg = RegimeConfig::new(reference_generator(), vec![1.0, 0.0, 0.0], vec![0.3, 0.6, 0.9]).unwrap();
        let sampler = GridChainSampler::new(&cfg, &[0.01; 100]).unwrap();
        let mut visits = 0;
        sampler.walk(&mut substream(1, 1), |k, s| {
            assert_eq!(k, visits);
            assert!(s < 3);
            visits += 1;
        });
        assert_eq!(visits, 100);
    }

    #[test]
    fn shifted_transform_survives_large_arguments() {
        let cfg = RegimeConfig::new(reference_generator(), vec![0.2, 0.0, 0.8], vec![0.3, 0.6, 0.95]).unwrap();
        let lt = LaplaceTransform::new(&cfg, 0.5).unwrap();
        let z = Complex64::new(3000.0, 40.0);
        assert!(!lt.eval(z).is_finite());
        let shift = lt.log_magnitude_bound(z);
        let v = lt.eval_shifted(z, shift);
        assert!(v.is_finite() && v.norm() <= 1.0 + 1e-12);
        let small = Complex64::new(0.7, -0.3);
        assert!((lt.eval_shifted(small, 2.0) * 2f64.exp() - lt.eval(small)).norm() < 1e-13);
    }
}
