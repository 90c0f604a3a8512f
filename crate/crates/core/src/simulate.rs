//! Path and endpoint simulation of the correlated pair `(B, W)`.
//!
//! Two schemes are provided. The common-decomposition scheme samples the
//! clock `T` first and then independent Brownian motions `X`, `Y` at the
//! clock readings, so `B = X_T + Y_S`, `W = X_T − Y_S` hold exactly. The
//! Euler scheme freezes the local correlation at the left end of each cell.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::ctmc::{sample_chain_path, GridChainSampler, RegimeConfig};
use crate::error::{Error, Result};
use crate::par;
use crate::rng::substream;

/// Strictly increasing time points starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("time grid needs at least two points"));
        }
        if points[0] != 0.0 {
            return Err(Error::invalid("time grid must start at 0"));
        }
        if points.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::invalid("time grid must be strictly increasing and finite"));
        }
        Ok(Self { points })
    }

    /// `cells` equal steps over `[0, horizon]`.
    pub fn uniform(horizon: f64, cells: usize) -> Result<Self> {
        if !(horizon > 0.0) || cells == 0 {
            return Err(Error::invalid("uniform grid needs a positive horizon and at least one cell"));
        }
        let dt = horizon / cells as f64;
        let mut points: Vec<f64> = (0..=cells).map(|k| k as f64 * dt).collect();
        points[cells] = horizon;
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn horizon(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn cells(&self) -> usize {
        self.points.len() - 1
    }

    pub fn steps(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Random variates consumed, split by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DrawCount {
    pub normals: u64,
    pub chain_uniforms: u64,
}

impl DrawCount {
    pub fn total(&self) -> u64 {
        self.normals + self.chain_uniforms
    }
}

impl std::ops::Add for DrawCount {
    type Output = DrawCount;
    fn add(self, o: DrawCount) -> DrawCount {
        DrawCount {
            normals: self.normals + o.normals,
            chain_uniforms: self.chain_uniforms + o.chain_uniforms,
        }
    }
}

/// A discretized trajectory. `x` and `y` hold `X_T` and `Y_S` at the grid
/// points for the common-decomposition scheme and are empty for Euler paths.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBundle {
    pub grid: TimeGrid,
    pub b: Vec<f64>,
    pub w: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t_clock: Vec<f64>,
    pub s_clock: Vec<f64>,
    /// Local (cell-average for the exact scheme) correlation, one per cell.
    pub rho: Vec<f64>,
    /// Chain state at each grid point.
    pub states: Vec<usize>,
    pub rng_draws: DrawCount,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointSample {
    pub b_t: f64,
    pub w_t: f64,
    pub t_clock: f64,
    pub rng_draws: DrawCount,
}

/// How the chain is sampled when only the clock at the horizon is needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainSampling {
    /// Event-driven sampling; `T_t` is exact.
    Exact,
    /// One uniform per cell of a uniform grid; `T_t` uses left-endpoint states.
    Grid { steps: usize },
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Common-decomposition path with the clock integrated exactly over the
/// sampled chain.
pub fn simulate_cd_path<R: Rng + ?Sized>(cfg: &RegimeConfig, grid: &TimeGrid, rng: &mut R) -> Result<PathBundle> {
    let chain = sample_chain_path(cfg, grid.horizon(), rng)?;
    let pts = grid.points();
    let n = grid.cells();
    let t_clock = chain.clock_at(cfg.alpha(), pts);
    let s_clock: Vec<f64> = pts.iter().zip(&t_clock).map(|(t, c)| t - c).collect();
    let states = pts.iter().map(|&t| chain.state_at(t)).collect();

    let mut x = Vec::with_capacity(n + 1);
    let mut y = Vec::with_capacity(n + 1);
    let mut rho = Vec::with_capacity(n);
    x.push(0.0);
    y.push(0.0);
    for k in 0..n {
        let dt = pts[k + 1] - pts[k];
        let d_t = (t_clock[k + 1] - t_clock[k]).max(0.0);
        let d_s = (s_clock[k + 1] - s_clock[k]).max(0.0);
        x.push(x[k] + d_t.sqrt() * normal(rng));
        y.push(y[k] + d_s.sqrt() * normal(rng));
        rho.push(((d_t - d_s) / dt).clamp(-1.0, 1.0));
    }
    let b = x.iter().zip(&y).map(|(a, c)| a + c).collect();
    let w = x.iter().zip(&y).map(|(a, c)| a - c).collect();
    Ok(PathBundle {
        grid: grid.clone(),
        b,
        w,
        x,
        y,
        t_clock,
        s_clock,
        rho,
        states,
        rng_draws: DrawCount {
            normals: 2 * n as u64,
            chain_uniforms: chain.draws,
        },
    })
}

/// Euler–Maruyama simulator with a precomputed grid chain sampler.
#[derive(Debug, Clone)]
pub struct EulerScheme {
    grid: TimeGrid,
    steps: Vec<f64>,
    sampler: GridChainSampler,
    alpha: Vec<f64>,
}

impl EulerScheme {
    pub fn new(cfg: &RegimeConfig, grid: &TimeGrid) -> Result<Self> {
        let steps = grid.steps();
        Ok(Self {
            sampler: GridChainSampler::new(cfg, &steps)?,
            grid: grid.clone(),
            steps,
            alpha: cfg.alpha().to_vec(),
        })
    }

    pub fn path<R: Rng + ?Sized>(&self, rng: &mut R) -> PathBundle {
        let n = self.grid.cells();
        let mut states = Vec::with_capacity(n + 1);
        self.sampler.walk(rng, |_, s| states.push(s));
        let mut b = vec![0.0; n + 1];
        let mut w = vec![0.0; n + 1];
        let mut t_clock = vec![0.0; n + 1];
        let mut rho = Vec::with_capacity(n);
        for k in 0..n {
            let dt = self.steps[k];
            let r = 2.0 * self.alpha[states[k]] - 1.0;
            let db = dt.sqrt() * normal(rng);
            let dz = dt.sqrt() * normal(rng);
            b[k + 1] = b[k] + db;
            w[k + 1] = w[k] + r * db + (1.0 - r * r).sqrt() * dz;
            t_clock[k + 1] = t_clock[k] + 0.5 * (1.0 + r) * dt;
            rho.push(r);
        }
        // The last grid point carries the state the chain would move to next.
        states.push(*states.last().unwrap());
        let s_clock = self.grid.points().iter().zip(&t_clock).map(|(t, c)| t - c).collect();
        PathBundle {
            grid: self.grid.clone(),
            b,
            w,
            x: Vec::new(),
            y: Vec::new(),
            t_clock,
            s_clock,
            rho,
            states,
            rng_draws: DrawCount {
                normals: 2 * n as u64,
                chain_uniforms: n as u64,
            },
        }
    }

    /// Terminal values only; same draws as [`EulerScheme::path`].
    pub fn endpoint<R: Rng + ?Sized>(&self, rng: &mut R) -> EndpointSample {
        let n = self.grid.cells();
        let mut rs = Vec::with_capacity(n);
        let alpha = &self.alpha;
        self.sampler.walk(rng, |_, s| rs.push(2.0 * alpha[s] - 1.0));
        let (mut b, mut w, mut clock) = (0.0, 0.0, 0.0);
        for (r, dt) in rs.iter().zip(&self.steps) {
            let db = dt.sqrt() * normal(rng);
            let dz = dt.sqrt() * normal(rng);
            b += db;
            w += r * db + (1.0 - r * r).sqrt() * dz;
            clock += 0.5 * (1.0 + r) * dt;
        }
        EndpointSample {
            b_t: b,
            w_t: w,
            t_clock: clock,
            rng_draws: DrawCount {
                normals: 2 * n as u64,
                chain_uniforms: n as u64,
            },
        }
    }
}

pub fn simulate_euler_path<R: Rng + ?Sized>(cfg: &RegimeConfig, grid: &TimeGrid, rng: &mut R) -> Result<PathBundle> {
    Ok(EulerScheme::new(cfg, grid)?.path(rng))
}

/// Common-decomposition endpoint sampler: the clock, then two normals.
#[derive(Debug, Clone)]
pub struct CdEndpoint {
    cfg: RegimeConfig,
    t: f64,
    grid: Option<(GridChainSampler, f64)>,
}

impl CdEndpoint {
    pub fn new(cfg: &RegimeConfig, t: f64, sampling: ChainSampling) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::invalid(format!("endpoint time {t} must be positive")));
        }
        let grid = match sampling {
            ChainSampling::Exact => None,
            ChainSampling::Grid { steps } => {
                if steps == 0 {
                    return Err(Error::invalid("grid chain sampling needs at least one step"));
                }
                let dt = t / steps as f64;
                Some((GridChainSampler::new(cfg, &vec![dt; steps])?, dt))
            }
        };
        Ok(Self {
            cfg: cfg.clone(),
            t,
            grid,
        })
    }

    /// Samples the clock `T_t` and the number of chain uniforms it used.
    pub fn clock<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, u64) {
        let alpha = self.cfg.alpha();
        match &self.grid {
            None => {
                // Horizon is validated positive in `new`.
                let path = sample_chain_path(&self.cfg, self.t, rng).expect("positive horizon");
                let clock = path.clock_at(alpha, &[self.t])[0];
                (clock, path.draws)
            }
            Some((sampler, dt)) => {
                let mut clock = 0.0;
                sampler.walk(rng, |_, s| clock += alpha[s] * dt);
                (clock.min(self.t), sampler.cells() as u64)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EndpointSample {
        let (clock, chain_uniforms) = self.clock(rng);
        let x = clock.sqrt() * normal(rng);
        let y = (self.t - clock).max(0.0).sqrt() * normal(rng);
        EndpointSample {
            b_t: x + y,
            w_t: x - y,
            t_clock: clock,
            rng_draws: DrawCount {
                normals: 2,
                chain_uniforms,
            },
        }
    }
}

pub fn simulate_cd_endpoint<R: Rng + ?Sized>(
    cfg: &RegimeConfig,
    t: f64,
    sampling: ChainSampling,
    rng: &mut R,
) -> Result<EndpointSample> {
    Ok(CdEndpoint::new(cfg, t, sampling)?.sample(rng))
}

/// `reps` independent common-decomposition endpoints; path `i` uses substream `i`.
pub fn cd_endpoints(cfg: &RegimeConfig, t: f64, sampling: ChainSampling, reps: usize, seed: u64) -> Result<Vec<EndpointSample>> {
    let sim = CdEndpoint::new(cfg, t, sampling)?;
    Ok(par::map_indexed(reps, |i| sim.sample(&mut substream(seed, i as u64))))
}

/// `reps` independent Euler endpoints on `grid`; path `i` uses substream `i`.
pub fn euler_endpoints(cfg: &RegimeConfig, grid: &TimeGrid, reps: usize, seed: u64) -> Result<Vec<EndpointSample>> {
    let sim = EulerScheme::new(cfg, grid)?;
    Ok(par::map_indexed(reps, |i| sim.endpoint(&mut substream(seed, i as u64))))
}

/// `ρ̂ = Σ ΔB ΔW / t` over the whole path.
pub fn estimate_rho_hat(path: &PathBundle) -> Result<f64> {
    let horizon = path.grid.horizon();
    if path.b.len() < 2 || !(horizon > 0.0) {
        return Err(Error::invalid("rho estimate needs at least one cell"));
    }
    let cov: f64 = path
        .b
        .windows(2)
        .zip(path.w.windows(2))
        .map(|(b, w)| (b[1] - b[0]) * (w[1] - w[0]))
        .sum();
    Ok(cov / horizon)
}

fn clock_at(path: &PathBundle, t: f64) -> Result<f64> {
    let pts = path.grid.points();
    if !(t >= 0.0 && t <= path.grid.horizon()) {
        return Err(Error::invalid(format!("time {t} outside the path grid")));
    }
    let k = pts.partition_point(|&p| p < t);
    if pts[k] == t {
        return Ok(path.t_clock[k]);
    }
    let (t0, t1) = (pts[k - 1], pts[k]);
    let f = (t - t0) / (t1 - t0);
    Ok(path.t_clock[k - 1] + f * (path.t_clock[k] - path.t_clock[k - 1]))
}

/// `σ₁σ₂(2T_t − t)`; the clock is linearly interpolated between grid points.
pub fn realized_covariance(sigma1: f64, sigma2: f64, path: &PathBundle, t: f64) -> Result<f64> {
    Ok(sigma1 * sigma2 * (2.0 * clock_at(path, t)? - t))
}

/// `ρ̄_t = (T_t − S_t)/t`.
pub fn average_rho(path: &PathBundle, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("average correlation needs t > 0"));
    }
    Ok(((2.0 * clock_at(path, t)? - t) / t).clamp(-1.0, 1.0))
}
