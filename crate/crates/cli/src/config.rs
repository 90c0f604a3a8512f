//! TOML experiment configuration. `paper.cfg` at the workspace root carries
//! every default used in the experiments and is also compiled in as the
//! fallback when `--config` is not given.

use std::path::{Path, PathBuf};

use cobro_core::ctmc::{Generator, RegimeConfig};
use cobro_core::fourier::{FourierGrid, MarketParams, Style};
use serde::Deserialize;

use crate::CliError;

pub const PAPER_CFG: &str = include_str!("../../../paper.cfg");

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: u64,
    pub paths: usize,
    pub output_dir: PathBuf,
    pub market: MarketSection,
    pub regime: RegimeSection,
    #[serde(default)]
    pub fourier: GridSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub calibrate: CalibrateSection,
    pub table4: Option<Table4Section>,
    #[serde(default)]
    pub table5: Table5Section,
    #[serde(default)]
    pub figures: FiguresSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSection {
    pub r: f64,
    pub s0: [f64; 2],
    pub sigma: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeSection {
    pub generator: Vec<Vec<f64>>,
    pub q0: Vec<f64>,
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n1: usize,
    pub n: usize,
    pub eta1: f64,
    pub eta: f64,
    pub lam1_im: f64,
    pub lam_im: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = FourierGrid::default();
        Self {
            n1: g.n1,
            n: g.n,
            eta1: g.eta1,
            eta: g.eta,
            lam1_im: g.lam1_im,
            lam_im: g.lam_im,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub horizon: f64,
    pub cells: usize,
    pub reps: usize,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            horizon: 1.0,
            cells: 100,
            reps: 5000,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrateSection {
    pub maturity: f64,
    pub strikes: Vec<f64>,
}

impl Default for CalibrateSection {
    fn default() -> Self {
        Self {
            maturity: 0.25,
            strikes: (0..7).map(|i| 80.0 + 10.0 * i as f64).collect(),
        }
    }
}

/// The table4 experiment has no canonical initial distribution or option
/// style, so both are required here.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table4Section {
    pub q0: Vec<f64>,
    pub style: String,
    pub strike: f64,
    pub maturity: f64,
    pub alphas: Vec<Vec<f64>>,
    #[serde(default = "default_history_horizon")]
    pub history_horizon: f64,
    #[serde(default = "default_history_dt")]
    pub history_dt: f64,
}

fn default_history_horizon() -> f64 {
    20.0
}

fn default_history_dt() -> f64 {
    0.05
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table5Case {
    pub label: String,
    pub q0: Vec<f64>,
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Table5Section {
    pub maturities: Vec<f64>,
    pub cases: Vec<Table5Case>,
}

impl Default for Table5Section {
    fn default() -> Self {
        Self {
            maturities: vec![0.25, 0.5],
            cases: vec![
                Table5Case {
                    label: "first".into(),
                    q0: vec![1.0, 0.0, 0.0],
                    alpha: vec![0.3, 0.6, 0.9],
                },
                Table5Case {
                    label: "second".into(),
                    q0: vec![0.2, 0.0, 0.8],
                    alpha: vec![0.3, 0.6, 0.95],
                },
            ],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiguresSection {
    pub styles: Vec<String>,
    pub maturity: f64,
    pub strike_min: f64,
    pub strike_max: f64,
    pub strike_step: f64,
}

impl Default for FiguresSection {
    fn default() -> Self {
        Self {
            styles: vec!["put-on-max".into(), "call-on-min".into(), "call-on-max".into()],
            maturity: 0.25,
            strike_min: 80.0,
            strike_max: 140.0,
            strike_step: 2.0,
        }
    }
}

impl FiguresSection {
    pub fn strikes(&self) -> Result<Vec<f64>, CliError> {
        if !(self.strike_step > 0.0 && self.strike_max >= self.strike_min) {
            return Err(CliError::Config("figures strike range is empty".into()));
        }
        let count = ((self.strike_max - self.strike_min) / self.strike_step + 1e-9).floor() as usize;
        Ok((0..=count).map(|i| self.strike_min + self.strike_step * i as f64).collect())
    }
}

/// Validated configuration with core types built.
#[derive(Debug, Clone)]
pub struct Config {
    pub file: FileConfig,
    pub market: MarketParams,
    pub regime: RegimeConfig,
    pub grid: FourierGrid,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: FileConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let m = &file.market;
        let market = MarketParams::new(m.r, m.s0[0], m.s0[1], m.sigma[0], m.sigma[1]).map_err(config_err)?;
        let generator = Generator::new(&file.regime.generator).map_err(config_err)?;
        let regime = RegimeConfig::new(generator, file.regime.q0.clone(), file.regime.alpha.clone()).map_err(config_err)?;
        let f = &file.fourier;
        let grid = FourierGrid {
            n1: f.n1,
            n: f.n,
            eta1: f.eta1,
            eta: f.eta,
            lam1_im: f.lam1_im,
            lam_im: f.lam_im,
        };
        grid.validate().map_err(config_err)?;
        if file.paths < 100 {
            return Err(CliError::Config(format!("paths = {} is below the minimum of 100", file.paths)));
        }
        Ok(Self {
            file,
            market,
            regime,
            grid,
        })
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                Self::parse(&text)
            }
            None => Self::parse(PAPER_CFG),
        }
    }

    pub fn table4(&self) -> Result<&Table4Section, CliError> {
        self.file
            .table4
            .as_ref()
            .ok_or_else(|| CliError::Config("the table4 experiment needs a [table4] section with q0 and style".into()))
    }
}

pub fn parse_style(s: &str) -> Result<Style, CliError> {
    s.parse().map_err(config_err)
}

fn config_err(e: cobro_core::Error) -> CliError {
    CliError::Config(e.to_string())
}
