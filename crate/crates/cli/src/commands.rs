use std::path::{Path, PathBuf};
use std::time::Instant;

use cobro_core::analysis::{calibrate_constant_rho, implied_correlation, relative_error, rho_hat_stationary, QuoteSet, RHO_BOUND};
use cobro_core::ctmc::{expected_rho_bar, RegimeConfig};
use cobro_core::fourier::{RainbowSpec, Style};
use cobro_core::numeric::mean_stderr;
use cobro_core::pricing::{mc_price_rainbow, price_constant_rho, rainbow_price_fourier, PriceResult, RainbowPricer};
use cobro_core::rng::substream;
use cobro_core::simulate::{cd_endpoints, estimate_rho_hat, euler_endpoints, simulate_cd_path, ChainSampling, EndpointSample, TimeGrid};
use cobro_core::Error;

use crate::config::{parse_style, Config};
use crate::output::{chart_from_csv, sig10, write_file, Cell, Table};
use crate::CliError;

/// Settings shared by every subcommand after flag overrides.
pub struct Ctx {
    pub cfg: Config,
    pub seed: u64,
    pub out: PathBuf,
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scheme {
    Cd,
    Euler,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PriceMethod {
    Fourier,
    Mc,
    /// Constant correlation, needs --rho.
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    #[value(name = "table4")]
    Table4,
    #[value(name = "table5")]
    Table5,
    #[value(name = "fig_errors")]
    FigErrors,
    #[value(name = "fig_impcorr")]
    FigImpcorr,
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

pub fn simulate(ctx: &Ctx, scheme: Scheme, reps: Option<usize>) -> Result<(), CliError> {
    let sim = &ctx.cfg.file.simulate;
    let reps = reps.unwrap_or(sim.reps);
    if reps < 100 {
        return Err(CliError::Config(format!("reps = {reps} is below the minimum of 100")));
    }
    let grid = TimeGrid::uniform(sim.horizon, sim.cells)?;
    let regime = &ctx.cfg.regime;
    let schemes: &[Scheme] = match scheme {
        Scheme::Both => &[Scheme::Cd, Scheme::Euler],
        Scheme::Cd => &[Scheme::Cd],
        Scheme::Euler => &[Scheme::Euler],
    };
    let mut header = vec!["scheme", "mean", "stderr", "rng_draws"];
    if ctx.timing {
        header.push("wall_ms");
    }
    let mut table = Table::new(header);
    for &s in schemes {
        let start = Instant::now();
        let (name, samples): (&str, Vec<EndpointSample>) = match s {
            Scheme::Cd => ("cd", cd_endpoints(regime, sim.horizon, ChainSampling::Grid { steps: sim.cells }, reps, ctx.seed)?),
            _ => ("euler", euler_endpoints(regime, &grid, reps, ctx.seed)?),
        };
        let wall = start.elapsed().as_secs_f64() * 1e3;
        let (mean, se) = mean_stderr(&samples.iter().map(|e| e.b_t + e.w_t).collect::<Vec<_>>());
        let draws = samples.iter().map(|e| e.rng_draws.total()).sum::<u64>() as f64 / reps as f64;
        let mut row: Vec<Cell> = vec![name.into(), mean.into(), se.into(), draws.into()];
        if ctx.timing {
            row.push(wall.into());
        }
        table.push(row);
    }
    let tag = match scheme {
        Scheme::Cd => "cd",
        Scheme::Euler => "euler",
        Scheme::Both => "both",
    };
    let csv = table.to_csv()?;
    print!("{csv}");
    announce(&write_file(&ctx.out, &format!("simulate_{tag}_s{}_n{reps}.csv", ctx.seed), &csv)?);
    Ok(())
}

pub fn price(
    ctx: &Ctx,
    style: &str,
    strike: f64,
    maturity: f64,
    method: PriceMethod,
    rho: Option<f64>,
    paths: Option<usize>,
) -> Result<(), CliError> {
    let spec = RainbowSpec::new(parse_style(style)?, strike, maturity).map_err(|e| CliError::Config(e.to_string()))?;
    let (market, grid) = (&ctx.cfg.market, &ctx.cfg.grid);
    let result: PriceResult = match method {
        PriceMethod::Fourier => rainbow_price_fourier(&ctx.cfg.regime, market, &spec, grid)?,
        PriceMethod::Mc => mc_price_rainbow(&ctx.cfg.regime, market, &spec, paths.unwrap_or(ctx.cfg.file.paths), ctx.seed)?,
        PriceMethod::Closed => {
            let rho = rho.ok_or_else(|| CliError::Config("--method closed needs --rho".into()))?;
            price_constant_rho(market, &spec, rho, grid)?
        }
    };
    let mut line = format!(
        "style={} strike={} maturity={} method={} price={}",
        spec.style,
        sig10(strike),
        sig10(maturity),
        result.method,
        sig10(result.value)
    );
    if let Some(se) = result.stderr {
        line.push_str(&format!(" stderr={}", sig10(se)));
    }
    println!("{line}");
    Ok(())
}

fn read_quotes(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for rec in rdr.deserialize::<(f64, f64)>() {
        out.push(rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?);
    }
    Ok(out)
}

/// Regime-model prices at `strikes`, keeping those large enough to quote.
fn model_quotes(cfg: &RegimeConfig, ctx: &Ctx, style: Style, maturity: f64, strikes: &[f64]) -> Result<Vec<(f64, f64)>, CliError> {
    let mut pricer = RainbowPricer::new(cfg, &ctx.cfg.market, style, maturity, &ctx.cfg.grid)?;
    let mut out = Vec::new();
    for &k in strikes {
        let p = pricer.price(k)?.value;
        if p > 1e-4 {
            out.push((k, p));
        } else {
            eprintln!("note: {style} K={k} prices at {p:.3e}; left out of the quotes");
        }
    }
    Ok(out)
}

pub fn calibrate(ctx: &Ctx, style: &str, maturity: Option<f64>, quotes: Option<&Path>) -> Result<(), CliError> {
    let style = parse_style(style)?;
    let sec = &ctx.cfg.file.calibrate;
    let maturity = maturity.unwrap_or(sec.maturity);
    let entries = match quotes {
        Some(p) => read_quotes(p)?,
        None => model_quotes(&ctx.cfg.regime, ctx, style, maturity, &sec.strikes)?,
    };
    let qs = QuoteSet::new(style, maturity, ctx.cfg.market, entries).map_err(|e| CliError::Config(e.to_string()))?;
    let res = calibrate_constant_rho(&qs, &ctx.cfg.grid)?;
    println!(
        "style={style} maturity={} rho_star={} iterations={} gradient={} objective={}",
        sig10(maturity),
        sig10(res.rho_star),
        res.iterations,
        sig10(res.final_gradient),
        sig10(res.objective)
    );
    let mut table = Table::new(vec!["iteration", "rho", "objective"]);
    for (i, &(rho, obj)) in res.trace.iter().enumerate() {
        table.push(vec![i.into(), rho.into(), obj.into()]);
    }
    announce(&table.write(&ctx.out, &format!("calibrate_{style}_T{}.csv", sig10(maturity)))?);
    Ok(())
}

pub fn implied_corr(ctx: &Ctx, style: &str, strike: f64, maturity: f64, price: Option<f64>) -> Result<(), CliError> {
    let spec = RainbowSpec::new(parse_style(style)?, strike, maturity).map_err(|e| CliError::Config(e.to_string()))?;
    let price = match price {
        Some(p) => p,
        None => rainbow_price_fourier(&ctx.cfg.regime, &ctx.cfg.market, &spec, &ctx.cfg.grid)?.value,
    };
    let rho = implied_correlation(price, &ctx.cfg.market, &spec, &ctx.cfg.grid)?;
    println!(
        "style={} strike={} maturity={} price={} implied_corr={}",
        spec.style,
        sig10(strike),
        sig10(maturity),
        sig10(price),
        sig10(rho)
    );
    Ok(())
}

pub fn experiment(ctx: &Ctx, which: Experiment) -> Result<(), CliError> {
    match which {
        Experiment::Table4 => table4(ctx),
        Experiment::Table5 => table5(ctx),
        Experiment::FigErrors => fig_errors(ctx),
        Experiment::FigImpcorr => fig_impcorr(ctx),
    }
}

fn regime_with(ctx: &Ctx, q0: &[f64], alpha: &[f64]) -> Result<RegimeConfig, CliError> {
    RegimeConfig::new(ctx.cfg.regime.generator().clone(), q0.to_vec(), alpha.to_vec()).map_err(|e| CliError::Config(e.to_string()))
}

fn join(v: &[f64]) -> String {
    v.iter().map(|&x| sig10(x)).collect::<Vec<_>>().join(" ")
}

fn table4(ctx: &Ctx) -> Result<(), CliError> {
    let t4 = ctx.cfg.table4()?;
    let style = parse_style(&t4.style)?;
    let spec = RainbowSpec::new(style, t4.strike, t4.maturity).map_err(|e| CliError::Config(e.to_string()))?;
    let cells = (t4.history_horizon / t4.history_dt).round() as usize;
    let history = TimeGrid::uniform(t4.history_horizon, cells).map_err(|e| CliError::Config(e.to_string()))?;
    let mut table = Table::new(vec!["alpha", "true_price", "rho_hat", "price_rho_hat", "relative_error", "rho_hat_limit"]);
    for (i, alpha) in t4.alphas.iter().enumerate() {
        let cfg = regime_with(ctx, &t4.q0, alpha)?;
        let truth = rainbow_price_fourier(&cfg, &ctx.cfg.market, &spec, &ctx.cfg.grid)?.value;
        let path = simulate_cd_path(&cfg, &history, &mut substream(ctx.seed, i as u64))?;
        let rho_hat = estimate_rho_hat(&path)?.clamp(-RHO_BOUND, RHO_BOUND);
        let constant = price_constant_rho(&ctx.cfg.market, &spec, rho_hat, &ctx.cfg.grid)?.value;
        table.push(vec![
            join(alpha).into(),
            truth.into(),
            rho_hat.into(),
            constant.into(),
            relative_error(constant, truth)?.into(),
            rho_hat_stationary(&cfg)?.into(),
        ]);
        eprintln!("table4 row {} of {}", i + 1, t4.alphas.len());
    }
    let csv = table.to_csv()?;
    print!("{csv}");
    announce(&write_file(&ctx.out, &format!("table4_s{}.csv", ctx.seed), &csv)?);
    Ok(())
}

fn table5(ctx: &Ctx) -> Result<(), CliError> {
    let t5 = &ctx.cfg.file.table5;
    let mut table = Table::new(vec!["case", "q0", "alpha", "maturity", "expected_rho_bar"]);
    for case in &t5.cases {
        let cfg = regime_with(ctx, &case.q0, &case.alpha)?;
        for &tau in &t5.maturities {
            table.push(vec![
                case.label.clone().into(),
                join(&case.q0).into(),
                join(&case.alpha).into(),
                tau.into(),
                expected_rho_bar(&cfg, tau)?.into(),
            ]);
        }
    }
    let csv = table.to_csv()?;
    print!("{csv}");
    announce(&write_file(&ctx.out, "table5.csv", &csv)?);
    Ok(())
}

fn write_chart(ctx: &Ctx, name: &str, csv: &str, y_col: &str, title: &str) -> Result<(), CliError> {
    announce(&write_file(&ctx.out, &format!("{name}.csv"), csv)?);
    let svg = chart_from_csv(csv, "series", "strike", y_col, title)?;
    announce(&write_file(&ctx.out, &format!("{name}.svg"), &svg)?);
    Ok(())
}

fn fig_errors(ctx: &Ctx) -> Result<(), CliError> {
    let fig = &ctx.cfg.file.figures;
    let strikes = fig.strikes()?;
    let calib_strikes = &ctx.cfg.file.calibrate.strikes;
    let mut table = Table::new(vec!["series", "strike", "rho_star", "true_price", "constant_price", "relative_error"]);
    for name in &fig.styles {
        let style = parse_style(name)?;
        let quotes = model_quotes(&ctx.cfg.regime, ctx, style, fig.maturity, calib_strikes)?;
        let qs = QuoteSet::new(style, fig.maturity, ctx.cfg.market, quotes)?;
        let rho = calibrate_constant_rho(&qs, &ctx.cfg.grid)?.rho_star;
        eprintln!("fig_errors {style}: rho_star = {}", sig10(rho));
        let mut truth = RainbowPricer::new(&ctx.cfg.regime, &ctx.cfg.market, style, fig.maturity, &ctx.cfg.grid)?;
        let mut model = RainbowPricer::constant(&ctx.cfg.market, style, fig.maturity, rho, &ctx.cfg.grid)?;
        for &k in &strikes {
            let t = truth.price(k)?.value;
            let c = model.price(k)?.value;
            let err = relative_error(c, t).unwrap_or(f64::NAN);
            table.push(vec![style.name().into(), k.into(), rho.into(), t.into(), c.into(), err.into()]);
        }
    }
    let name = format!("fig_errors_T{}", sig10(fig.maturity));
    write_chart(ctx, &name, &table.to_csv()?, "relative_error", "Relative error of the calibrated constant-correlation price")
}

fn fig_impcorr(ctx: &Ctx) -> Result<(), CliError> {
    let fig = &ctx.cfg.file.figures;
    let strikes = fig.strikes()?;
    let mut table = Table::new(vec!["series", "strike", "price", "implied_corr"]);
    for name in &fig.styles {
        let style = parse_style(name)?;
        let mut truth = RainbowPricer::new(&ctx.cfg.regime, &ctx.cfg.market, style, fig.maturity, &ctx.cfg.grid)?;
        for &k in &strikes {
            let p = truth.price(k)?.value;
            let spec = RainbowSpec::new(style, k, fig.maturity)?;
            let rho = match implied_correlation(p, &ctx.cfg.market, &spec, &ctx.cfg.grid) {
                Ok(r) => r,
                // Left blank in the CSV: no constant correlation reproduces
                // the price on this grid.
                Err(Error::Unattainable { .. } | Error::GridTooCoarse(_)) => f64::NAN,
                Err(e) => return Err(e.into()),
            };
            table.push(vec![style.name().into(), k.into(), p.into(), rho.into()]);
        }
        eprintln!("fig_impcorr {style} done");
    }
    let name = format!("fig_impcorr_T{}", sig10(fig.maturity));
    write_chart(ctx, &name, &table.to_csv()?, "implied_corr", "Implied correlation of regime-switching prices")
}
