mod common;

use cobro_core::analysis::*;
use cobro_core::ctmc::{expected_rho_bar, RegimeConfig};
use cobro_core::fourier::{FourierGrid, RainbowSpec, Style};
use cobro_core::numeric::mean_stderr;
use cobro_core::pricing::{rainbow_price_fourier, RainbowPricer};
use cobro_core::Error;
use common::*;

fn constant_quotes(style: Style, rho: f64, grid: &FourierGrid) -> QuoteSet {
    let m = market();
    let mut pricer = RainbowPricer::constant(&m, style, 0.25, rho, grid).unwrap();
    // Deep out-of-the-money puts at strongly negative ρ price below the
    // grid's resolution and are left out, as a market would not quote them.
    let entries = strikes()
        .into_iter()
        .filter_map(|k| pricer.price(k).ok().map(|p| (k, p.value)))
        .filter(|q| q.1 > 1e-4)
        .collect();
    QuoteSet::new(style, 0.25, m, entries).unwrap()
}

/// Roundtrips only need the quotes and the model to share a grid; this one
/// keeps the frequency range of the default grid with 40% of the nodes
/// of the coarse one.
fn roundtrip_grid() -> FourierGrid {
    FourierGrid {
        n1: 250,
        n: 250,
        eta1: 0.4,
        eta: 0.4,
        ..FourierGrid::default()
    }
}

#[test]
fn calibration_recovers_generating_correlation() {
    let grid = roundtrip_grid();
    for (style, rho0) in [(Style::PutOnMax, -0.8), (Style::CallOnMin, -0.4), (Style::PutOnMax, 0.0), (Style::PutOnMin, 0.37), (Style::CallOnMin, 0.4), (Style::PutOnMax, 0.8)] {
        let res = calibrate_constant_rho(&constant_quotes(style, rho0, &grid), &grid).unwrap();
        assert!((res.rho_star - rho0).abs() < 1e-3, "{style} {rho0}: {}", res.rho_star);
        assert!(res.final_gradient.abs() < 1e-4);
        assert!(res.trace.windows(2).all(|w| w[1].1 <= w[0].1), "objective increased: {:?}", res.trace);
    }
}

#[test]
fn implied_correlation_roundtrip_at_the_money() {
    let grid = FourierGrid::coarse();
    let m = market();
    for style in [Style::CallOnMax, Style::CallOnMin, Style::PutOnMax, Style::PutOnMin] {
        let k = if style.is_put() { 120.0 } else { 100.0 };
        let spec = RainbowSpec::new(style, k, 0.25).unwrap();
        let mut rhos = vec![-0.8, -0.4, 0.0, 0.4, 0.8];
        if style == Style::PutOnMax {
            rhos.push(0.55);
        }
        for rho in rhos {
            let p = RainbowPricer::constant(&m, style, 0.25, rho, &grid).unwrap().price(k).unwrap().value;
            let got = implied_correlation(p, &m, &spec, &grid).unwrap();
            assert!((got - rho).abs() < 1e-5, "{style} {rho}: {got}");
        }
    }
}

#[test]
fn zero_price_is_unattainable() {
    let spec = RainbowSpec::new(Style::PutOnMax, 120.0, 0.25).unwrap();
    let err = implied_correlation(0.0, &market(), &spec, &FourierGrid::coarse()).unwrap_err();
    assert!(matches!(err, Error::Unattainable { .. }), "{err}");
}

#[test]
fn regime_at_the_money_implied_correlation_is_near_average() {
    let grid = FourierGrid::coarse();
    let cfg = first_set();
    let m = market();
    let spec = RainbowSpec::new(Style::PutOnMax, 120.0, 0.25).unwrap();
    let p = rainbow_price_fourier(&cfg, &m, &spec, &grid).unwrap().value;
    let imp = implied_correlation(p, &m, &spec, &grid).unwrap();
    let mean = expected_rho_bar(&cfg, 0.25).unwrap();
    assert!((imp - mean).abs() < 0.05, "{imp} vs {mean}");
}

#[test]
fn second_order_term_improves_on_first_order() {
    let grid = FourierGrid::coarse();
    let cfg = first_set();
    let m = market();
    let spec = RainbowSpec::new(Style::PutOnMax, 120.0, 0.25).unwrap();
    let truth = rainbow_price_fourier(&cfg, &m, &spec, &grid).unwrap().value;
    let t = taylor_price_approx(&cfg, &m, &spec, &grid, 100_000, 7).unwrap();
    assert!(t.var_rho_bar > 0.0);
    assert!((t.value - truth).abs() < (t.first_order - truth).abs(), "{t:?} vs {truth}");

    let flat = RegimeConfig::new(reference_generator(), vec![1.0, 0.0, 0.0], vec![0.6; 3]).unwrap();
    let t = taylor_price_approx(&flat, &m, &spec, &grid, 10, 7).unwrap();
    let c = RainbowPricer::constant(&m, Style::PutOnMax, 0.25, 0.2, &grid).unwrap().price(120.0).unwrap().value;
    assert_eq!(t.var_rho_bar, 0.0);
    assert!((t.value - c).abs() < 1e-12);
}

#[test]
fn sampled_average_correlation_matches_quadrature() {
    for (cfg, tau) in [(first_set(), 0.25), (second_set(), 0.5)] {
        let xs = sample_rho_bar(&cfg, tau, 100_000, 3).unwrap();
        let (m, se) = mean_stderr(&xs);
        let want = expected_rho_bar(&cfg, tau).unwrap();
        assert!((m - want).abs() < 3.0 * se, "{m} vs {want} ± {se}");
    }
}

#[test]
fn relative_errors_of_table4() {
    assert!((relative_error(35.2623, 37.2642).unwrap() + 0.0537).abs() < 1e-4);
    assert!((relative_error(35.4403, 33.8134).unwrap() - 0.0481).abs() < 1e-4);
    assert!(relative_error(1.0, 0.0).is_err());
}
