mod common;

use cobro_core::ctmc::{expected_clock, RegimeConfig};
use cobro_core::fourier::{FourierGrid, RainbowSpec, Style};
use cobro_core::numeric::{bs_call, mean_stderr};
use cobro_core::pricing::*;
use cobro_core::rng::substream;
use cobro_core::simulate::{CdEndpoint, ChainSampling};
use common::*;

#[test]
fn regime_call_on_max_matches_monte_carlo() {
    let cfg = first_set();
    let m = market();
    let spec = RainbowSpec::new(Style::CallOnMax, 90.0, 0.25).unwrap();
    let f = rainbow_price_fourier(&cfg, &m, &spec, &FourierGrid::coarse()).unwrap();
    let mc = mc_price_rainbow(&cfg, &m, &spec, 1_000_000, 4242).unwrap();
    let se = mc.stderr.unwrap();
    assert_eq!(f.method, Method::Fourier);
    assert!((f.value - mc.value).abs() < 3.0 * se, "{} vs {} ± {se}", f.value, mc.value);
    // Undiscounted expectation.
    let df = (m.r * 0.25f64).exp();
    assert!((f.value * df - mc.value * df).abs() < 3.0 * se * df);
}

#[test]
fn constant_rho_matches_monte_carlo() {
    let m = market();
    let cfg = RegimeConfig::constant(0.2).unwrap();
    for style in [Style::CallOnMax, Style::PutOnMin, Style::BestOfAssetsOrCash] {
        let spec = RainbowSpec::new(style, 110.0, 0.5).unwrap();
        let c = price_constant_rho(&m, &spec, 0.2, &FourierGrid::coarse()).unwrap();
        let mc = mc_price_rainbow(&cfg, &m, &spec, 200_000, 5).unwrap();
        let se = mc.stderr.unwrap();
        assert_eq!(c.method, Method::ClosedConstant);
        assert!((c.value - mc.value).abs() < 3.0 * se, "{style}: {} vs {} ± {se}", c.value, mc.value);
    }
}

#[test]
fn put_on_min_vanishes_as_strike_goes_to_zero() {
    let spec = RainbowSpec::new(Style::PutOnMin, 1e-6, 0.25).unwrap();
    let p = rainbow_price_fourier(&first_set(), &market(), &spec, &FourierGrid::coarse()).unwrap();
    assert!(p.value.abs() < 1e-8, "{}", p.value);
}

#[test]
fn max_plus_min_identity_holds_under_regime_switching() {
    let m = market();
    let grid = FourierGrid::coarse();
    let cfg = second_set();
    let mut max = RainbowPricer::new(&cfg, &m, Style::CallOnMax, 0.5, &grid).unwrap();
    let mut min = RainbowPricer::new(&cfg, &m, Style::CallOnMin, 0.5, &grid).unwrap();
    for k in strikes() {
        let want = bs_call(m.s0_1, k, m.r, 0.0, m.sigma1, 0.5) + bs_call(m.s0_2, k, m.r, 0.0, m.sigma2, 0.5);
        let got = max.price(k).unwrap().value + min.price(k).unwrap().value;
        assert!((got - want).abs() < 1e-7, "K={k}: {got} vs {want}");
    }
}

#[test]
fn monotone_in_strike_and_max_dominates_min() {
    let m = market();
    let grid = FourierGrid::coarse();
    for cfg in [RegimeConfig::constant(0.2).unwrap(), first_set()] {
        let prices = |style| RainbowPricer::new(&cfg, &m, style, 0.25, &grid).unwrap().prices(&strikes()).unwrap();
        let (cmax, cmin, pmax, pmin) = (prices(Style::CallOnMax), prices(Style::CallOnMin), prices(Style::PutOnMax), prices(Style::PutOnMin));
        for i in 0..strikes().len() {
            assert!(cmax[i] >= cmin[i] && pmin[i] >= pmax[i]);
            if i > 0 {
                assert!(cmax[i] <= cmax[i - 1] + 1e-9 && cmin[i] <= cmin[i - 1] + 1e-9);
                assert!(pmax[i] >= pmax[i - 1] - 1e-9 && pmin[i] >= pmin[i - 1] - 1e-9);
            }
        }
    }
}

#[test]
fn delta_limits_and_finite_difference() {
    let cfg = first_set();
    let m = market();
    let grid = FourierGrid::coarse();
    let mut pricer = RainbowPricer::new(&cfg, &m, Style::CallOnMax, 0.25, &grid).unwrap();

    let itm = pricer.delta_s1(1.0).unwrap();
    let max_spec = RainbowSpec::new(Style::CallOnMax, 0.0, 0.25).unwrap();
    let fd_max = bump_delta(&cfg, &m, &max_spec, &grid, 1, 1e-3).unwrap();
    assert!((itm - fd_max).abs() < 0.02, "{itm} vs {fd_max}");

    let otm = pricer.delta_s1(10.0 * m.s0_2).unwrap();
    assert!(otm.abs() < 1e-3, "{otm}");

    let spec = RainbowSpec::new(Style::CallOnMax, 90.0, 0.25).unwrap();
    let d = pricer.delta_s1(90.0).unwrap();
    let fd = bump_delta(&cfg, &m, &spec, &grid, 1, 1e-3).unwrap();
    assert!((d - fd).abs() < 1e-4, "{d} vs {fd}");

    let put = RainbowSpec::new(Style::PutOnMax, 90.0, 0.25).unwrap();
    assert!(delta_s1_fourier(&cfg, &m, &put, &grid).is_err());
}

#[test]
fn monte_carlo_is_reproducible() {
    let spec = RainbowSpec::new(Style::PutOnMax, 120.0, 0.25).unwrap();
    let a = mc_price_rainbow(&first_set(), &market(), &spec, 5000, 17).unwrap();
    let b = mc_price_rainbow(&first_set(), &market(), &spec, 5000, 17).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.method, Method::MonteCarlo);
    assert!(mc_price_rainbow(&first_set(), &market(), &spec, 99, 17).is_err());
}

#[test]
fn quanto_put_matches_monte_carlo() {
    let cfg = first_set();
    let q = QuantoSpec {
        r1: 0.05,
        r2: 0.03,
        s0: 100.0,
        r0: 1.2,
        sigma1: 0.2,
        sigma2: 0.3,
        strike: 100.0,
        maturity: 0.25,
    };
    let t = q.maturity;
    let s12 = q.sigma1 * q.sigma2;
    let sim = CdEndpoint::new(&cfg, t, ChainSampling::Exact).unwrap();
    let draws: Vec<_> = (0..1_000_000u64).map(|i| sim.sample(&mut substream(303, i))).collect();
    let mgf: Vec<f64> = draws.iter().map(|e| (s12 * (2.0 * e.t_clock - t)).exp()).collect();
    let ln_e = mean_stderr(&mgf).0.ln();
    let df = q.r0 * (-q.r1 * t).exp();
    let payoffs: Vec<f64> = draws
        .iter()
        .map(|e| {
            let s = q.s0 * ((q.r2 - 0.5 * q.sigma1 * q.sigma1) * t - ln_e + q.sigma1 * e.b_t).exp();
            df * (q.strike - s).max(0.0)
        })
        .collect();
    let (mc, se) = mean_stderr(&payoffs);
    let p = quanto_put_price(&q, &cfg).unwrap();
    assert!(p.value >= 0.0);
    assert!((p.value - mc).abs() < 3.0 * se, "{} vs {mc} ± {se}", p.value);
}

#[test]
fn covariance_swap_matches_clock_monte_carlo() {
    let cfg = first_set();
    let m = market();
    let t = 1.0;
    let sim = CdEndpoint::new(&cfg, t, ChainSampling::Exact).unwrap();
    let df = (-m.r * t).exp();
    let xs: Vec<f64> = (0..200_000u64)
        .map(|i| df * (m.sigma1 * m.sigma2 * (2.0 * sim.clock(&mut substream(404, i)).0 - t) - 0.01))
        .collect();
    let (mc, se) = mean_stderr(&xs);
    let v = covariance_swap_value(&cfg, &m, t, 0.01).unwrap().value;
    assert!((v - mc).abs() < 3.0 * se, "{v} vs {mc} ± {se}");

    let fair = m.sigma1 * m.sigma2 * (2.0 * expected_clock(&cfg, t).unwrap() - t);
    assert!(covariance_swap_value(&cfg, &m, t, fair).unwrap().value.abs() < 1e-15);
}

#[test]
fn covariance_option_bounds() {
    let cfg = first_set();
    let m = market();
    let s12t = m.sigma1 * m.sigma2;
    let deep = covariance_option_value(&cfg, &m, 1.0, -s12t, 1000, 1).unwrap();
    assert_eq!(deep, covariance_swap_value(&cfg, &m, 1.0, -s12t).unwrap());
    assert_eq!(covariance_option_value(&cfg, &m, 1.0, s12t, 1000, 1).unwrap().value, 0.0);
    let mid = covariance_option_value(&cfg, &m, 1.0, 0.0, 50_000, 2).unwrap();
    let swap = covariance_swap_value(&cfg, &m, 1.0, 0.0).unwrap().value;
    assert!(mid.value >= swap.max(0.0) - 3.0 * mid.stderr.unwrap());
}
