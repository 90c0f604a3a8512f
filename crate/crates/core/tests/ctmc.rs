mod common;

use cobro_core::ctmc::{
    expected_clock, expected_rho_bar, laplace_t, sample_chain_path, stationary_distribution, transition_matrix,
    Generator, RegimeConfig,
};
use cobro_core::numeric::mean_stderr;
use cobro_core::rng::substream;
use cobro_core::simulate::{cd_endpoints, ChainSampling};
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn generator_from(n: usize, rates: &[f64]) -> Generator {
    let mut rows = vec![vec![0.0; n]; n];
    let mut it = rates.iter();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rows[i][j] = *it.next().unwrap();
            }
        }
        rows[i][i] = -rows[i].iter().sum::<f64>();
    }
    Generator::new(&rows).unwrap()
}

prop_compose! {
    fn arb_generator()(n in 2usize..=5)(
        n in Just(n),
        rates in prop::collection::vec(0.05f64..3.0, n * (n - 1)),
    ) -> Generator {
        generator_from(n, &rates)
    }
}

prop_compose! {
    fn arb_config()(g in arb_generator())(
        alpha in prop::collection::vec(0.01f64..0.99, g.n()),
        w in prop::collection::vec(0.0f64..1.0, g.n()),
        g in Just(g),
    ) -> RegimeConfig {
        let total: f64 = w.iter().sum::<f64>() + 1e-3;
        let mut q0: Vec<f64> = w.iter().map(|x| x / total).collect();
        q0[0] += 1.0 - q0.iter().sum::<f64>();
        RegimeConfig::new(g, q0, alpha).unwrap()
    }
}

#[test]
fn stationary_distribution_of_reference_generator() {
    let pi = stationary_distribution(&reference_generator()).unwrap();
    for (got, want) in pi.iter().zip([0.2636, 0.4273, 0.3091]) {
        assert!((got - want).abs() < 5e-5, "{pi:?}");
    }
}

#[test]
fn table5_expected_average_correlation() {
    let cases = [(first_set(), 0.25, -0.3177), (first_set(), 0.5, -0.2488), (second_set(), 0.25, 0.5784), (second_set(), 0.5, 0.5298)];
    for (cfg, tau, want) in cases {
        let got = expected_rho_bar(&cfg, tau).unwrap();
        assert!((got - want).abs() < 5e-4, "tau={tau}: {got} vs {want}");
    }
}

#[test]
fn laplace_transform_matches_chain_monte_carlo() {
    let cfg = first_set();
    let t = 0.25;
    let got = laplace_t(&cfg, t, Complex64::new(-1.0, 0.0)).unwrap();
    let samples = cd_endpoints(&cfg, t, ChainSampling::Exact, 1_000_000, 11).unwrap();
    let xs: Vec<f64> = samples.iter().map(|e| (-e.t_clock).exp()).collect();
    let (mean, se) = mean_stderr(&xs);
    assert!(got.im.abs() < 1e-14);
    assert!((got.re - mean).abs() < 2.576 * se, "{} vs {mean} ± {se}", got.re);
}

#[test]
fn empirical_transition_frequencies() {
    let cfg = first_set();
    let steps = 100_000;
    let path = sample_chain_path(&cfg, steps as f64 + 0.5, &mut substream(5, 0)).unwrap();
    let mut counts = [[0u64; 3]; 3];
    let mut prev = path.state_at(0.0);
    for k in 1..=steps {
        let s = path.state_at(k as f64);
        counts[prev][s] += 1;
        prev = s;
    }
    let p = transition_matrix(cfg.generator(), 1.0).unwrap();
    for i in 0..3 {
        let n: u64 = counts[i].iter().sum();
        for j in 0..3 {
            let q = p.get(i, j);
            let freq = counts[i][j] as f64 / n as f64;
            let se = (q * (1.0 - q) / n as f64).sqrt();
            assert!((freq - q).abs() < 3.0 * se, "({i},{j}) {freq} vs {q}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup(g in arb_generator(), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let lhs = transition_matrix(&g, s + t).unwrap();
        let rhs = transition_matrix(&g, s).unwrap().matmul(&transition_matrix(&g, t).unwrap());
        for i in 0..g.n() {
            for j in 0..g.n() {
                prop_assert!((lhs.get(i, j) - rhs.get(i, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn stationary_vector_is_null(g in arb_generator()) {
        let pi = stationary_distribution(&g).unwrap();
        prop_assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for j in 0..g.n() {
            let r: f64 = (0..g.n()).map(|i| g.rate(i, j) * pi[i]).sum();
            prop_assert!(r.abs() < 1e-10);
            prop_assert!(pi[j] >= 0.0);
        }
    }

    #[test]
    fn laplace_conjugate_symmetry(cfg in arb_config(), t in 0.0f64..2.0, re in -5.0f64..2.0, im in -10.0f64..10.0) {
        let z = Complex64::new(re, im);
        let a = laplace_t(&cfg, t, z.conj()).unwrap();
        let b = laplace_t(&cfg, t, z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        if im == 0.0 || re <= 0.0 {
            let real = laplace_t(&cfg, t, Complex64::new(re.min(0.0), 0.0)).unwrap();
            prop_assert!(real.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn laplace_derivative_is_expected_clock(cfg in arb_config(), t in 0.05f64..2.0) {
        let h = 1e-5;
        let d = (laplace_t(&cfg, t, Complex64::new(h, 0.0)).unwrap() - laplace_t(&cfg, t, Complex64::new(-h, 0.0)).unwrap()).re / (2.0 * h);
        let et = expected_clock(&cfg, t).unwrap();
        prop_assert!((d - et).abs() < 1e-6, "{d} vs {et}");
    }

    #[test]
    fn average_correlation_within_alpha_range(cfg in arb_config(), tau in 0.01f64..5.0) {
        let r = expected_rho_bar(&cfg, tau).unwrap();
        let (lo, hi) = cfg.alpha_range();
        prop_assert!(r >= 2.0 * lo - 1.0 - 1e-9 && r <= 2.0 * hi - 1.0 + 1e-9);
    }
}
