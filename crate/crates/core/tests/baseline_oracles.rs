//! Baselines against independent numeric oracles (grid search, quadrature).

mod common;

use common::{grid_search_pair, quadrature_pair, random_market};
use std::f64::consts::LN_2;
use switching_portfolios::baselines::{bcrp_solve, universal_run, UniversalConfig};
use switching_portfolios::costs::CostModel;

#[test]
fn bcrp_matches_grid_search() {
    for seed in 0..8 {
        let m = random_market(10 + 5 * seed as usize, 2, 500 + seed);
        let (_, grid) = grid_search_pair(&m, 1e-4);
        let best = bcrp_solve(&m).unwrap();
        assert!((best.log_wealth - grid).abs() / LN_2 <= 1e-6, "seed {seed}");
    }
}

#[test]
fn quadrature_oracle_is_exact_on_polynomials() {
    // Two days of (2, 1) then (1, 2): S(w) = (1 + w)(2 - w), integral 13/6.
    let m = switching_portfolios::domain::validate_relatives(
        vec![vec![2.0, 1.0], vec![1.0, 2.0]],
        vec!["A".into(), "B".into()],
    )
    .unwrap();
    assert!((quadrature_pair(&m, 1e-3) - 13.0 / 6.0).abs() < 1e-13);
}

#[test]
fn universal_matches_quadrature() {
    for seed in 0..3 {
        let m = random_market(6, 2, 900 + seed);
        let exact = quadrature_pair(&m, 1e-3);
        let cfg = UniversalConfig::new(20_000, seed, CostModel::NONE).unwrap();
        let got = *universal_run(&m, &cfg).unwrap().wealth.last().unwrap();
        assert!((got - exact).abs() <= 0.02 * exact, "seed {seed}: {got} vs {exact}");
    }
}
