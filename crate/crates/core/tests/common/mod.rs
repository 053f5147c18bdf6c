#![allow(dead_code)]

use switching_portfolios::domain::PriceRelativeMatrix;
use switching_portfolios::market_data::synth_random;

/// Random market with relatives log-uniform on [0.25, 4].
pub fn random_market(days: usize, assets: usize, seed: u64) -> PriceRelativeMatrix {
    synth_random(days, assets, 0.25, 4.0, seed).unwrap()
}

/// `ln S_T(w)` for the CRP putting `w` on asset 0 of a two-asset market.
pub fn pair_log_wealth(market: &PriceRelativeMatrix, w: f64) -> f64 {
    market
        .rows()
        .map(|x| (w * x[0] + (1.0 - w) * x[1]).ln())
        .sum()
}

/// Best two-asset CRP on a grid of the given step, by exhaustive search.
pub fn grid_search_pair(market: &PriceRelativeMatrix, step: f64) -> (f64, f64) {
    let points = (1.0 / step).round() as usize;
    (0..=points)
        .map(|k| {
            let w = k as f64 / points as f64;
            (w, pair_log_wealth(market, w))
        })
        .fold((0.0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b })
}

/// `int_0^1 S_T(w) dw` by composite Simpson's rule with the given step.
pub fn quadrature_pair(market: &PriceRelativeMatrix, step: f64) -> f64 {
    let intervals = {
        let k = (1.0 / step).round() as usize;
        k + k % 2
    };
    let h = 1.0 / intervals as f64;
    let f = |w: f64| pair_log_wealth(market, w).exp();
    let mut sum = f(0.0) + f(1.0);
    for k in 1..intervals {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * f(k as f64 * h);
    }
    sum * h / 3.0
}
