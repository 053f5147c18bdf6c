//! Transaction-cost models and netted-trade accounting.
//!
//! Two commission models are supported. Under [`CostKind::ProportionalPerTrade`]
//! every sale and every purchase pays a fraction `c` of the traded amount, so a
//! full switch out of one asset into another keeps `(1 - c)^2` of the moved
//! wealth. Under [`CostKind::Parallel`] the portfolio is first reshaped at
//! constant total, then `c * sum_i |S_i - S'_i|` is taken proportionally from
//! every position; a full switch keeps `1 - 2c`.

use std::fmt;

use crate::domain::{PortfolioVector, PriceRelativeMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostKind {
    None,
    ProportionalPerTrade,
    Parallel,
}

/// A commission model with its rate `c`, `0 <= c < 0.5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    kind: CostKind,
    rate: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self::NONE
    }
}

impl CostModel {
    pub const NONE: CostModel = CostModel {
        kind: CostKind::None,
        rate: 0.0,
    };

    pub fn new(kind: CostKind, rate: f64) -> Result<Self> {
        if kind == CostKind::None {
            return Ok(Self::NONE);
        }
        if !(0.0..0.5).contains(&rate) {
            return Err(Error::InvalidCostRate(rate));
        }
        Ok(Self { kind, rate })
    }

    pub fn per_trade(rate: f64) -> Result<Self> {
        Self::new(CostKind::ProportionalPerTrade, rate)
    }

    pub fn parallel(rate: f64) -> Result<Self> {
        Self::new(CostKind::Parallel, rate)
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// True when trading is free (no model, or a zero rate).
    pub fn is_free(&self) -> bool {
        self.kind == CostKind::None || self.rate == 0.0
    }

    /// Fraction of wealth kept when moving it wholesale from one asset to another.
    pub fn switch_factor(&self) -> f64 {
        match self.kind {
            CostKind::None => 1.0,
            CostKind::ProportionalPerTrade => (1.0 - self.rate) * (1.0 - self.rate),
            CostKind::Parallel => 1.0 - 2.0 * self.rate,
        }
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CostKind::None => write!(f, "none"),
            CostKind::ProportionalPerTrade => write!(f, "per-trade({})", self.rate),
            CostKind::Parallel => write!(f, "parallel({})", self.rate),
        }
    }
}

/// See [`CostModel::switch_factor`].
pub fn switch_factor(model: &CostModel) -> f64 {
    model.switch_factor()
}

/// Commission for moving from `current` to `target` per-asset wealth, trading
/// only each asset's net delta: `c * sum_i |current_i - target_i|`.
pub fn rebalance_cost(model: &CostModel, current: &[f64], target: &[f64]) -> Result<f64> {
    if current.len() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: current.len(),
            found: target.len(),
        });
    }
    for (asset, &value) in current.iter().chain(target).enumerate() {
        if value.is_nan() || value < 0.0 {
            return Err(Error::NegativeAllocation {
                asset: asset % current.len(),
                value,
            });
        }
    }
    if model.kind == CostKind::None {
        return Ok(0.0);
    }
    Ok(model.rate * l1_distance(current, target))
}

fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| (a - b).abs()).sum()
}

/// Net per-asset trade `bought_i - sold_i` for gross bucket-level flows.
pub fn net_trades(sold: &[f64], bought: &[f64]) -> Vec<f64> {
    sold.iter().zip(bought).map(|(s, b)| b - s).collect()
}

/// Total wealth left after rebalancing `holdings` to the proportions `target`.
///
/// Parallel: the cost is computed against the reshaped portfolio at unchanged
/// total, then deducted proportionally, so the result is closed form.
/// Per-trade: commission is due on the trades actually executed, which depend
/// on the post-cost total `n`; `n = W - c * sum_i |h_i - n * w_i|` is solved
/// exactly on its piecewise-linear branches.
pub fn rebalanced_total(model: &CostModel, holdings: &[f64], target: &[f64]) -> f64 {
    let total: f64 = holdings.iter().sum();
    if model.is_free() {
        return total;
    }
    let c = model.rate;
    match model.kind {
        CostKind::None => total,
        CostKind::Parallel => {
            let reshaped: f64 = holdings
                .iter()
                .zip(target)
                .map(|(h, w)| (h - total * w).abs())
                .sum();
            total - c * reshaped
        }
        CostKind::ProportionalPerTrade => solve_per_trade_total(c, holdings, target, total),
    }
}

fn solve_per_trade_total(c: f64, holdings: &[f64], target: &[f64], total: f64) -> f64 {
    // f(n) = n + c * sum |h_i - n w_i| - W is strictly increasing (slope >= 1 - c).
    let f = |n: f64| -> f64 {
        n + c
            * holdings
                .iter()
                .zip(target)
                .map(|(h, w)| (h - n * w).abs())
                .sum::<f64>()
            - total
    };
    let mut knots: Vec<f64> = holdings
        .iter()
        .zip(target)
        .filter(|(_, &w)| w > 0.0)
        .map(|(h, w)| h / w)
        .collect();
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut lo = 0.0;
    let mut f_lo = f(0.0);
    for &knot in &knots {
        let f_knot = f(knot);
        if f_knot >= 0.0 {
            if f_knot == f_lo {
                return knot;
            }
            return lo + (knot - lo) * (-f_lo) / (f_knot - f_lo);
        }
        lo = knot;
        f_lo = f_knot;
    }
    // Beyond the last knot every weighted term grows with n: slope 1 + c.
    lo - f_lo / (1.0 + c)
}

/// Simulates holding `weights[t - 1]` on day `t` and trading at the close of
/// each day to the next day's weights, paying `model` on the netted trades.
///
/// Returns the mark-to-market wealth at the close of days `0..=T`, before the
/// rebalancing for the following day. Starts from one unit already allocated
/// to `weights[0]`.
pub fn realized_wealth_track(
    weights: &[PortfolioVector],
    market: &PriceRelativeMatrix,
    model: &CostModel,
) -> Result<Vec<f64>> {
    let days = market.days();
    let n = market.assets();
    if days == 0 {
        return Ok(vec![1.0]);
    }
    if weights.len() < days {
        return Err(Error::DimensionMismatch {
            expected: days,
            found: weights.len(),
        });
    }
    if let Some(w) = weights.iter().find(|w| w.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.len(),
        });
    }
    let mut wealth = Vec::with_capacity(days + 1);
    wealth.push(1.0);
    let mut invested = 1.0;
    let mut holdings = vec![0.0; n];
    for t in 1..=days {
        let w = weights[t - 1].as_slice();
        let x = market.day(t);
        for i in 0..n {
            holdings[i] = invested * w[i] * x[i];
        }
        wealth.push(holdings.iter().sum());
        if t < days {
            invested = rebalanced_total(model, &holdings, weights[t].as_slice());
        }
    }
    Ok(wealth)
}
