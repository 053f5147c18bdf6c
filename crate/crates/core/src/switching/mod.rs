//! The switching-portfolios algorithms.
//!
//! Both variants maintain the prior-weighted mixture over every regime of
//! pure strategies incrementally. [`FixedGammaState`] uses a geometric
//! duration prior with constant switching probability and costs `O(N)` per
//! day; [`AdaptiveState`] lets the switching probability decay with the time
//! spent on the current asset and keeps one wealth bucket per (asset, start
//! day), costing `O(N t)` on day `t`.
//!
//! Switching decisions happen between days: the first day is always held on
//! the uniform initial split, and any commission is charged only on the mass
//! that changes asset.

mod adaptive;
mod fixed;

pub use adaptive::AdaptiveState;
pub use fixed::FixedGammaState;

use crate::costs::CostModel;
use crate::domain::{argmax, PortfolioVector};
use crate::error::Result;

/// Switching probability after holding the same asset for `dt` days:
/// `(1/2) / (dt + 1)`.
pub fn gamma_hat(dt: usize) -> f64 {
    0.5 / (dt as f64 + 1.0)
}

/// Wealth outside this band triggers a rescale into the running log scale.
const RESCALE_LOW: f64 = 1e-150;
const RESCALE_HIGH: f64 = 1e150;

/// Behaviour shared by both algorithm states.
pub trait SwitchingState {
    fn assets(&self) -> usize;

    /// Number of days already processed.
    fn day(&self) -> usize;

    /// Advances the state over one day of relatives.
    fn step(&mut self, x: &[f64], cost: &CostModel) -> Result<()>;

    fn log_total_wealth(&self) -> f64;

    fn total_wealth(&self) -> f64 {
        self.log_total_wealth().exp()
    }

    /// Wealth held in each asset after the last processed day.
    fn asset_wealth(&self) -> Vec<f64>;

    /// Per-asset mass invested for the next day, after switching and any
    /// commission but before that day's returns.
    fn allocation(&self, cost: &CostModel) -> Vec<f64>;

    /// Normalized [`allocation`](Self::allocation).
    fn weights_with_cost(&self, cost: &CostModel) -> PortfolioVector {
        normalized(self.allocation(cost))
    }

    /// Gross amounts leaving and entering each asset in the next switch,
    /// before commission, as `(sold, bought)`.
    fn switch_flows(&self) -> (Vec<f64>, Vec<f64>);

    /// Asset with the most wealth, lowest index on ties.
    fn largest_asset(&self) -> usize {
        argmax(&self.asset_wealth())
    }
}

fn normalized(mass: Vec<f64>) -> PortfolioVector {
    crate::domain::normalize_to_simplex(&mass).expect("algorithm masses are positive")
}
