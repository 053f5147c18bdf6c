//! Online portfolio selection that tracks a changing market.
//!
//! The switching-portfolios algorithms hedge over every *regime* of pure
//! strategies, a schedule saying which single asset to hold on each stretch of
//! days, weighting regimes by a prior that favours few switches. The mixture
//! over exponentially many regimes is maintained in `O(N)` per day for a
//! constant switching probability and `O(N t)` per day for the adaptive one.
//!
//! ```
//! use switching_portfolios::market_data::synth_regime_pair;
//! use switching_portfolios::switching::{AdaptiveState, SwitchingState};
//! use switching_portfolios::costs::CostModel;
//!
//! let market = synth_regime_pair(10).unwrap();
//! let mut state = AdaptiveState::new(2).unwrap();
//! for x in market.rows() {
//!     state.step(x, &CostModel::NONE).unwrap();
//! }
//! // Holding either asset alone ends with (3/2 * 1/4)^10; the algorithm gains.
//! assert!(state.total_wealth() > 1.0);
//! ```
//!
//! Module map:
//!
//! * [`domain`]: price relatives, portfolio vectors, regimes.
//! * [`switching`]: the fixed and adaptive algorithms.
//! * [`regimes`]: priors, regime wealth, the brute-force mixture, bounds.
//! * [`costs`]: commission models and netted-trade accounting.
//! * [`baselines`]: CRP, best CRP, EG, universal portfolio, best stock.
//! * [`market_data`]: CSV ingestion and synthetic markets.
//! * [`backtest`]: reports, comparison tables and plot data.

pub mod backtest;
pub mod baselines;
pub mod costs;
pub mod domain;
pub mod error;
pub mod market_data;
pub mod numerics;
pub mod regimes;
pub mod switching;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $path))]
            mod $name {}
        };
    }
    chapter!(intro, "introduction.md");
    chapter!(regimes, "regimes-and-priors.md");
    chapter!(fixed, "fixed-switching.md");
    chapter!(adaptive, "adaptive-switching.md");
    chapter!(bounds, "competitive-bounds.md");
    chapter!(costs, "transaction-costs.md");
    chapter!(baselines, "baselines.md");
    chapter!(backtests, "backtesting.md");
}
