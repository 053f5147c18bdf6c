//! Switching regimes as explicit objects: their prior probabilities, their
//! wealth, the brute-force mixture over all of them, and the competitive
//! bounds that compare the algorithms against any single regime.
//!
//! The brute-force mixture is the reference the incremental algorithms in
//! [`crate::switching`] must reproduce exactly. Bounds are reported in bits.

mod bounds;
mod enumerate;
mod oracle;
mod prior;

pub use bounds::{
    best_regimes_by_switches, bound_check, fixed_gamma_penalty, kt_product, kt_sequence,
    theorem2_penalty, BoundReport, KtProduct,
};
pub use enumerate::{enumerate_regimes, regime_count, RegimeIter, MAX_ENUMERATED_REGIMES};
pub use oracle::{log_mixture_oracle, log_regime_wealth, mixture_oracle, regime_wealth};
pub use prior::{log_prior, prior, prior_adaptive, prior_fixed};

use crate::error::{Error, Result};

/// Prior over switching regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorKind {
    /// Geometric segment durations with constant switching probability.
    FixedGamma(f64),
    /// Switching probability `gamma_hat(dt)` after `dt` days on one asset.
    Adaptive,
}

impl PriorKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PriorKind::FixedGamma(g) if !(g > 0.0 && g < 1.0) => {
                Err(Error::GammaOutOfRange { gamma: g, max: 1.0 })
            }
            _ => Ok(()),
        }
    }
}

/// Which segments of a regime pay the switching commission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostConvention {
    /// Only the `l` switches pay; matches the algorithms' bookkeeping.
    #[default]
    SwitchesOnly,
    /// All `l + 1` segments pay, the first one for the initial purchase.
    AllSegments,
}

impl CostConvention {
    /// Number of commission factors charged on a regime with `switches` switches.
    pub fn charged_segments(&self, switches: usize) -> usize {
        match self {
            CostConvention::SwitchesOnly => switches,
            CostConvention::AllSegments => switches + 1,
        }
    }
}
