use super::{enumerate_regimes, log_prior, CostConvention, PriorKind};
use crate::costs::CostModel;
use crate::domain::{PriceRelativeMatrix, RegimeSpec};
use crate::error::Result;
use crate::numerics::LogSumExp;

/// Natural log of the wealth of `regime`: the product of the held asset's
/// relatives over each segment, times the switch factor once per charged
/// segment.
pub fn log_regime_wealth(
    regime: &RegimeSpec,
    market: &PriceRelativeMatrix,
    cost: &CostModel,
    convention: CostConvention,
) -> Result<f64> {
    regime.validate(market.days(), market.assets())?;
    let held: f64 = regime
        .daily_holdings(market.days())
        .into_iter()
        .enumerate()
        .map(|(d, asset)| market.value(d, asset).ln())
        .sum();
    let charged = convention.charged_segments(regime.switches()) as f64;
    let factor = cost.switch_factor();
    let fee = if charged > 0.0 { charged * factor.ln() } else { 0.0 };
    Ok(held + fee)
}

pub fn regime_wealth(
    regime: &RegimeSpec,
    market: &PriceRelativeMatrix,
    cost: &CostModel,
    convention: CostConvention,
) -> Result<f64> {
    log_regime_wealth(regime, market, cost, convention).map(f64::exp)
}

/// Natural log of `sum_Q P(Q) S_T(Q)` by exhaustive enumeration.
pub fn log_mixture_oracle(
    market: &PriceRelativeMatrix,
    prior: PriorKind,
    cost: &CostModel,
    convention: CostConvention,
) -> Result<f64> {
    prior.validate()?;
    let (days, assets) = (market.days(), market.assets());
    if days == 0 {
        return Ok(0.0);
    }
    let mut acc = LogSumExp::new();
    for regime in enumerate_regimes(days, assets)? {
        acc.add(
            log_prior(prior, &regime, days, assets)?
                + log_regime_wealth(&regime, market, cost, convention)?,
        );
    }
    Ok(acc.value())
}

pub fn mixture_oracle(
    market: &PriceRelativeMatrix,
    prior: PriorKind,
    cost: &CostModel,
    convention: CostConvention,
) -> Result<f64> {
    log_mixture_oracle(market, prior, cost, convention).map(f64::exp)
}
