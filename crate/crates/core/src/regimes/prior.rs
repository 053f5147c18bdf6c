use super::PriorKind;
use crate::domain::RegimeSpec;
use crate::error::Result;

/// Natural log of the prior probability of `regime` over `days` days and
/// `assets` assets.
///
/// Both priors pick the first asset uniformly and, at each switch, the next
/// asset uniformly among the other `N - 1`. They differ in the duration model:
/// the fixed prior stays with probability `1 - gamma` between any two days,
/// the adaptive prior with probability `(a + 1/2) / (a + 1)` after `a + 1`
/// days on the same asset.
pub fn log_prior(kind: PriorKind, regime: &RegimeSpec, days: usize, assets: usize) -> Result<f64> {
    kind.validate()?;
    regime.validate(days, assets)?;
    let l = regime.switches() as f64;
    let n = assets as f64;
    let pick = -n.ln() - if l > 0.0 { l * (n - 1.0).ln() } else { 0.0 };
    match kind {
        PriorKind::FixedGamma(gamma) => {
            let stays = (days - regime.switches() - 1) as f64;
            Ok(pick + l * gamma.ln() + stays * (-gamma).ln_1p())
        }
        PriorKind::Adaptive => {
            let lengths = regime.segment_lengths(days);
            let (last, switched) = lengths.split_last().expect("at least one segment");
            let mut log_p = pick;
            for &d in switched {
                // d - 1 stays, then a switch with probability (1/2) / d.
                log_p += log_stay_run(d - 1) + (0.5 / d as f64).ln();
            }
            log_p += log_stay_run(last - 1);
            Ok(log_p)
        }
    }
}

/// `ln prod_{j=1}^{m} (j - 1/2) / j`, the probability of `m` consecutive stays
/// at the start of a segment under the adaptive prior.
pub(crate) fn log_stay_run(m: usize) -> f64 {
    (1..=m).map(|j| (-0.5 / j as f64).ln_1p()).sum()
}

pub fn prior(kind: PriorKind, regime: &RegimeSpec, days: usize, assets: usize) -> Result<f64> {
    log_prior(kind, regime, days, assets).map(f64::exp)
}

/// `gamma^l (1 - gamma)^(T - l - 1) / (N (N - 1)^l)`.
pub fn prior_fixed(regime: &RegimeSpec, days: usize, assets: usize, gamma: f64) -> Result<f64> {
    prior(PriorKind::FixedGamma(gamma), regime, days, assets)
}

/// Adaptive-prior probability of `regime`.
pub fn prior_adaptive(regime: &RegimeSpec, days: usize, assets: usize) -> Result<f64> {
    prior(PriorKind::Adaptive, regime, days, assets)
}
