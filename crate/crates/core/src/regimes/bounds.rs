use std::f64::consts::LN_2;

use super::prior::log_stay_run;
use super::{log_regime_wealth, CostConvention, PriorKind};
use crate::costs::CostModel;
use crate::domain::{PriceRelativeMatrix, RegimeSpec};
use crate::error::{Error, Result};

/// `prod_{i=0}^{n-1} (i + 1/2) / (i + 1)` together with `-log2` of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KtProduct {
    pub n: usize,
    pub value: f64,
    pub neg_log2: f64,
}

impl KtProduct {
    fn from_ln(n: usize, ln: f64) -> Self {
        Self {
            n,
            value: ln.exp(),
            neg_log2: -ln / LN_2,
        }
    }

    /// `log2 g(n)` where `g(n) = sqrt(n) * prod_{i=1}^{n} (i - 1/2) / i`.
    pub fn g_log2(&self) -> f64 {
        0.5 * (self.n as f64).log2() - self.neg_log2
    }

    pub fn g(&self) -> f64 {
        self.g_log2().exp2()
    }

    /// `log2 g(n+1) - log2 g(n)` from the closed-form ratio
    /// `sqrt((n + 1/2)^2 / (n (n + 1)))`, accurate where the difference of two
    /// accumulated logs would not be.
    pub fn g_log2_increment(&self) -> f64 {
        let n = self.n as f64;
        0.5 * (0.25 / (n * (n + 1.0))).ln_1p() / LN_2
    }
}

pub fn kt_product(n: usize) -> KtProduct {
    KtProduct::from_ln(n, log_stay_run(n))
}

/// [`kt_product`] for `n = 1..=n_max`, accumulated incrementally.
pub fn kt_sequence(n_max: usize) -> impl Iterator<Item = KtProduct> {
    (1..=n_max).scan(0.0, |ln, n| {
        *ln += (-0.5 / n as f64).ln_1p();
        Some(KtProduct::from_ln(n, *ln))
    })
}

/// Bits the adaptive algorithm may lose against a regime with `switches`
/// switches over `days` days: `(3/2) l log(T/l) + (1/2) log T + (l+1) log(4N)`.
/// The `l log(T/l)` term is 0 when `l = 0`.
pub fn theorem2_penalty(days: usize, assets: usize, switches: usize) -> f64 {
    let (t, l, n) = (days as f64, switches as f64, assets as f64);
    let spread = if switches == 0 { 0.0 } else { 1.5 * l * (t / l).log2() };
    spread + 0.5 * t.log2() + (l + 1.0) * (4.0 * n).log2()
}

/// Bits the fixed-`gamma` algorithm may lose against a regime with `switches`
/// switches: `(l+1) log N + l log(1/gamma) + (T-l) log(1/(1-gamma))`.
pub fn fixed_gamma_penalty(days: usize, assets: usize, switches: usize, gamma: f64) -> f64 {
    let (t, l, n) = (days as f64, switches as f64, assets as f64);
    (l + 1.0) * n.log2() - l * gamma.log2() - (t - l) * (-gamma).ln_1p() / LN_2
}

/// Algorithm wealth against one regime, all in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub switches: usize,
    pub regime_log_wealth: f64,
    pub penalty: f64,
    pub algorithm_log_wealth: f64,
    /// `algorithm - (regime - penalty)`; nonnegative whenever the bound holds.
    pub slack: f64,
}

/// Compares `algorithm_log2_wealth` with the wealth of `regime` minus the
/// prior's penalty. The regime pays commission on its switches only, the same
/// bookkeeping the algorithms use.
pub fn bound_check(
    market: &PriceRelativeMatrix,
    prior: PriorKind,
    cost: &CostModel,
    algorithm_log2_wealth: f64,
    regime: &RegimeSpec,
) -> Result<BoundReport> {
    prior.validate()?;
    let (days, assets) = (market.days(), market.assets());
    let regime_log_wealth =
        log_regime_wealth(regime, market, cost, CostConvention::SwitchesOnly)? / LN_2;
    let l = regime.switches();
    let penalty = match prior {
        PriorKind::Adaptive => theorem2_penalty(days, assets, l),
        PriorKind::FixedGamma(gamma) => fixed_gamma_penalty(days, assets, l, gamma),
    };
    Ok(BoundReport {
        switches: l,
        regime_log_wealth,
        penalty,
        algorithm_log_wealth: algorithm_log2_wealth,
        slack: algorithm_log2_wealth - (regime_log_wealth - penalty),
    })
}

/// The wealthiest regime with exactly `l` switches, for every
/// `l = 0..=min(max_switches, T - 1)`, with its wealth in bits.
///
/// Dynamic programming over (day, switches used, asset held); switches pay
/// the commission factor. Ties go to the lowest asset index.
pub fn best_regimes_by_switches(
    market: &PriceRelativeMatrix,
    cost: &CostModel,
    max_switches: usize,
) -> Result<Vec<(RegimeSpec, f64)>> {
    let (days, n) = (market.days(), market.assets());
    if days == 0 {
        return Err(Error::NoData);
    }
    let levels = max_switches.min(days - 1) + 1;
    let fee = cost.switch_factor().ln();
    let idx = |k: usize, i: usize| k * n + i;
    let mut best = vec![f64::NEG_INFINITY; levels * n];
    for i in 0..n {
        best[idx(0, i)] = market.value(0, i).ln();
    }
    // back[d][k][i]: asset held on day d (0-based) on the best path into (d + 1, k, i).
    let mut back = vec![0u32; days.saturating_sub(1) * levels * n];
    for d in 1..days {
        let mut next = vec![f64::NEG_INFINITY; levels * n];
        for k in 0..levels {
            for i in 0..n {
                let mut value = best[idx(k, i)];
                let mut from = i;
                if k > 0 {
                    for j in (0..n).filter(|&j| j != i) {
                        let v = best[idx(k - 1, j)] + fee;
                        if v > value {
                            value = v;
                            from = j;
                        }
                    }
                }
                next[idx(k, i)] = value + market.value(d, i).ln();
                back[(d - 1) * levels * n + idx(k, i)] = from as u32;
            }
        }
        best = next;
    }
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        let mut end = 0;
        for i in 1..n {
            if best[idx(k, i)] > best[idx(k, end)] {
                end = i;
            }
        }
        let value = best[idx(k, end)];
        if value == f64::NEG_INFINITY {
            continue;
        }
        let mut path = vec![0usize; days];
        let (mut asset, mut level) = (end, k);
        for d in (0..days).rev() {
            path[d] = asset;
            if d > 0 {
                let from = back[(d - 1) * levels * n + idx(level, asset)] as usize;
                if from != asset {
                    level -= 1;
                }
                asset = from;
            }
        }
        out.push((RegimeSpec::from_daily_holdings(&path)?, value / LN_2));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::validate_relatives;
    use crate::regimes::{enumerate_regimes, log_prior};

    #[test]
    fn kt_examples() {
        let k = kt_product(1);
        assert!((k.value - 0.5).abs() < 1e-15 && (k.neg_log2 - 1.0).abs() < 1e-15);
        assert!((kt_product(2).value - 0.375).abs() < 1e-15);
        let k = kt_product(4);
        assert!((k.value - 105.0 / 384.0).abs() < 1e-15);
        assert!((k.neg_log2 - 1.870_716_983_06).abs() < 1e-9);
        assert!(k.neg_log2 <= 0.5 * 4f64.log2() + 1.0);
        assert!((kt_product(1).g() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sequence_matches_direct() {
        for (k, n) in kt_sequence(50).zip(1..) {
            assert_eq!(k.n, n);
            assert!((k.neg_log2 - kt_product(n).neg_log2).abs() < 1e-13);
        }
    }

    #[test]
    fn adaptive_penalty_examples() {
        assert!((theorem2_penalty(4, 2, 1) - 10.0).abs() < 1e-12);
        assert!((theorem2_penalty(4, 2, 0) - 4.0).abs() < 1e-12);
        assert!((theorem2_penalty(16, 2, 2) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_penalty_examples() {
        let p = fixed_gamma_penalty(3, 2, 1, 1.0 / 3.0);
        let expected = 2.0 + 3f64.log2() + 2.0 * 1.5f64.log2();
        assert!((p - expected).abs() < 1e-12);
        assert!((p - 4.755).abs() < 1e-3);
        let p = fixed_gamma_penalty(10, 4, 0, 1e-9);
        assert!((p - 2.0).abs() < 1e-6);
    }

    #[test]
    fn penalties_dominate_exact_prior() {
        for n in 2..=3 {
            for t in 1..=8 {
                for q in enumerate_regimes(t, n).unwrap() {
                    let l = q.switches();
                    for g in [0.1, 1.0 / 3.0, 0.45] {
                        let exact = -log_prior(PriorKind::FixedGamma(g), &q, t, n).unwrap() / LN_2;
                        assert!(fixed_gamma_penalty(t, n, l, g) >= exact - 1e-12);
                    }
                    let exact = -log_prior(PriorKind::Adaptive, &q, t, n).unwrap() / LN_2;
                    assert!(theorem2_penalty(t, n, l) >= exact - 1e-12, "{q:?}");
                }
            }
        }
    }

    #[test]
    fn dp_finds_best_regime_per_switch_count() {
        let rows = vec![
            vec![1.3, 0.7, 1.0],
            vec![0.6, 1.5, 1.1],
            vec![1.2, 0.9, 0.8],
            vec![0.9, 1.0, 1.6],
            vec![1.4, 0.5, 1.0],
        ];
        let m = validate_relatives(rows, vec!["A".into(), "B".into(), "C".into()]).unwrap();
        let cost = CostModel::parallel(0.05).unwrap();
        let found = best_regimes_by_switches(&m, &cost, 10).unwrap();
        assert_eq!(found.len(), 5);
        for (l, (q, bits)) in found.iter().enumerate() {
            assert_eq!(q.switches(), l);
            let brute = enumerate_regimes(5, 3)
                .unwrap()
                .filter(|q| q.switches() == l)
                .map(|q| log_regime_wealth(&q, &m, &cost, CostConvention::SwitchesOnly).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((bits - brute / LN_2).abs() < 1e-12);
            let direct = log_regime_wealth(q, &m, &cost, CostConvention::SwitchesOnly).unwrap();
            assert!((bits - direct / LN_2).abs() < 1e-12);
        }
    }
}
