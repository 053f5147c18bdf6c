use crate::domain::RegimeSpec;
use crate::error::{Error, Result};

/// Enumeration refuses instances with more regimes than this.
pub const MAX_ENUMERATED_REGIMES: u64 = 10_000_000;

/// Number of regimes over `days` days and `assets` assets.
///
/// `sum_l C(T-1, l) N (N-1)^l = N^T`: a regime is exactly a choice of held
/// asset for every day. Returned as `f64` since it overflows integers quickly.
pub fn regime_count(days: usize, assets: usize) -> f64 {
    if days == 0 {
        return 0.0;
    }
    (assets as f64).powi(days as i32)
}

/// Every regime over `days` days, each exactly once.
pub fn enumerate_regimes(days: usize, assets: usize) -> Result<RegimeIter> {
    let count = regime_count(days, assets);
    if count > MAX_ENUMERATED_REGIMES as f64 {
        return Err(Error::InstanceTooLarge {
            count,
            limit: MAX_ENUMERATED_REGIMES,
        });
    }
    Ok(RegimeIter {
        assets,
        holdings: vec![0; days],
        done: days == 0 || assets == 0,
    })
}

/// Iterator over regimes in lexicographic order of their daily holdings.
#[derive(Debug, Clone)]
pub struct RegimeIter {
    assets: usize,
    holdings: Vec<usize>,
    done: bool,
}

impl Iterator for RegimeIter {
    type Item = RegimeSpec;

    fn next(&mut self) -> Option<RegimeSpec> {
        if self.done {
            return None;
        }
        let regime = RegimeSpec::from_daily_holdings(&self.holdings).expect("non-empty path");
        // Odometer increment, last day fastest.
        self.done = true;
        for digit in self.holdings.iter_mut().rev() {
            *digit += 1;
            if *digit < self.assets {
                self.done = false;
                break;
            }
            *digit = 0;
        }
        Some(regime)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts() {
        assert_eq!(enumerate_regimes(1, 2).unwrap().count(), 2);
        assert_eq!(enumerate_regimes(2, 2).unwrap().count(), 4);
        assert_eq!(enumerate_regimes(6, 2).unwrap().count(), 64);
        assert_eq!(enumerate_regimes(0, 2).unwrap().count(), 0);
    }

    #[test]
    fn count_matches_switch_decomposition() {
        // sum_l C(T-1, l) N (N-1)^l
        for n in 2..=4usize {
            for t in 1..=7usize {
                let mut by_l = 0u64;
                let mut binom = 1u64;
                for l in 0..t as u64 {
                    by_l += binom * n as u64 * (n as u64 - 1).pow(l as u32);
                    binom = binom * (t as u64 - 1 - l) / (l + 1);
                }
                assert_eq!(enumerate_regimes(t, n).unwrap().count() as u64, by_l);
            }
        }
    }

    #[test]
    fn regimes_are_distinct_and_valid() {
        let all: Vec<_> = enumerate_regimes(5, 3).unwrap().collect();
        let unique: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(unique.len(), all.len());
        assert!(all.iter().all(|q| q.validate(5, 3).is_ok()));
    }

    #[test]
    fn guards_large_instances() {
        assert!(matches!(
            enumerate_regimes(30, 2),
            Err(Error::InstanceTooLarge { .. })
        ));
    }
}
