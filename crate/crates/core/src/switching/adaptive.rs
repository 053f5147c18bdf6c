use super::{gamma_hat, SwitchingState, RESCALE_HIGH, RESCALE_LOW};
use crate::costs::CostModel;
use crate::domain::PortfolioVector;
use crate::error::{Error, Result};

/// Switching portfolios with the adaptive switching probability
/// [`gamma_hat`]: the longer an asset has been held, the less likely a switch.
///
/// Wealth is kept per (asset, start day) bucket because the switching
/// probability depends on how long the current strategy has been used.
/// Buckets are stored densely, oldest first; bucket `k` of an asset started on
/// day `k + 1`.
#[derive(Debug, Clone)]
pub struct AdaptiveState {
    buckets: Vec<Vec<f64>>,
    first_live: Vec<usize>,
    log_scale: f64,
    day: usize,
    prune_below: Option<f64>,
    // hazard[a] = gamma_hat(a), stay[a] = 1 - gamma_hat(a)
    hazard: Vec<f64>,
    stay: Vec<f64>,
}

impl AdaptiveState {
    /// Unit wealth split uniformly over `assets >= 2` assets; no buckets yet.
    pub fn new(assets: usize) -> Result<Self> {
        if assets < 2 {
            return Err(Error::TooFewAssets(assets));
        }
        Ok(Self {
            buckets: vec![Vec::new(); assets],
            first_live: vec![0; assets],
            log_scale: 0.0,
            day: 0,
            prune_below: None,
            hazard: Vec::new(),
            stay: Vec::new(),
        })
    }

    /// Drops buckets holding less than `threshold` times the total wealth.
    ///
    /// Off by default: pruning breaks the exact equality with the regime
    /// mixture, so bound checks must run without it.
    pub fn with_pruning(mut self, threshold: f64) -> Self {
        self.prune_below = Some(threshold);
        self
    }

    /// Logical bucket count, `N * t` after `t` days (pruned buckets included).
    pub fn bucket_count(&self) -> usize {
        self.buckets.iter().map(Vec::len).sum()
    }

    /// Buckets still carrying wealth.
    pub fn live_buckets(&self) -> usize {
        self.buckets
            .iter()
            .map(|b| b.iter().filter(|&&s| s > 0.0).count())
            .sum()
    }

    /// Wealth of the bucket for `asset` started on day `start` (1-based).
    pub fn bucket(&self, asset: usize, start: usize) -> f64 {
        self.buckets[asset][start - 1] * self.log_scale.exp()
    }

    fn grow_tables(&mut self) {
        while self.hazard.len() < self.day {
            let age = self.hazard.len();
            let g = gamma_hat(age);
            self.hazard.push(g);
            // (age + 1/2) / (age + 1), exact in the same way as 1 - g.
            self.stay.push((age as f64 + 0.5) / (age as f64 + 1.0));
        }
    }

    /// Wealth each asset releases for switching, in scaled units.
    fn outflows(&self) -> Vec<f64> {
        let t = self.day;
        self.buckets
            .iter()
            .zip(&self.first_live)
            .map(|(b, &first)| {
                b.iter()
                    .enumerate()
                    .skip(first)
                    .map(|(k, s)| self.hazard[t - 1 - k] * s)
                    .sum()
            })
            .collect()
    }

    fn inflows(&self, outflows: &[f64], cost: &CostModel) -> Vec<f64> {
        let n = self.buckets.len();
        let total_out: f64 = outflows.iter().sum();
        let factor = cost.switch_factor() / (n - 1) as f64;
        outflows.iter().map(|o| factor * (total_out - o)).collect()
    }

    fn scaled_allocation(&self, cost: &CostModel) -> Vec<f64> {
        let n = self.buckets.len();
        if self.day == 0 {
            return vec![1.0 / n as f64; n];
        }
        let t = self.day;
        let inflows = self.inflows(&self.outflows(), cost);
        self.buckets
            .iter()
            .zip(&self.first_live)
            .zip(inflows)
            .map(|((b, &first), inflow)| {
                let kept: f64 = b
                    .iter()
                    .enumerate()
                    .skip(first)
                    .map(|(k, s)| self.stay[t - 1 - k] * s)
                    .sum();
                kept + inflow
            })
            .collect()
    }

    fn scaled_total(&self) -> f64 {
        self.buckets.iter().flatten().sum()
    }

    fn rescale(&mut self) {
        let total = self.scaled_total();
        if !(RESCALE_LOW..=RESCALE_HIGH).contains(&total) {
            for b in &mut self.buckets {
                b.iter_mut().for_each(|s| *s /= total);
            }
            self.log_scale += total.ln();
        }
    }

    fn prune(&mut self) {
        let Some(threshold) = self.prune_below else {
            return;
        };
        let floor = threshold * self.scaled_total();
        for (b, first) in self.buckets.iter_mut().zip(&mut self.first_live) {
            for s in b.iter_mut().skip(*first) {
                if *s < floor {
                    *s = 0.0;
                }
            }
            while *first < b.len() && b[*first] == 0.0 {
                *first += 1;
            }
        }
    }
}

impl SwitchingState for AdaptiveState {
    fn assets(&self) -> usize {
        self.buckets.len()
    }

    fn day(&self) -> usize {
        self.day
    }

    fn step(&mut self, x: &[f64], cost: &CostModel) -> Result<()> {
        let n = self.buckets.len();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
        if self.day == 0 {
            for (b, xi) in self.buckets.iter_mut().zip(x) {
                b.push(xi / n as f64);
            }
            self.day = 1;
            self.grow_tables();
            return Ok(());
        }
        let t = self.day;
        let inflows = self.inflows(&self.outflows(), cost);
        for ((b, &first), (xi, inflow)) in self
            .buckets
            .iter_mut()
            .zip(&self.first_live)
            .zip(x.iter().zip(inflows))
        {
            let stay = &self.stay[..t];
            for (k, s) in b.iter_mut().enumerate().skip(first) {
                *s *= stay[t - 1 - k] * xi;
            }
            b.push(inflow * xi);
        }
        self.day += 1;
        self.grow_tables();
        self.rescale();
        self.prune();
        Ok(())
    }

    fn log_total_wealth(&self) -> f64 {
        if self.day == 0 {
            return 0.0;
        }
        self.log_scale + self.scaled_total().ln()
    }

    fn asset_wealth(&self) -> Vec<f64> {
        let n = self.buckets.len();
        if self.day == 0 {
            return vec![1.0 / n as f64; n];
        }
        let scale = self.log_scale.exp();
        self.buckets
            .iter()
            .map(|b| b.iter().sum::<f64>() * scale)
            .collect()
    }

    fn allocation(&self, cost: &CostModel) -> Vec<f64> {
        let scale = self.log_scale.exp();
        self.scaled_allocation(cost)
            .into_iter()
            .map(|m| m * scale)
            .collect()
    }

    fn switch_flows(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.buckets.len();
        if self.day == 0 {
            return (vec![0.0; n], vec![0.0; n]);
        }
        let scale = self.log_scale.exp();
        let sold: Vec<f64> = self.outflows().into_iter().map(|o| o * scale).collect();
        let bought = self.inflows(&sold, &CostModel::NONE);
        (sold, bought)
    }
}

impl AdaptiveState {
    /// Cost-free weights for the next day: stay mass plus switched-in mass per
    /// asset, normalized. Uniform before the first day.
    pub fn weights(&self) -> PortfolioVector {
        self.weights_with_cost(&CostModel::NONE)
    }
}
