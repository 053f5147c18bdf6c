use super::{SwitchingState, RESCALE_HIGH, RESCALE_LOW};
use crate::costs::CostModel;
use crate::domain::PortfolioVector;
use crate::error::{Error, Result};

/// Switching portfolios with a constant switching probability `gamma`.
///
/// Keeps one wealth figure per asset: the mixture mass of every regime whose
/// current strategy is that asset. Each day a fraction `gamma` of every
/// asset's wealth is redistributed uniformly over the other assets.
#[derive(Debug, Clone)]
pub struct FixedGammaState {
    gamma: f64,
    wealth: Vec<f64>,
    log_scale: f64,
    day: usize,
}

impl FixedGammaState {
    /// Unit wealth split uniformly. Requires `N >= 2` and
    /// `0 < gamma <= (N - 1) / N`, which keeps the weight map nonnegative.
    pub fn new(assets: usize, gamma: f64) -> Result<Self> {
        if assets < 2 {
            return Err(Error::TooFewAssets(assets));
        }
        let max = (assets - 1) as f64 / assets as f64;
        if !(gamma > 0.0 && gamma <= max) {
            return Err(Error::GammaOutOfRange { gamma, max });
        }
        Ok(Self {
            gamma,
            wealth: vec![1.0 / assets as f64; assets],
            log_scale: 0.0,
            day: 0,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Weights for the next day from the cost-free weight map
    /// `w' = (1 - gamma - gamma/(N-1)) w + gamma/(N-1)` applied to the current
    /// wealth shares. Uniform before the first day.
    pub fn weights(&self) -> PortfolioVector {
        let n = self.wealth.len();
        if self.day == 0 {
            return PortfolioVector::uniform(n);
        }
        let total: f64 = self.wealth.iter().sum();
        let share = self.gamma / (n - 1) as f64;
        let keep = 1.0 - self.gamma - share;
        let w = self.wealth.iter().map(|s| keep * s / total + share).collect();
        PortfolioVector::new(w).unwrap_or_else(|_| super::normalized(self.wealth.clone()))
    }

    fn check_row(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.wealth.len() {
            return Err(Error::DimensionMismatch {
                expected: self.wealth.len(),
                found: x.len(),
            });
        }
        Ok(())
    }

    fn scaled_allocation(&self, cost: &CostModel) -> Vec<f64> {
        if self.day == 0 {
            return self.wealth.clone();
        }
        let n = self.wealth.len();
        let total: f64 = self.wealth.iter().sum();
        let share = self.gamma / (n - 1) as f64;
        let factor = cost.switch_factor();
        self.wealth
            .iter()
            .map(|&s| (1.0 - self.gamma) * s + factor * share * (total - s))
            .collect()
    }

    fn rescale(&mut self) {
        let total: f64 = self.wealth.iter().sum();
        if !(RESCALE_LOW..=RESCALE_HIGH).contains(&total) {
            self.wealth.iter_mut().for_each(|s| *s /= total);
            self.log_scale += total.ln();
        }
    }
}

impl SwitchingState for FixedGammaState {
    fn assets(&self) -> usize {
        self.wealth.len()
    }

    fn day(&self) -> usize {
        self.day
    }

    fn step(&mut self, x: &[f64], cost: &CostModel) -> Result<()> {
        self.check_row(x)?;
        let mass = self.scaled_allocation(cost);
        for ((s, m), xi) in self.wealth.iter_mut().zip(mass).zip(x) {
            *s = m * xi;
        }
        self.day += 1;
        self.rescale();
        Ok(())
    }

    fn log_total_wealth(&self) -> f64 {
        self.log_scale + self.wealth.iter().sum::<f64>().ln()
    }

    fn asset_wealth(&self) -> Vec<f64> {
        let scale = self.log_scale.exp();
        self.wealth.iter().map(|s| s * scale).collect()
    }

    fn allocation(&self, cost: &CostModel) -> Vec<f64> {
        let scale = self.log_scale.exp();
        self.scaled_allocation(cost)
            .into_iter()
            .map(|m| m * scale)
            .collect()
    }

    fn switch_flows(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.wealth.len();
        if self.day == 0 {
            return (vec![0.0; n], vec![0.0; n]);
        }
        let wealth = self.asset_wealth();
        let total: f64 = wealth.iter().sum();
        let share = self.gamma / (n - 1) as f64;
        let sold = wealth.iter().map(|s| self.gamma * s).collect();
        let bought = wealth.iter().map(|s| share * (total - s)).collect();
        (sold, bought)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn init_examples() {
        let s = FixedGammaState::new(2, 1.0 / 3.0).unwrap();
        assert_eq!(s.asset_wealth(), vec![0.5, 0.5]);
        assert_eq!(s.total_wealth(), 1.0);
        let s = FixedGammaState::new(4, 0.1).unwrap();
        assert_eq!(s.asset_wealth(), vec![0.25; 4]);
        assert!(matches!(
            FixedGammaState::new(2, 0.6),
            Err(Error::GammaOutOfRange { .. })
        ));
        assert!(FixedGammaState::new(2, 0.5).is_ok());
        assert!(FixedGammaState::new(2, 0.0).is_err());
        assert_eq!(FixedGammaState::new(1, 0.1).unwrap_err(), Error::TooFewAssets(1));
    }

    #[test]
    fn step_example() {
        let mut s = FixedGammaState::new(2, 1.0 / 3.0).unwrap();
        s.step(&[2.0, 1.0], &CostModel::NONE).unwrap();
        assert!(close(s.asset_wealth()[0], 1.0));
        assert!(close(s.asset_wealth()[1], 0.5));
        assert!(close(s.total_wealth(), 1.5));
        assert_eq!(s.day(), 1);
    }

    #[test]
    fn second_step_mixes_by_hand() {
        // After day 1: (1.0, 0.5). Stay 2/3, switch 1/3 to the other asset.
        let mut s = FixedGammaState::new(2, 1.0 / 3.0).unwrap();
        s.step(&[2.0, 1.0], &CostModel::NONE).unwrap();
        s.step(&[1.0, 1.0], &CostModel::NONE).unwrap();
        let w = s.asset_wealth();
        assert!(close(w[0], 2.0 / 3.0 + 0.5 / 3.0));
        assert!(close(w[1], 1.0 / 3.0 + 1.0 / 3.0));
    }

    #[test]
    fn commission_hits_switched_mass_only() {
        let c = 0.01;
        let cost = CostModel::per_trade(c).unwrap();
        let mut s = FixedGammaState::new(2, 1.0 / 3.0).unwrap();
        s.step(&[1.0, 1.0], &cost).unwrap();
        // Nothing switches into day 1.
        assert_eq!(s.asset_wealth(), vec![0.5, 0.5]);
        s.step(&[1.0, 1.0], &cost).unwrap();
        let expected = (2.0 / 3.0) * 0.5 + 0.9801 * (1.0 / 3.0) * 0.5;
        assert!(close(s.asset_wealth()[0], expected));
    }

    #[test]
    fn tiny_gamma_is_buy_and_hold() {
        let mut s = FixedGammaState::new(3, 1e-9).unwrap();
        let rows = [[1.5, 0.5, 1.0], [0.8, 1.2, 2.0], [1.1, 0.9, 0.7]];
        for r in &rows {
            s.step(r, &CostModel::NONE).unwrap();
        }
        let w = s.asset_wealth();
        for i in 0..3 {
            let hold: f64 = rows.iter().map(|r| r[i]).product::<f64>() / 3.0;
            assert!((w[i] - hold).abs() < 1e-8);
        }
    }

    #[test]
    fn weights_examples() {
        let mut s = FixedGammaState::new(2, 1.0 / 3.0).unwrap();
        assert_eq!(s.weights(), PortfolioVector::uniform(2));
        s.step(&[1.0, 1.0], &CostModel::NONE).unwrap();
        assert!(s.weights().as_slice().iter().all(|w| close(*w, 0.5)));
        // Shares (1, 0) are approached by an extreme day; map them by hand.
        s.step(&[1e200, 1e-200], &CostModel::NONE).unwrap();
        let w = s.weights();
        assert!(close(w.as_slice()[0], 2.0 / 3.0));
        assert!(close(w.as_slice()[1], 1.0 / 3.0));
    }

    #[test]
    fn rejects_wrong_row_length() {
        let mut s = FixedGammaState::new(2, 0.2).unwrap();
        assert!(matches!(
            s.step(&[1.0], &CostModel::NONE),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn long_runs_stay_finite() {
        let mut s = FixedGammaState::new(2, 0.1).unwrap();
        for _ in 0..20_000 {
            s.step(&[0.01, 0.02], &CostModel::NONE).unwrap();
        }
        assert!(s.log_total_wealth().is_finite());
        assert!(s.log_total_wealth() < -70_000.0);
        assert!(s.weights().as_slice().iter().all(|w| w.is_finite()));
    }
}
