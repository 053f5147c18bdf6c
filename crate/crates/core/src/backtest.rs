//! Running strategies over a market and tabulating the results.
//!
//! Every report covers the states `0..=T`: `wealth[t]` is the wealth at the
//! close of day `t`, `weights[t]` the portfolio chosen for day `t + 1` after
//! seeing days `1..=t`, and `largest_asset[t]` the asset holding the most
//! wealth at the close of day `t`.

use std::fmt::{self, Write as _};

use rayon::prelude::*;

use crate::baselines::{bcrp_solve, best_stock, crp_run, eg_weights, universal_run, UniversalConfig};
use crate::costs::{realized_wealth_track, CostModel};
use crate::domain::{argmax, PortfolioVector, PriceRelativeMatrix};
use crate::error::{Error, Result};
use crate::numerics::format_sig17;
use crate::switching::{AdaptiveState, FixedGammaState, SwitchingState};

#[derive(Debug, Clone, PartialEq)]
pub enum AlgoKind {
    SwitchingFixed { gamma: f64 },
    SwitchingAdaptive,
    Crp(PortfolioVector),
    Bcrp,
    Eg { eta: f64 },
    Universal { samples: usize, seed: u64 },
    BestStock,
}

impl AlgoKind {
    pub fn name(&self) -> &'static str {
        match self {
            AlgoKind::SwitchingFixed { .. } => "switching-fixed",
            AlgoKind::SwitchingAdaptive => "switching-adaptive",
            AlgoKind::Crp(_) => "crp",
            AlgoKind::Bcrp => "bcrp",
            AlgoKind::Eg { .. } => "eg",
            AlgoKind::Universal { .. } => "universal",
            AlgoKind::BestStock => "best-stock",
        }
    }

    pub fn params(&self) -> String {
        match self {
            AlgoKind::SwitchingFixed { gamma } => format!("gamma={gamma}"),
            AlgoKind::Crp(w) => {
                let w: Vec<String> = w.as_slice().iter().map(|x| x.to_string()).collect();
                format!("w={}", w.join(","))
            }
            AlgoKind::Eg { eta } => format!("eta={eta}"),
            AlgoKind::Universal { samples, seed } => format!("samples={samples};seed={seed}"),
            _ => "-".into(),
        }
    }

    /// Strategies that need the whole history before choosing a portfolio.
    pub fn is_hindsight(&self) -> bool {
        matches!(self, AlgoKind::Bcrp | AlgoKind::BestStock)
    }
}

/// How a switching algorithm's wealth is reported under commission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostAccounting {
    /// The algorithm's own bucket bookkeeping: commission on switched mass.
    #[default]
    Bucket,
    /// Holding the implied portfolios and trading only net deltas.
    Realized,
}

impl fmt::Display for CostAccounting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostAccounting::Bucket => "bucket",
            CostAccounting::Realized => "realized",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgoSpec {
    pub kind: AlgoKind,
    pub cost: CostModel,
    pub accounting: CostAccounting,
}

impl AlgoSpec {
    pub fn new(kind: AlgoKind) -> Self {
        Self {
            kind,
            cost: CostModel::NONE,
            accounting: CostAccounting::Bucket,
        }
    }

    pub fn with_cost(mut self, cost: CostModel) -> Self {
        self.cost = cost;
        self
    }

    pub fn with_accounting(mut self, accounting: CostAccounting) -> Self {
        self.accounting = accounting;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub spec: AlgoSpec,
    pub wealth: Vec<f64>,
    pub weights: Vec<PortfolioVector>,
    pub largest_asset: Vec<usize>,
    pub final_wealth: f64,
    /// Set for BCRP and best stock, which are not online strategies.
    pub hindsight: bool,
    /// Final wealth under each accounting, when commission applies.
    pub bucket_final_wealth: Option<f64>,
    pub realized_final_wealth: Option<f64>,
    pub asset_names: Vec<String>,
    pub dates: Option<Vec<String>>,
}

impl BacktestReport {
    pub fn days(&self) -> usize {
        self.wealth.len() - 1
    }

    /// Largest peak-to-trough loss of the wealth series, as a fraction of the
    /// peak. Reported for convenience; not part of the algorithms' analysis.
    pub fn max_drawdown(&self) -> f64 {
        max_drawdown(&self.wealth)
    }
}

pub fn max_drawdown(series: &[f64]) -> f64 {
    let mut peak = f64::NEG_INFINITY;
    let mut worst = 0.0f64;
    for &w in series {
        peak = peak.max(w);
        worst = worst.max(1.0 - w / peak);
    }
    worst
}

fn largest_by_mass(weights: &[PortfolioVector], market: &PriceRelativeMatrix) -> Vec<usize> {
    let mut out = Vec::with_capacity(market.days() + 1);
    out.push(weights[0].argmax());
    for (t, x) in market.rows().enumerate() {
        let mass: Vec<f64> = weights[t].as_slice().iter().zip(x).map(|(w, x)| w * x).collect();
        out.push(argmax(&mass));
    }
    out
}

fn drive<S: SwitchingState>(
    mut state: S,
    market: &PriceRelativeMatrix,
    cost: &CostModel,
) -> Result<(Vec<f64>, Vec<PortfolioVector>, Vec<usize>)> {
    let days = market.days();
    let mut wealth = Vec::with_capacity(days + 1);
    let mut weights = Vec::with_capacity(days + 1);
    let mut largest = Vec::with_capacity(days + 1);
    wealth.push(state.total_wealth());
    weights.push(state.weights_with_cost(cost));
    largest.push(state.largest_asset());
    for x in market.rows() {
        state.step(x, cost)?;
        wealth.push(state.total_wealth());
        weights.push(state.weights_with_cost(cost));
        largest.push(state.largest_asset());
    }
    Ok((wealth, weights, largest))
}

/// Runs one strategy over `market`.
///
/// Online strategies choose `weights[t]` from days `1..=t` only.
pub fn run(spec: &AlgoSpec, market: &PriceRelativeMatrix) -> Result<BacktestReport> {
    let n = market.assets();
    let cost = spec.cost;
    let charged = !cost.is_free();
    let (mut wealth, weights, largest, bucket) = match &spec.kind {
        AlgoKind::SwitchingFixed { gamma } => {
            let (w, p, l) = drive(FixedGammaState::new(n, *gamma)?, market, &cost)?;
            (w, p, l, true)
        }
        AlgoKind::SwitchingAdaptive => {
            let (w, p, l) = drive(AdaptiveState::new(n)?, market, &cost)?;
            (w, p, l, true)
        }
        AlgoKind::Crp(w) => {
            let wealth = crp_run(w, market, &cost)?;
            let weights = vec![w.clone(); market.days() + 1];
            let largest = largest_by_mass(&weights, market);
            (wealth, weights, largest, false)
        }
        AlgoKind::Bcrp => {
            let best = bcrp_solve(market)?;
            let wealth = crp_run(&best.weights, market, &cost)?;
            let weights = vec![best.weights; market.days() + 1];
            let largest = largest_by_mass(&weights, market);
            (wealth, weights, largest, false)
        }
        AlgoKind::Eg { eta } => {
            let weights = eg_weights(market, *eta)?;
            let wealth = realized_wealth_track(&weights, market, &cost)?;
            let largest = largest_by_mass(&weights, market);
            (wealth, weights, largest, false)
        }
        AlgoKind::Universal { samples, seed } => {
            let cfg = UniversalConfig::new(*samples, *seed, cost)?;
            let run = universal_run(market, &cfg)?;
            let largest = largest_by_mass(&run.weights, market);
            (run.wealth, run.weights, largest, true)
        }
        AlgoKind::BestStock => {
            let (asset, _) = best_stock(market)?;
            let corner = PortfolioVector::corner(n, asset);
            let wealth = crp_run(&corner, market, &CostModel::NONE)?;
            (wealth, vec![corner; market.days() + 1], vec![asset; market.days() + 1], false)
        }
    };
    let mut bucket_final = None;
    let mut realized_final = None;
    if charged {
        if bucket {
            let realized = realized_wealth_track(&weights, market, &cost)?;
            bucket_final = wealth.last().copied();
            realized_final = realized.last().copied();
            if spec.accounting == CostAccounting::Realized {
                wealth = realized;
            }
        } else {
            realized_final = wealth.last().copied();
        }
    }
    let final_wealth = *wealth.last().expect("wealth series starts at day 0");
    Ok(BacktestReport {
        spec: spec.clone(),
        hindsight: spec.kind.is_hindsight(),
        wealth,
        weights,
        largest_asset: largest,
        final_wealth,
        bucket_final_wealth: bucket_final,
        realized_final_wealth: realized_final,
        asset_names: market.asset_names().to_vec(),
        dates: market.dates().map(<[String]>::to_vec),
    })
}

/// One row of a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub name: String,
    pub params: String,
    pub cost: String,
    pub final_wealth: f64,
    pub max_drawdown: f64,
    pub hindsight: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

/// Runs every spec over the same market, in parallel, keeping spec order.
pub fn compare(specs: &[AlgoSpec], market: &PriceRelativeMatrix) -> Result<ComparisonTable> {
    if specs.is_empty() {
        return Err(Error::EmptySpecList);
    }
    let reports: Vec<BacktestReport> = specs
        .par_iter()
        .map(|s| run(s, market))
        .collect::<Result<_>>()?;
    let rows = reports
        .iter()
        .map(|r| ComparisonRow {
            name: r.spec.kind.name().into(),
            params: r.spec.kind.params(),
            cost: r.spec.cost.to_string(),
            final_wealth: r.final_wealth,
            max_drawdown: r.max_drawdown(),
            hindsight: r.hindsight,
        })
        .collect();
    Ok(ComparisonTable { rows })
}

impl ComparisonTable {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("algorithm\tparams\tcost\tfinal_wealth\tmax_drawdown\thindsight\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.name,
                r.params,
                r.cost,
                format_sig17(r.final_wealth),
                format_sig17(r.max_drawdown),
                r.hindsight
            );
        }
        out
    }
}

fn optional(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), format_sig17)
}

impl BacktestReport {
    /// Two-line TSV summary.
    pub fn summary_tsv(&self) -> String {
        format!(
            "algorithm\tparams\tcost\taccounting\thindsight\tdays\tfinal_wealth\tlog2_final_wealth\tmax_drawdown\tbucket_final_wealth\trealized_final_wealth\n\
             {}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            self.spec.kind.name(),
            self.spec.kind.params(),
            self.spec.cost,
            self.spec.accounting,
            self.hindsight,
            self.days(),
            format_sig17(self.final_wealth),
            format_sig17(self.final_wealth.log2()),
            format_sig17(self.max_drawdown()),
            optional(self.bucket_final_wealth),
            optional(self.realized_final_wealth),
        )
    }
}

/// Per-day CSV: `day,wealth,largest_asset,w_1..w_N`, with a `date` column
/// after `day` when the market carried dates.
pub fn emit_plot_data(report: &BacktestReport) -> String {
    let n = report.weights.first().map_or(0, PortfolioVector::len);
    let mut out = String::from("day");
    if report.dates.is_some() {
        out.push_str(",date");
    }
    out.push_str(",wealth,largest_asset");
    for i in 1..=n {
        let _ = write!(out, ",w_{i}");
    }
    out.push('\n');
    for t in 0..report.wealth.len() {
        let _ = write!(out, "{t}");
        if let Some(d) = &report.dates {
            let _ = write!(out, ",{}", d[t]);
        }
        let _ = write!(out, ",{},{}", format_sig17(report.wealth[t]), report.largest_asset[t]);
        for w in report.weights[t].as_slice() {
            let _ = write!(out, ",{}", format_sig17(*w));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::validate_relatives;
    use crate::market_data::{synth_random, synth_regime_pair, synth_volatility_pair};

    #[test]
    fn crp_on_volatility_pair_doubles_in_twelve_days() {
        let m = synth_volatility_pair(6).unwrap();
        let r = run(&AlgoSpec::new(AlgoKind::Crp(PortfolioVector::uniform(2))), &m).unwrap();
        assert!((r.final_wealth - (9.0f64 / 8.0).powi(6)).abs() < 1e-14);
        assert!((r.final_wealth - 2.0273).abs() < 1e-4);
        assert!(!r.hindsight);
    }

    #[test]
    fn hindsight_flags() {
        let m = synth_regime_pair(2).unwrap();
        assert!(run(&AlgoSpec::new(AlgoKind::BestStock), &m).unwrap().hindsight);
        assert!(run(&AlgoSpec::new(AlgoKind::Bcrp), &m).unwrap().hindsight);
        assert!(!run(&AlgoSpec::new(AlgoKind::SwitchingAdaptive), &m).unwrap().hindsight);
    }

    #[test]
    fn report_invariants() {
        let m = synth_random(15, 3, 0.5, 2.0, 4).unwrap();
        for kind in [
            AlgoKind::SwitchingFixed { gamma: 0.2 },
            AlgoKind::SwitchingAdaptive,
            AlgoKind::Eg { eta: 0.05 },
            AlgoKind::Universal { samples: 64, seed: 1 },
            AlgoKind::Bcrp,
            AlgoKind::BestStock,
        ] {
            let r = run(&AlgoSpec::new(kind.clone()), &m).unwrap();
            assert_eq!(r.wealth[0], 1.0);
            assert_eq!(r.wealth.len(), 16);
            assert_eq!(r.weights.len(), 16);
            assert!(r.wealth.iter().all(|&w| w > 0.0));
            // Free trading: wealth compounds the daily portfolio returns.
            let mut w = 1.0;
            for t in 0..15 {
                w *= crate::domain::daily_return(&r.weights[t], m.row(t)).unwrap();
            }
            assert!((w - r.final_wealth).abs() < 1e-10 * w, "{kind:?}");
        }
    }

    #[test]
    fn largest_asset_follows_switching_wealth() {
        let m = synth_regime_pair(5).unwrap();
        let r = run(&AlgoSpec::new(AlgoKind::SwitchingAdaptive), &m).unwrap();
        assert_eq!(r.largest_asset[0], 0);
        assert_eq!(r.largest_asset[3], 0);
        assert_eq!(r.largest_asset[10], 1);
    }

    #[test]
    fn both_accountings_reported_under_cost() {
        let m = synth_random(10, 2, 0.5, 2.0, 3).unwrap();
        let cost = CostModel::per_trade(0.02).unwrap();
        let spec = AlgoSpec::new(AlgoKind::SwitchingFixed { gamma: 0.3 }).with_cost(cost);
        let bucket = run(&spec, &m).unwrap();
        let realized = run(&spec.clone().with_accounting(CostAccounting::Realized), &m).unwrap();
        assert_eq!(bucket.bucket_final_wealth, realized.bucket_final_wealth);
        assert_eq!(realized.final_wealth, realized.realized_final_wealth.unwrap());
        assert_eq!(bucket.final_wealth, bucket.bucket_final_wealth.unwrap());
        // Netting never pays more than the bucket-level trades.
        assert!(realized.final_wealth >= bucket.final_wealth * (1.0 - 1e-12));
    }

    #[test]
    fn compare_rows_and_errors() {
        let m = synth_random(12, 2, 0.5, 2.0, 8).unwrap();
        let specs = vec![
            AlgoSpec::new(AlgoKind::BestStock),
            AlgoSpec::new(AlgoKind::Bcrp),
            AlgoSpec::new(AlgoKind::SwitchingFixed { gamma: 1.0 / 3.0 }),
        ];
        let table = compare(&specs, &m).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert_eq!(table.rows[0].name, "best-stock");
        assert!(table.rows[1].final_wealth >= table.rows[0].final_wealth * (1.0 - 1e-12));
        assert_eq!(table.to_tsv().lines().count(), 4);
        assert_eq!(compare(&[], &m), Err(Error::EmptySpecList));
    }

    #[test]
    fn drawdown() {
        assert_eq!(max_drawdown(&[1.0, 2.0, 1.0, 3.0]), 0.5);
        assert_eq!(max_drawdown(&[1.0, 1.5]), 0.0);
    }

    #[test]
    fn plot_data_shape() {
        let empty = validate_relatives(vec![], vec!["A".into(), "B".into()]).unwrap();
        let r = run(&AlgoSpec::new(AlgoKind::SwitchingAdaptive), &empty).unwrap();
        let csv = emit_plot_data(&r);
        assert_eq!(csv, "day,wealth,largest_asset,w_1,w_2\n0,1.0000000000000000,0,0.50000000000000000,0.50000000000000000\n");
        let m = synth_regime_pair(3).unwrap();
        let r = run(&AlgoSpec::new(AlgoKind::SwitchingFixed { gamma: 0.25 }), &m).unwrap();
        assert_eq!(emit_plot_data(&r).lines().count(), 8);
    }
}
