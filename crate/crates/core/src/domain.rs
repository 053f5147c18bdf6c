//! Domain types shared by every module: price relatives, portfolio vectors
//! and switching regimes, plus the elementary return arithmetic.
//!
//! Days are numbered `1..=T`. Anything described as "after day `t`" has seen
//! the relatives of days `1..=t`; index `0` is the state before trading starts.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Tolerance on `|sum(w) - 1|` for a vector to count as a portfolio.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

/// A `T x N` grid of strictly positive daily price relatives.
///
/// Row `t - 1` holds the relatives of day `t`: the ratio of each asset's next
/// opening price to its opening price on that day.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceRelativeMatrix {
    days: usize,
    assets: usize,
    values: Vec<f64>,
    names: Vec<String>,
    dates: Option<Vec<String>>,
}

impl PriceRelativeMatrix {
    /// Validates a row-major grid against the asset names.
    pub fn new(rows: Vec<Vec<f64>>, names: Vec<String>) -> Result<Self> {
        validate_relatives(rows, names)
    }

    pub fn days(&self) -> usize {
        self.days
    }

    pub fn assets(&self) -> usize {
        self.assets
    }

    pub fn asset_names(&self) -> &[String] {
        &self.names
    }

    /// Relatives of day `t` (1-based).
    pub fn day(&self, t: usize) -> &[f64] {
        self.row(t - 1)
    }

    /// Row by 0-based index.
    pub fn row(&self, index: usize) -> &[f64] {
        &self.values[index * self.assets..(index + 1) * self.assets]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.assets.max(1)).take(self.days)
    }

    pub fn value(&self, day_index: usize, asset: usize) -> f64 {
        self.values[day_index * self.assets + asset]
    }

    /// Date labels, one per state `0..=T`, when the source file carried them.
    pub fn dates(&self) -> Option<&[String]> {
        self.dates.as_deref()
    }

    /// Attaches date labels for states `0..=T`.
    pub fn with_dates(mut self, dates: Vec<String>) -> Result<Self> {
        if dates.len() != self.days + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.days + 1,
                found: dates.len(),
            });
        }
        self.dates = Some(dates);
        Ok(self)
    }

    /// The first `days` rows. Dates are truncated alongside.
    pub fn prefix(&self, days: usize) -> Self {
        let days = days.min(self.days);
        Self {
            days,
            assets: self.assets,
            values: self.values[..days * self.assets].to_vec(),
            names: self.names.clone(),
            dates: self.dates.as_ref().map(|d| d[..=days].to_vec()),
        }
    }

    /// Keeps only the listed assets, in the given order.
    pub fn select_assets(&self, assets: &[usize]) -> Result<Self> {
        if assets.is_empty() {
            return Err(Error::NoAssets);
        }
        for &a in assets {
            if a >= self.assets {
                return Err(Error::DimensionMismatch {
                    expected: self.assets,
                    found: a + 1,
                });
            }
        }
        let rows = self
            .rows()
            .map(|row| assets.iter().map(|&a| row[a]).collect())
            .collect();
        let names = assets.iter().map(|&a| self.names[a].clone()).collect();
        let mut out = validate_relatives(rows, names)?;
        out.dates = self.dates.clone();
        Ok(out)
    }

    /// Product of each asset's relatives over all days.
    pub fn column_products(&self) -> Vec<f64> {
        let mut prod = vec![1.0; self.assets];
        for row in self.rows() {
            for (p, x) in prod.iter_mut().zip(row) {
                *p *= x;
            }
        }
        prod
    }
}

/// Builds a [`PriceRelativeMatrix`], rejecting ragged rows, non-positive or
/// non-finite relatives and duplicate names.
pub fn validate_relatives(rows: Vec<Vec<f64>>, names: Vec<String>) -> Result<PriceRelativeMatrix> {
    let assets = names.len();
    if assets == 0 {
        return Err(Error::NoAssets);
    }
    let mut seen = HashSet::with_capacity(assets);
    for name in &names {
        if !seen.insert(name.as_str()) {
            return Err(Error::DuplicateAssetName(name.clone()));
        }
    }
    let days = rows.len();
    let mut values = Vec::with_capacity(days * assets);
    for (day, row) in rows.into_iter().enumerate() {
        if row.len() != assets {
            return Err(Error::RaggedRows {
                row: day,
                expected: assets,
                found: row.len(),
            });
        }
        for (asset, &value) in row.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveRelative { day, asset, value });
            }
        }
        values.extend(row);
    }
    Ok(PriceRelativeMatrix {
        days,
        assets,
        values,
        names,
        dates: None,
    })
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioVector(Vec<f64>);

impl PortfolioVector {
    /// Accepts `weights` only if they already lie on the simplex.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::NoAssets);
        }
        check_nonnegative(&weights)?;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::NotOnSimplex { sum });
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// All weight on `asset`.
    pub fn corner(n: usize, asset: usize) -> Self {
        let mut w = vec![0.0; n];
        w[asset] = 1.0;
        Self(w)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Index of the largest weight, lowest index on ties.
    pub fn argmax(&self) -> usize {
        argmax(&self.0)
    }
}

impl AsRef<[f64]> for PortfolioVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

fn check_nonnegative(v: &[f64]) -> Result<()> {
    for (index, &value) in v.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::NegativeEntry { index, value });
        }
    }
    Ok(())
}

/// Growth factor `w . x` of one trading day.
pub fn daily_return(w: &PortfolioVector, x: &[f64]) -> Result<f64> {
    if w.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            found: x.len(),
        });
    }
    Ok(dot(w.as_slice(), x))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

/// Divides a nonnegative vector by its sum.
pub fn normalize_to_simplex(v: &[f64]) -> Result<PortfolioVector> {
    if v.is_empty() {
        return Err(Error::NoAssets);
    }
    check_nonnegative(v)?;
    let sum: f64 = v.iter().sum();
    if sum <= 0.0 {
        return Err(Error::AllZero);
    }
    Ok(PortfolioVector(v.iter().map(|x| x / sum).collect()))
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// A switching regime: the asset held on each segment and the days after
/// which the holding changes.
///
/// `switch_times` are the days `t_1 < ... < t_l` after which wealth moves,
/// `strategies` the `l + 1` assets held on the segments in between.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegimeSpec {
    switch_times: Vec<usize>,
    strategies: Vec<usize>,
}

impl RegimeSpec {
    /// Checks the structural invariants that do not depend on `T` or `N`.
    pub fn new(switch_times: Vec<usize>, strategies: Vec<usize>) -> Result<Self> {
        if strategies.len() != switch_times.len() + 1 {
            return Err(Error::InvalidRegime(format!(
                "{} strategies for {} switch times",
                strategies.len(),
                switch_times.len()
            )));
        }
        if switch_times.first() == Some(&0) {
            return Err(Error::InvalidRegime("switch time 0".into()));
        }
        if switch_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidRegime("switch times not strictly increasing".into()));
        }
        if strategies.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidRegime("adjacent strategies are equal".into()));
        }
        Ok(Self {
            switch_times,
            strategies,
        })
    }

    /// Holds `asset` for the whole horizon.
    pub fn constant(asset: usize) -> Self {
        Self {
            switch_times: Vec::new(),
            strategies: vec![asset],
        }
    }

    /// Builds the regime that holds `path[t - 1]` on day `t`.
    pub fn from_daily_holdings(path: &[usize]) -> Result<Self> {
        let Some(&first) = path.first() else {
            return Err(Error::InvalidRegime("empty holding path".into()));
        };
        let mut switch_times = Vec::new();
        let mut strategies = vec![first];
        for (t, pair) in path.windows(2).enumerate() {
            if pair[0] != pair[1] {
                switch_times.push(t + 1);
                strategies.push(pair[1]);
            }
        }
        Ok(Self {
            switch_times,
            strategies,
        })
    }

    pub fn switch_times(&self) -> &[usize] {
        &self.switch_times
    }

    pub fn strategies(&self) -> &[usize] {
        &self.strategies
    }

    /// Number of switches `l`.
    pub fn switches(&self) -> usize {
        self.switch_times.len()
    }

    /// Checks the regime against a horizon of `days` and `assets` assets.
    pub fn validate(&self, days: usize, assets: usize) -> Result<()> {
        if days == 0 {
            return Err(Error::InvalidRegime("regimes need at least one day".into()));
        }
        if let Some(&last) = self.switch_times.last() {
            if last >= days {
                return Err(Error::InvalidRegime(format!(
                    "switch after day {last} in a {days}-day horizon"
                )));
            }
        }
        if let Some(&bad) = self.strategies.iter().find(|&&s| s >= assets) {
            return Err(Error::InvalidRegime(format!(
                "asset {bad} out of range for {assets} assets"
            )));
        }
        Ok(())
    }

    /// Segment lengths `t_j - t_{j-1}` with `t_0 = 0` and `t_{l+1} = days`.
    pub fn segment_lengths(&self, days: usize) -> Vec<usize> {
        let mut prev = 0;
        let mut out = Vec::with_capacity(self.strategies.len());
        for &t in self.switch_times.iter().chain(std::iter::once(&days)) {
            out.push(t - prev);
            prev = t;
        }
        out
    }

    /// Asset held on each day `1..=days`.
    pub fn daily_holdings(&self, days: usize) -> Vec<usize> {
        self.segment_lengths(days)
            .into_iter()
            .zip(&self.strategies)
            .flat_map(|(len, &s)| std::iter::repeat_n(s, len))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("A{i}")).collect()
    }

    #[test]
    fn validates_well_formed_grid() {
        let m = validate_relatives(vec![vec![2.0, 0.5]], names(2)).unwrap();
        assert_eq!((m.days(), m.assets()), (1, 2));
        assert_eq!(m.day(1), &[2.0, 0.5]);
    }

    #[test]
    fn rejects_zero_relative() {
        let err = validate_relatives(vec![vec![1.0, 0.0]], names(2)).unwrap_err();
        assert!(matches!(err, Error::NonPositiveRelative { day: 0, asset: 1, .. }));
    }

    #[test]
    fn empty_history_is_valid() {
        let m = validate_relatives(vec![], names(1)).unwrap();
        assert_eq!(m.days(), 0);
        assert_eq!(m.rows().count(), 0);
    }

    #[test]
    fn rejects_ragged_and_duplicates() {
        assert!(matches!(
            validate_relatives(vec![vec![1.0, 1.0], vec![1.0]], names(2)),
            Err(Error::RaggedRows { row: 1, .. })
        ));
        assert!(matches!(
            validate_relatives(vec![], vec!["A".into(), "A".into()]),
            Err(Error::DuplicateAssetName(_))
        ));
    }

    #[test]
    fn daily_return_examples() {
        let half = PortfolioVector::uniform(2);
        assert_eq!(daily_return(&half, &[1.0, 0.5]).unwrap(), 0.75);
        assert_eq!(daily_return(&half, &[1.0, 2.0]).unwrap(), 1.5);
        let pure = PortfolioVector::corner(2, 0);
        assert_eq!(daily_return(&pure, &[1.7, 0.3]).unwrap(), 1.7);
        assert!(matches!(
            daily_return(&pure, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_to_simplex(&[2.0, 2.0]).unwrap().as_slice(), &[0.5, 0.5]);
        assert_eq!(normalize_to_simplex(&[1.0, 0.0, 0.0]).unwrap().as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(normalize_to_simplex(&[1.0, 3.0]).unwrap().as_slice(), &[0.25, 0.75]);
        assert_eq!(normalize_to_simplex(&[0.0, 0.0]), Err(Error::AllZero));
        assert!(matches!(
            normalize_to_simplex(&[1.0, -1.0]),
            Err(Error::NegativeEntry { index: 1, .. })
        ));
    }

    #[test]
    fn portfolio_rejects_off_simplex() {
        assert!(PortfolioVector::new(vec![0.5, 0.5 + 1e-9]).is_err());
        assert!(PortfolioVector::new(vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn regime_validation() {
        assert!(RegimeSpec::new(vec![1], vec![0, 0]).is_err());
        assert!(RegimeSpec::new(vec![2, 2], vec![0, 1, 0]).is_err());
        assert!(RegimeSpec::new(vec![1], vec![0]).is_err());
        let q = RegimeSpec::new(vec![1, 3], vec![0, 1, 0]).unwrap();
        assert!(q.validate(4, 2).is_ok());
        assert!(q.validate(3, 2).is_err());
        assert!(q.validate(4, 1).is_err());
        assert_eq!(q.segment_lengths(4), vec![1, 2, 1]);
        assert_eq!(q.daily_holdings(4), vec![0, 1, 1, 0]);
        assert_eq!(RegimeSpec::from_daily_holdings(&[0, 1, 1, 0]).unwrap(), q);
    }

    fn simplex_and_row() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..6).prop_flat_map(|n| {
            (
                prop::collection::vec(0.0f64..10.0, n),
                prop::collection::vec(0.01f64..100.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn daily_return_between_extremes((v, x) in simplex_and_row()) {
            prop_assume!(v.iter().sum::<f64>() > 0.0);
            let w = normalize_to_simplex(&v).unwrap();
            let r = daily_return(&w, &x).unwrap();
            let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = x.iter().cloned().fold(0.0, f64::max);
            prop_assert!(r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12));
        }

        #[test]
        fn normalize_idempotent_and_scale_free((v, _x) in simplex_and_row(), k in 1e-3f64..1e3) {
            prop_assume!(v.iter().sum::<f64>() > 0.0);
            let once = normalize_to_simplex(&v).unwrap();
            let twice = normalize_to_simplex(once.as_slice()).unwrap();
            let scaled: Vec<f64> = v.iter().map(|a| a * k).collect();
            let scaled = normalize_to_simplex(&scaled).unwrap();
            for i in 0..v.len() {
                prop_assert!((once.as_slice()[i] - twice.as_slice()[i]).abs() <= 1e-15);
                prop_assert!((once.as_slice()[i] - scaled.as_slice()[i]).abs() <= 1e-14);
            }
            prop_assert!(PortfolioVector::new(once.into_inner()).is_ok());
        }
    }
}
