//! Comparison strategies: constant rebalanced portfolios, the best one in
//! hindsight, exponentiated-gradient updates, a sampled universal portfolio
//! and the best single asset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::costs::{rebalanced_total, CostModel};
use crate::domain::{dot, normalize_to_simplex, PortfolioVector, PriceRelativeMatrix};
use crate::error::{Error, Result};

fn check_dims(w: &PortfolioVector, market: &PriceRelativeMatrix) -> Result<()> {
    if w.len() != market.assets() {
        return Err(Error::DimensionMismatch {
            expected: market.assets(),
            found: w.len(),
        });
    }
    Ok(())
}

/// Wealth of the constant rebalanced portfolio `w` at the close of days
/// `0..=T`.
///
/// Each close the holdings are traded back to `w`, paying `cost` on the
/// netted trades; the price of that trade shows up in the next day's figure.
pub fn crp_run(w: &PortfolioVector, market: &PriceRelativeMatrix, cost: &CostModel) -> Result<Vec<f64>> {
    check_dims(w, market)?;
    Ok(crp_series(w.as_slice(), market, cost))
}

fn crp_series(w: &[f64], market: &PriceRelativeMatrix, cost: &CostModel) -> Vec<f64> {
    let mut series = Vec::with_capacity(market.days() + 1);
    series.push(1.0);
    let mut invested = 1.0;
    if cost.is_free() {
        for x in market.rows() {
            invested *= dot(w, x);
            series.push(invested);
        }
        return series;
    }
    let mut holdings = vec![0.0; w.len()];
    for x in market.rows() {
        for i in 0..w.len() {
            holdings[i] = invested * w[i] * x[i];
        }
        series.push(holdings.iter().sum());
        invested = rebalanced_total(cost, &holdings, w);
    }
    series
}

/// The best constant rebalanced portfolio in hindsight.
#[derive(Debug, Clone, PartialEq)]
pub struct Bcrp {
    pub weights: PortfolioVector,
    /// `sum_t ln(w . x^t)`.
    pub log_wealth: f64,
}

impl Bcrp {
    pub fn wealth(&self) -> f64 {
        self.log_wealth.exp()
    }
}

fn log_wealth(w: &[f64], market: &PriceRelativeMatrix) -> f64 {
    market.rows().map(|x| dot(w, x).ln()).sum()
}

fn gradient(w: &[f64], market: &PriceRelativeMatrix, out: &mut [f64]) {
    out.iter_mut().for_each(|g| *g = 0.0);
    for x in market.rows() {
        let r = dot(w, x);
        for (g, xi) in out.iter_mut().zip(x) {
            *g += xi / r;
        }
    }
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

const BCRP_MAX_ITERATIONS: usize = 20_000;
const BCRP_CORNER_RESTARTS: usize = 5;

/// Projected-gradient ascent with backtracking from one starting point.
fn ascend(start: Vec<f64>, market: &PriceRelativeMatrix) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut w = start;
    let mut f = log_wealth(&w, market);
    let mut grad = vec![0.0; n];
    let mut step = 1.0 / market.days() as f64;
    for _ in 0..BCRP_MAX_ITERATIONS {
        gradient(&w, market, &mut grad);
        let mut accepted = None;
        while step > 1e-18 {
            let trial: Vec<f64> = w.iter().zip(&grad).map(|(w, g)| w + step * g).collect();
            let candidate = project_to_simplex(&trial);
            let moved: f64 = candidate.iter().zip(&w).zip(&grad).map(|((c, w), g)| g * (c - w)).sum();
            let f_new = log_wealth(&candidate, market);
            if f_new >= f + 1e-4 * moved {
                accepted = Some((candidate, f_new));
                break;
            }
            step *= 0.5;
        }
        let Some((candidate, f_new)) = accepted else {
            break;
        };
        let shift = candidate
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let gain = f_new - f;
        w = candidate;
        f = f_new;
        if shift < 1e-13 || gain <= 1e-15 * f.abs().max(1.0) {
            break;
        }
        step *= 2.0;
    }
    (w, f)
}

/// Maximizes `sum_t ln(w . x^t)` over the simplex.
///
/// Restarts from the uniform portfolio and the corners of the
/// best-performing assets, keeping the best result.
pub fn bcrp_solve(market: &PriceRelativeMatrix) -> Result<Bcrp> {
    if market.days() == 0 {
        return Err(Error::NoData);
    }
    let n = market.assets();
    if n == 1 {
        return Ok(Bcrp {
            weights: PortfolioVector::uniform(1),
            log_wealth: log_wealth(&[1.0], market),
        });
    }
    let products = market.column_products();
    let mut ranked: Vec<usize> = (0..n).collect();
    ranked.sort_by(|&a, &b| products[b].partial_cmp(&products[a]).unwrap().then(a.cmp(&b)));
    let starts = std::iter::once(PortfolioVector::uniform(n).into_inner()).chain(
        ranked
            .into_iter()
            .take(BCRP_CORNER_RESTARTS)
            .map(|i| PortfolioVector::corner(n, i).into_inner()),
    );
    let (w, f) = starts
        .map(|s| ascend(s, market))
        .fold(None::<(Vec<f64>, f64)>, |best, cand| match best {
            Some(b) if b.1 >= cand.1 => Some(b),
            _ => Some(cand),
        })
        .expect("at least one start");
    Ok(Bcrp {
        weights: normalize_to_simplex(&w)?,
        log_wealth: f,
    })
}

/// One exponentiated-gradient update:
/// `w'_i ∝ w_i exp(eta x_i / (w . x))`.
pub fn eg_step(w: &PortfolioVector, x: &[f64], eta: f64) -> Result<PortfolioVector> {
    if w.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            found: x.len(),
        });
    }
    if eta.is_nan() || eta < 0.0 {
        return Err(Error::InvalidParameter(format!("eta must be nonnegative, got {eta}")));
    }
    let r = dot(w.as_slice(), x);
    let exps: Vec<f64> = x.iter().map(|xi| eta * xi / r).collect();
    let top = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = w
        .as_slice()
        .iter()
        .zip(&exps)
        .map(|(wi, e)| wi * (e - top).exp())
        .collect();
    normalize_to_simplex(&raw)
}

/// EG portfolios for days `1..=T+1`, starting uniform.
pub fn eg_weights(market: &PriceRelativeMatrix, eta: f64) -> Result<Vec<PortfolioVector>> {
    let mut w = PortfolioVector::uniform(market.assets());
    let mut out = Vec::with_capacity(market.days() + 1);
    for x in market.rows() {
        let next = eg_step(&w, x, eta)?;
        out.push(std::mem::replace(&mut w, next));
    }
    out.push(w);
    Ok(out)
}

/// Sampling parameters for the universal portfolio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniversalConfig {
    pub samples: usize,
    pub seed: u64,
    pub cost: CostModel,
}

impl UniversalConfig {
    pub fn new(samples: usize, seed: u64, cost: CostModel) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidParameter("sample count must be at least 1".into()));
        }
        Ok(Self { samples, seed, cost })
    }
}

/// Uniform draw from the simplex for sample `index` (normalized exponential
/// spacings). Every sample owns a ChaCha stream, so draws do not depend on
/// evaluation order.
pub fn sample_portfolio(assets: usize, seed: u64, index: u64) -> PortfolioVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let spacings: Vec<f64> = (0..assets)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    normalize_to_simplex(&spacings).expect("exponential draws are positive")
}

/// Result of a universal-portfolio run.
#[derive(Debug, Clone, PartialEq)]
pub struct UniversalRun {
    /// Mean wealth of the sampled CRPs at the close of days `0..=T`.
    pub wealth: Vec<f64>,
    /// Aggregate portfolio for days `1..=T+1`: the sampled CRPs' invested
    /// mass per asset, normalized.
    pub weights: Vec<PortfolioVector>,
}

const UNIVERSAL_CHUNK: usize = 1024;

/// Cover's universal portfolio approximated by the average of `samples`
/// uniformly drawn CRPs, each started with an equal share of the wealth.
///
/// Chunks of samples run in parallel; chunk totals are combined in a fixed
/// order so the output is identical for any thread count.
pub fn universal_run(market: &PriceRelativeMatrix, config: &UniversalConfig) -> Result<UniversalRun> {
    if config.samples == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let (days, n) = (market.days(), market.assets());
    let chunks: Vec<(usize, usize)> = (0..config.samples)
        .step_by(UNIVERSAL_CHUNK)
        .map(|start| (start, (start + UNIVERSAL_CHUNK).min(config.samples)))
        .collect();
    let partial: Vec<(Vec<f64>, Vec<f64>)> = chunks
        .par_iter()
        .map(|&(start, end)| {
            let mut wealth = vec![0.0; days + 1];
            let mut mass = vec![0.0; (days + 1) * n];
            for m in start..end {
                let w = sample_portfolio(n, config.seed, m as u64);
                accumulate_crp(w.as_slice(), market, &config.cost, &mut wealth, &mut mass);
            }
            (wealth, mass)
        })
        .collect();
    let mut wealth = vec![0.0; days + 1];
    let mut mass = vec![0.0; (days + 1) * n];
    for (w, m) in partial {
        wealth.iter_mut().zip(w).for_each(|(a, b)| *a += b);
        mass.iter_mut().zip(m).for_each(|(a, b)| *a += b);
    }
    let scale = config.samples as f64;
    wealth.iter_mut().for_each(|w| *w /= scale);
    let weights = mass
        .chunks_exact(n)
        .map(normalize_to_simplex)
        .collect::<Result<Vec<_>>>()?;
    Ok(UniversalRun { wealth, weights })
}

/// Adds one CRP's wealth series and its per-day invested mass to the totals.
fn accumulate_crp(w: &[f64], market: &PriceRelativeMatrix, cost: &CostModel, wealth: &mut [f64], mass: &mut [f64]) {
    let n = w.len();
    let mut invested = 1.0;
    let mut holdings = vec![0.0; n];
    wealth[0] += 1.0;
    for (t, x) in market.rows().enumerate() {
        for i in 0..n {
            mass[t * n + i] += invested * w[i];
            holdings[i] = invested * w[i] * x[i];
        }
        let close: f64 = holdings.iter().sum();
        wealth[t + 1] += close;
        invested = if cost.is_free() {
            close
        } else {
            rebalanced_total(cost, &holdings, w)
        };
    }
    let days = market.days();
    for i in 0..n {
        mass[days * n + i] += invested * w[i];
    }
}

/// Asset with the largest product of relatives, lowest index on ties, and
/// that product. Needs hindsight.
pub fn best_stock(market: &PriceRelativeMatrix) -> Result<(usize, f64)> {
    if market.days() == 0 {
        return Err(Error::NoData);
    }
    let products = market.column_products();
    let best = crate::domain::argmax(&products);
    Ok((best, products[best]))
}
