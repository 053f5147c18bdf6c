//! Reading price or price-relative files, and the synthetic markets used in
//! examples and regression tests.
//!
//! The file format is plain CSV with a header row of asset names. An optional
//! first column named `date` is carried through to reports untouched.

use std::io::Read;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{validate_relatives, PriceRelativeMatrix};
use crate::error::{Error, Result};
use crate::numerics::format_sig17;

/// Whether a file holds prices (`T + 1` rows) or relatives (`T` rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeriesMode {
    Prices,
    #[default]
    Relatives,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSeriesFile {
    pub path: PathBuf,
    pub mode: SeriesMode,
}

impl RawSeriesFile {
    pub fn new(path: impl Into<PathBuf>, mode: SeriesMode) -> Self {
        Self {
            path: path.into(),
            mode,
        }
    }
}

/// Loads a file into a validated matrix, converting prices when needed.
pub fn load_csv(file: &RawSeriesFile) -> Result<PriceRelativeMatrix> {
    let f = std::fs::File::open(&file.path)
        .map_err(|e| Error::Io(format!("{}: {e}", file.path.display())))?;
    read_csv(f, file.mode)
}

/// Reads CSV text from any reader.
pub fn read_csv<R: Read>(reader: R, mode: SeriesMode) -> Result<PriceRelativeMatrix> {
    let table = parse_table(reader)?;
    match mode {
        SeriesMode::Relatives => {
            let days = table.rows.len();
            let m = validate_relatives(table.rows, table.names)?;
            match table.dates {
                Some(mut dates) => {
                    dates.insert(0, String::new());
                    debug_assert_eq!(dates.len(), days + 1);
                    m.with_dates(dates)
                }
                None => Ok(m),
            }
        }
        SeriesMode::Prices => {
            let m = prices_to_relatives(table.rows, table.names)?;
            match table.dates {
                Some(dates) => m.with_dates(dates),
                None => Ok(m),
            }
        }
    }
}

struct Table {
    names: Vec<String>,
    dates: Option<Vec<String>>,
    rows: Vec<Vec<f64>>,
}

fn csv_error(e: csv::Error) -> Error {
    match e.position() {
        Some(pos) => Error::Parse {
            line: pos.line() as usize,
            column: 1,
            message: e.to_string(),
        },
        None => Error::Io(e.to_string()),
    }
}

fn parse_table<R: Read>(reader: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::EmptyFile);
    }
    let has_date = header[0].eq_ignore_ascii_case("date");
    let skip = usize::from(has_date);
    let names: Vec<String> = header.iter().skip(skip).map(str::to_owned).collect();
    if names.is_empty() {
        return Err(Error::NoAssets);
    }
    let mut dates = has_date.then(Vec::new);
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != header.len() {
            return Err(Error::Parse {
                line,
                column: record.len().min(header.len()) + 1,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        if let Some(d) = dates.as_mut() {
            d.push(record[0].to_owned());
        }
        let row = record
            .iter()
            .enumerate()
            .skip(skip)
            .map(|(c, cell)| {
                let at = |message: String| Error::Parse { line, column: c + 1, message };
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
                    Ok(v) if v.is_finite() => Err(at(format!("`{cell}` is not positive"))),
                    _ => Err(at(format!("`{cell}` is not a finite number"))),
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { names, dates, rows })
}

/// Row `t` of the output is `price[t + 1] / price[t]`, elementwise.
pub fn prices_to_relatives(prices: Vec<Vec<f64>>, names: Vec<String>) -> Result<PriceRelativeMatrix> {
    if prices.len() < 2 {
        return Err(Error::TooFewRows(prices.len()));
    }
    for (row, values) in prices.iter().enumerate() {
        if values.len() != names.len() {
            return Err(Error::RaggedRows {
                row,
                expected: names.len(),
                found: values.len(),
            });
        }
        for (asset, &value) in values.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositivePrice { row, asset, value });
            }
        }
    }
    let rows = prices
        .windows(2)
        .map(|pair| pair[1].iter().zip(&pair[0]).map(|(b, a)| b / a).collect())
        .collect();
    validate_relatives(rows, names)
}

/// CSV text of a relatives matrix, 17 significant digits per value. Dates, if
/// attached, go in a leading `date` column.
pub fn write_csv(market: &PriceRelativeMatrix) -> String {
    let mut out = String::new();
    let dates = market.dates();
    if dates.is_some() {
        out.push_str("date,");
    }
    out.push_str(&market.asset_names().join(","));
    out.push('\n');
    for (t, row) in market.rows().enumerate() {
        if let Some(d) = dates {
            out.push_str(&d[t + 1]);
            out.push(',');
        }
        let cells: Vec<String> = row.iter().map(|&v| format_sig17(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn save_csv(market: &PriceRelativeMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, write_csv(market)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn pair_names() -> Vec<String> {
    vec!["A".into(), "B".into()]
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(())
}

/// `2n` days: a cash-like asset at 1.0 and a volatile asset that halves on
/// odd days and doubles on even days.
pub fn synth_volatility_pair(n: usize) -> Result<PriceRelativeMatrix> {
    check_n(n)?;
    let rows = (1..=2 * n)
        .map(|day| vec![1.0, if day % 2 == 1 { 0.5 } else { 2.0 }])
        .collect();
    validate_relatives(rows, pair_names())
}

/// `2n` days: the first asset gains 3/2 for `n` days then loses to 1/4 for
/// `n` days; the second asset mirrors it.
pub fn synth_regime_pair(n: usize) -> Result<PriceRelativeMatrix> {
    check_n(n)?;
    let rows = (0..2 * n)
        .map(|d| if d < n { vec![1.5, 0.25] } else { vec![0.25, 1.5] })
        .collect();
    validate_relatives(rows, pair_names())
}

/// Random relatives, log-uniform on `[lo, hi]`, reproducible from `seed`.
pub fn synth_random(days: usize, assets: usize, lo: f64, hi: f64, seed: u64) -> Result<PriceRelativeMatrix> {
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidParameter(format!("bad range [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (lo.ln(), hi.ln());
    let rows = (0..days)
        .map(|_| (0..assets).map(|_| (a + (b - a) * rng.gen::<f64>()).exp()).collect())
        .collect();
    let names = (1..=assets).map(|i| format!("S{i}")).collect();
    validate_relatives(rows, names)
}
