use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-positive price relative {value} at day {day}, asset {asset}")]
    NonPositiveRelative { day: usize, asset: usize, value: f64 },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate asset name `{0}`")]
    DuplicateAssetName(String),
    #[error("at least one asset is required")]
    NoAssets,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector is all zero")]
    AllZero,
    #[error("negative entry {value} at index {index}")]
    NegativeEntry { index: usize, value: f64 },
    #[error("weights are not on the simplex (sum {sum})")]
    NotOnSimplex { sum: f64 },
    #[error("switching probability {gamma} outside (0, {max}]")]
    GammaOutOfRange { gamma: f64, max: f64 },
    #[error("at least two assets are required, found {0}")]
    TooFewAssets(usize),
    #[error("commission rate {0} outside [0, 0.5)")]
    InvalidCostRate(f64),
    #[error("negative allocation {value} at asset {asset}")]
    NegativeAllocation { asset: usize, value: f64 },
    #[error("invalid regime: {0}")]
    InvalidRegime(String),
    #[error("instance has {count} regimes, above the enumeration limit of {limit}")]
    InstanceTooLarge { count: f64, limit: u64 },
    #[error("no trading days")]
    NoData,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("empty file")]
    EmptyFile,
    #[error("at least two price rows are required, found {0}")]
    TooFewRows(usize),
    #[error("non-positive price {value} at row {row}, asset {asset}")]
    NonPositivePrice { row: usize, asset: usize, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty specification list")]
    EmptySpecList,
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
