use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("invalid box on axis {axis}: lo {lo} > hi {hi}")]
    InvertedBox { axis: usize, lo: f64, hi: f64 },

    #[error("invalid ball radius {0}")]
    InvalidRadius(f64),

    #[error("non-finite coordinate in region definition")]
    NonFiniteCoordinate,

    #[error("invalid Poisson mean {0}: must be finite and non-negative")]
    InvalidMean(f64),

    #[error("invalid intensity {0}: must be finite and non-negative")]
    InvalidIntensity(f64),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid probability {0}: must lie in [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid measures a = {a}, b = {b}: need 0 <= a <= b and b > 0")]
    InvalidMeasures { a: f64, b: f64 },

    #[error("region has zero measure (estimate {value}, std error {std_error})")]
    ZeroMeasure { value: f64, std_error: f64 },

    #[error(
        "rejection sampling gave up after {attempts} attempts (estimated acceptance rate {acceptance_rate:.3e})"
    )]
    AcceptanceFailure {
        attempts: usize,
        acceptance_rate: f64,
    },

    #[error("point clouds are defined on different regions")]
    RegionMismatch,

    #[error("point cloud has no intensity")]
    MissingIntensity,

    #[error("nothing to superpose")]
    EmptySuperposition,

    #[error("chi-square test needs at least 2 bins after merging, got {0}")]
    TooFewBins(usize),

    #[error("degenerate contingency table: {0}")]
    DegenerateTable(String),

    #[error("observed total {observed} does not match declared total {declared}")]
    TotalMismatch { observed: u64, declared: u64 },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
