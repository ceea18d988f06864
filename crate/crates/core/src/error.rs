use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by a series with zero constant term")]
    DivisionByZeroSeries,
    #[error("inner series of a composition must have zero constant term")]
    NonzeroConstantInner,
    #[error("series is not invertible: need f(0) = 0 and f'(0) != 0")]
    NotInvertibleSeries,
    #[error("square root needs a constant term that is the square of a rational, got {0}")]
    NoRationalSquareRoot(String),
    #[error("continued fraction depth {depth} is too small for order {order} (need at least {needed})")]
    InsufficientDepth { depth: usize, order: usize, needed: usize },

    #[error("moment sequence must start with m_0 = 1")]
    InvalidMomentSequence,
    #[error("order {got} is too small, need at least {need}")]
    InsufficientOrder { got: usize, need: usize },
    #[error("first moment is zero, S-transform undefined")]
    ZeroMeanError,
    #[error("S-transform has zero constant term, T-transform undefined")]
    ZeroConstantS,
    #[error("orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("operation not supported for {0}")]
    UnsupportedFamily(String),
    #[error("point {0} lies on the support or on an atom")]
    OnSupportError(String),
    #[error("invalid Meixner parameter tau = {0} (need tau >= -1)")]
    InvalidTau(f64),

    #[error("malformed linked partition: {0}")]
    MalformedInput(String),
    #[error("not a non-crossing linked partition")]
    InvalidPartition,
    #[error("size {n} exceeds the exhaustive enumeration limit {limit}")]
    SizeLimitExceeded { n: usize, limit: usize },

    #[error("truncation dimension {dim_n} is smaller than requested moment order {n_max}")]
    TruncationTooSmall { n_max: usize, dim_n: usize },

    #[error("x = {0} is outside the support interior")]
    OutsideSupport(f64),
    #[error("x = {0} is outside the domain of the potential")]
    OutsideDomain(f64),
    #[error("quadrature did not reach tolerance {tol:e} (estimated error {err:e})")]
    QuadratureFailure { tol: f64, err: f64 },
    #[error("invalid epsilon ladder: {0}")]
    InvalidLadder(String),

    #[error("sample covariance is singular after {0} attempts")]
    SingularCovariance(usize),
    #[error("invalid sampling configuration: {0}")]
    InvalidConfig(String),
    #[error("empty sample")]
    EmptySample,
}

pub type Result<T> = std::result::Result<T, Error>;
