use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library. Every variant carries a stable code (see
/// [`Error::code`]) that the command-line front end reports verbatim.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient index {index} exceeds truncation order {order}")]
    BeyondOrder { index: usize, order: usize },

    #[error("series domain error: {0}")]
    SeriesDomain(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("requested {requested} moments but only {available} are stored")]
    MomentsUnavailable { requested: usize, available: usize },

    #[error("invalid K-transform: {0}")]
    InvalidKTransform(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("point {re}{im:+}i lies outside the open unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("ODE integration exceeded {0} steps")]
    MaxStepsExceeded(usize),

    #[error("generator has u(0) = 0; use pointwise evolution instead of the coefficient recursion")]
    UnsupportedGenerator,

    #[error("population exceeded cap {cap} (supercritical overflow)")]
    SupercriticalOverflow { cap: u64 },

    #[error("offspring law with p0 = {0} is not a K-transform")]
    NotAKTransform(f64),

    #[error("linear system is singular: {0}")]
    Singular(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),

    #[error("word of length {len} exceeds the limit of {max} letters")]
    WordTooLong { len: usize, max: usize },

    #[error("moment of order {requested} requested but only {available} available")]
    MomentOrderExceeded { requested: usize, available: usize },

    #[error("{0}")]
    Input(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::BeyondOrder { .. } => "beyond_order",
            Error::SeriesDomain(_) => "series_domain",
            Error::InvalidMeasure(_) => "invalid_measure",
            Error::MomentsUnavailable { .. } => "moments_unavailable",
            Error::InvalidKTransform(_) => "invalid_k_transform",
            Error::InvalidGenerator(_) => "invalid_generator",
            Error::OutsideDisk { .. } => "outside_disk",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::StepSizeUnderflow { .. } => "step_size_underflow",
            Error::MaxStepsExceeded(_) => "max_steps_exceeded",
            Error::UnsupportedGenerator => "unsupported_generator",
            Error::SupercriticalOverflow { .. } => "supercritical_overflow",
            Error::NotAKTransform(_) => "not_a_k_transform",
            Error::Singular(_) => "singular_system",
            Error::Hypothesis(_) => "hypothesis_violation",
            Error::UnknownOperator(_) => "unknown_operator",
            Error::WordTooLong { .. } => "word_too_long",
            Error::MomentOrderExceeded { .. } => "moment_order_exceeded",
            Error::Input(_) => "input",
            Error::Io(_) => "io",
        }
    }

    /// Process exit status used by the CLI. 2 is reserved for usage errors
    /// reported by the argument parser itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 2,
            Error::InvalidMeasure(_)
            | Error::InvalidKTransform(_)
            | Error::InvalidGenerator(_)
            | Error::InvalidArgument(_)
            | Error::NotAKTransform(_)
            | Error::Hypothesis(_)
            | Error::UnknownOperator(_)
            | Error::OutsideDisk { .. } => 3,
            Error::StepSizeUnderflow { .. }
            | Error::MaxStepsExceeded(_)
            | Error::Singular(_)
            | Error::SupercriticalOverflow { .. }
            | Error::UnsupportedGenerator => 4,
            Error::BeyondOrder { .. }
            | Error::SeriesDomain(_)
            | Error::MomentsUnavailable { .. }
            | Error::WordTooLong { .. }
            | Error::MomentOrderExceeded { .. } => 5,
            Error::Io(_) => 6,
        }
    }
}

pub(crate) fn check_in_disk(z: num_complex::Complex64) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideDisk { re: z.re, im: z.im })
    }
}
