use thiserror::Error;

/// Errors raised by the solver, its setup, and the file front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("time {time} outside [0, {final_time}]")]
    TimeDomain { time: f64, final_time: f64 },

    #[error("position {position} outside [{left}, {right}] at t = {time}")]
    SpaceDomain {
        position: f64,
        left: f64,
        right: f64,
        time: f64,
    },

    #[error("domain width must stay positive, got {width} at t = {time}")]
    NonPositiveWidth { width: f64, time: f64 },

    #[error("boundary motion violates monotone expansion at t = {time}: {detail}")]
    Monotonicity { time: f64, detail: String },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("index {index} out of range (len {len})")]
    Index { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("non-finite value {value} in {what} at {location}")]
    NonFinite {
        what: &'static str,
        value: f64,
        location: String,
    },

    #[error("duplicate spline knot at position {position}")]
    DuplicateKnot { position: f64 },

    #[error(
        "diffusion coefficient a_{equation} = {value} outside declared bounds [{lower}, {upper}]"
    )]
    DiffusionBounds {
        equation: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error(
        "singular system matrix (pivot {pivot} at row {row}, condition estimate {condition:e})"
    )]
    Singular {
        row: usize,
        pivot: f64,
        condition: f64,
    },

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("problem has no exact solution")]
    MissingExact,

    #[error("need at least {needed} points for a rate fit, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("rate fit requires positive values, got ({abscissa}, {value})")]
    NonPositive { abscissa: f64, value: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            Error::Step { .. } => self,
            other => Error::Step {
                step,
                source: Box::new(other),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
