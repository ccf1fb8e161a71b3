use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("probability {0} is outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("model integrity violated: {0}")]
    ModelIntegrity(String),

    #[error("mean is not finite: {0}")]
    NonFiniteMean(String),

    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },

    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("evaluation domain error in `{expr}`: {detail}")]
    EvalDomain { expr: String, detail: String },

    #[error("quantile function is not strictly increasing: Q({p1}) = {q1} but Q({p2}) = {q2}")]
    NotIncreasing { p1: f64, q1: f64, p2: f64, q2: f64 },

    #[error("integral diverges on [{a}, {b}]")]
    DivergentIntegral { a: f64, b: f64 },

    #[error("quadrature tolerance not achieved on [{a}, {b}] after {evaluations} evaluations")]
    QuadratureTolerance { a: f64, b: f64, evaluations: usize },

    #[error("function has more than {max_modes} monotonicity changes on the grid")]
    TooOscillatory { max_modes: usize },

    #[error("function is not finite at p = {0} on the working grid")]
    NonFiniteOnGrid(f64),

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("analysis refused: {0}")]
    Refused(String),

    #[error("record {record} (line {line}): {message}")]
    Data {
        record: usize,
        line: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("invalid distribution spec `{spec}`: {reason}")]
    Spec { spec: String, reason: String },

    #[error("theorem and oracle disagree: {0}")]
    MethodDisagreement(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    /// Short stable name of the variant, used in CSV cells and foreign bindings.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ProbabilityOutOfRange(_) => "probability-out-of-range",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::ModelIntegrity(_) => "model-integrity",
            Error::NonFiniteMean(_) => "non-finite-mean",
            Error::Syntax { .. } => "syntax",
            Error::UnknownFunction { .. } => "unknown-function",
            Error::UnboundParameter(_) => "unbound-parameter",
            Error::EvalDomain { .. } => "eval-domain",
            Error::NotIncreasing { .. } => "not-increasing",
            Error::DivergentIntegral { .. } => "divergent-integral",
            Error::QuadratureTolerance { .. } => "quadrature-tolerance",
            Error::TooOscillatory { .. } => "too-oscillatory",
            Error::NonFiniteOnGrid(_) => "non-finite-on-grid",
            Error::Hypothesis(_) => "hypothesis",
            Error::Refused(_) => "refused",
            Error::Data { .. } => "data",
            Error::Io(_) => "io",
            Error::Spec { .. } => "spec",
            Error::MethodDisagreement(_) => "method-disagreement",
            Error::Consistency(_) => "consistency",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
