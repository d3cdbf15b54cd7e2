use std::fmt;

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Column-tagged syntax error from the profile expression parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    /// 1-based column of the offending character.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("geodesic curvature undefined at s = {s}: curvature {kappa:e} below floor")]
    SigmaUndefined { s: f64, kappa: f64 },
    #[error("axis undefined: Darboux vector vanishes")]
    AxisUndefined,
    #[error("frame collapse: vectors nearly dependent (condition {condition:e})")]
    FrameCollapse { condition: f64 },
    #[error("profile evaluation failed at s = {s}: {reason}")]
    ProfileEval { s: f64, reason: String },
    #[error("negative curvature at {} sample(s), first at s = {}", locations.len(), locations.first().copied().unwrap_or(f64::NAN))]
    NegativeCurvature { locations: Vec<f64> },
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("curve is not regular: {0}")]
    NotRegular(String),
    #[error("level {level} unavailable: {reason}")]
    LevelUnavailable { level: usize, reason: String },
    #[error("curve is unclassifiable: {0}")]
    Unclassifiable(String),
    #[error("no tower level up to depth {depth} is a slant helix")]
    NotNkSlant { depth: usize },
    #[error("N_{level}-slant helix but Darboux length is not constant")]
    NkSlantOnly { level: usize },
    #[error("syntax error at {0}")]
    Syntax(SyntaxError),
    #[error("unknown identifier `{name}` at column {column}")]
    UnknownIdentifier { name: String, column: usize },
    #[error("function `{name}` takes one argument, got {got} (column {column})")]
    ArityMismatch { name: String, got: usize, column: usize },
    #[error("malformed input: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code, used in error JSON and by the C ABI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonFinite(_) => "NON_FINITE",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::SigmaUndefined { .. } => "SIGMA_UNDEFINED",
            Error::AxisUndefined => "AXIS_UNDEFINED",
            Error::FrameCollapse { .. } => "FRAME_COLLAPSE",
            Error::ProfileEval { .. } => "PROFILE_EVAL_ERROR",
            Error::NegativeCurvature { .. } => "NEGATIVE_CURVATURE",
            Error::InsufficientSamples { .. } => "INSUFFICIENT_SAMPLES",
            Error::NotRegular(_) => "NOT_REGULAR",
            Error::LevelUnavailable { .. } => "LEVEL_UNAVAILABLE",
            Error::Unclassifiable(_) => "UNCLASSIFIABLE",
            Error::NotNkSlant { .. } => "NOT_NK_SLANT",
            Error::NkSlantOnly { .. } => "NK_SLANT_ONLY",
            Error::Syntax(_) => "SYNTAX_ERROR",
            Error::UnknownIdentifier { .. } => "UNKNOWN_IDENTIFIER",
            Error::ArityMismatch { .. } => "ARITY_MISMATCH",
            Error::Format(_) => "FORMAT_ERROR",
            Error::Io(_) => "IO_ERROR",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
