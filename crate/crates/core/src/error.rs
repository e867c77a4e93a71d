use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid binder grade: high temperature {high} must exceed low temperature {low}")]
    InvalidGrade { high: f64, low: f64 },
    #[error("invalid mixture: {field} must be {requirement}, got {value}")]
    InvalidMixture {
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("wheel pass {0} is outside [0, 20000]")]
    OutOfBoundsPass(u32),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("need at least {needed} rows, got {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("split fractions must be non-negative and sum to 1")]
    InvalidFractions,
    #[error("invalid layer dimensions: {0}")]
    BadDims(String),
    #[error("input has {found} features, network expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    Empty,
    #[error("forward cache does not match the network shape")]
    StaleCache,
    #[error("gradient shape does not match the parameter shape")]
    ShapeMismatch,
    #[error("R² undefined: a series has zero variance")]
    DegenerateVariance,
    #[error("invalid pass grid: {0}")]
    BadGrid(String),
    #[error("unknown sweep factor '{0}'")]
    UnknownFactor(String),
    #[error("invalid value '{value}' for factor {factor}")]
    BadFactorValue { factor: &'static str, value: String },
    #[error("fracture-energy threshold is not set")]
    MissingThreshold,
    #[error("fracture energy must be non-negative, got {0}")]
    NegativeFractureEnergy(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

impl Error {
    /// Stable machine-readable name, used on the wire and on stderr.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidGrade { .. } => "InvalidGrade",
            Error::InvalidMixture { .. } => "InvalidMixture",
            Error::OutOfBoundsPass(_) => "OutOfBoundsPass",
            Error::EmptyDataset => "EmptyDataset",
            Error::InsufficientData { .. } => "InsufficientData",
            Error::InvalidFractions => "InvalidFractions",
            Error::BadDims(_) => "BadDims",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::Empty => "Empty",
            Error::StaleCache => "StaleCache",
            Error::ShapeMismatch => "ShapeMismatch",
            Error::DegenerateVariance => "DegenerateVariance",
            Error::BadGrid(_) => "BadGrid",
            Error::UnknownFactor(_) => "UnknownFactor",
            Error::BadFactorValue { .. } => "BadFactorValue",
            Error::MissingThreshold => "MissingThreshold",
            Error::NegativeFractureEnergy(_) => "NegativeFractureEnergy",
            Error::InvalidConfig(_) => "InvalidConfig",
        }
    }
}
