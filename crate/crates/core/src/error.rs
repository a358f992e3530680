use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid ambient space: {0}")]
    InvalidSpace(String),
    #[error("index {index} out of range for {len} factors")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("index {0} is not a minimal factor (not in J)")]
    NotInJ(usize),
    #[error("subset of factors is empty")]
    EmptySubset,
    #[error("Gram matrix is singular")]
    SingularGram,
    #[error("block sizes must be sorted ascending")]
    NotSorted,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("word is not reduced: letter {0} repeats")]
    UnreducedWord(usize),
    #[error("reduction did not reach the nef cone within {0} steps")]
    IterationLimit(usize),
    #[error("coordinate {0} is negative and not in J; class cannot be moved into the nef cone")]
    NonJNegative(usize),
    #[error("operation requires every factor to be minimal (J = all factors)")]
    NotFullJ,
    #[error("pair ({i}, {j}) has b = {b} <= 2; no eigenvalue > 1 exists")]
    EllipticPair { i: usize, j: usize, b: i64 },
    #[error("class is not nef")]
    NotNef,
    #[error("volume vanishes at s = {0}; the class is not big along the sample grid")]
    ZeroVolumeSample(f64),
    #[error("coefficient {0} is negative")]
    NegativeCoefficient(usize),
    #[error("word length {0} is below 2")]
    LengthTooShort(usize),
    #[error("generator {0} does not meet the plane transversally")]
    NonTransverse(usize),
    #[error("triangle is degenerate")]
    DegenerateTriangle,
    #[error("volume polynomial has degree {0}, expected 3")]
    UnsupportedDimension(usize),
    #[error("summand has a pole at n = {0}")]
    PoleAtN(u64),
    #[error("digamma argument {0} is not positive")]
    NonPositiveArgument(f64),
    #[error("degenerate parameters: {0} vanishes or is invalid")]
    DegenerateParameters(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidSpace(_) => "invalid_space",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::NotInJ(_) => "not_in_j",
            Error::EmptySubset => "empty_subset",
            Error::SingularGram => "singular_gram",
            Error::NotSorted => "not_sorted",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::UnreducedWord(_) => "unreduced_word",
            Error::IterationLimit(_) => "iteration_limit",
            Error::NonJNegative(_) => "non_j_negative",
            Error::NotFullJ => "not_full_j",
            Error::EllipticPair { .. } => "elliptic_pair",
            Error::NotNef => "not_nef",
            Error::ZeroVolumeSample(_) => "zero_volume_sample",
            Error::NegativeCoefficient(_) => "negative_coefficient",
            Error::LengthTooShort(_) => "length_too_short",
            Error::NonTransverse(_) => "non_transverse",
            Error::DegenerateTriangle => "degenerate_triangle",
            Error::UnsupportedDimension(_) => "unsupported_dimension",
            Error::PoleAtN(_) => "pole_at_n",
            Error::NonPositiveArgument(_) => "non_positive_argument",
            Error::DegenerateParameters(_) => "degenerate_parameters",
        }
    }
}
