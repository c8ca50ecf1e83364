use alloc::string::String;
use core::fmt;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input text was blank.
    EmptyInput,
    /// Script and summary (or two inputs) belong to different movies.
    MovieMismatch { left: String, right: String },
    /// Two vectors or matrices disagree on a dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// A scene or sentence index fell outside its valid range.
    IndexOutOfRange { index: usize, len: usize },
    /// Predicted and gold label vectors differ in length.
    LengthMismatch { expected: usize, found: usize },
    /// All three annotators left a sentence empty.
    EmptyUnion { sentence: usize },
    /// An annotation set that must be non-empty was empty.
    EmptySet,
    /// Embedding contains NaN or infinity.
    NonFinite { row: usize, col: usize },
    /// Training data contains a single class.
    DegenerateLabels,
    /// Fewer movies than folds.
    TooFewMovies { movies: usize, folds: usize },
    /// No scene was marked salient and the fallback is `Error`.
    NoSalientScenes,
    /// A configuration value is outside its domain.
    InvalidConfig(String),
    /// Inputs for the same corpus do not agree with each other.
    InconsistentCorpus(String),
    /// An internal invariant was violated.
    Invariant(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => f.write_str("input is empty"),
            Error::MovieMismatch { left, right } => {
                write!(f, "movie id mismatch: {left:?} vs {right:?}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::EmptyUnion { sentence } => {
                write!(f, "sentence {sentence}: all annotators selected no scene")
            }
            Error::EmptySet => f.write_str("annotation set is empty"),
            Error::NonFinite { row, col } => {
                write!(f, "non-finite embedding value at row {row}, column {col}")
            }
            Error::DegenerateLabels => f.write_str("training labels contain a single class"),
            Error::TooFewMovies { movies, folds } => {
                write!(f, "{movies} movies is fewer than {folds} folds")
            }
            Error::NoSalientScenes => f.write_str("no scene is marked salient"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::InconsistentCorpus(msg) => write!(f, "inconsistent corpus: {msg}"),
            Error::Invariant(msg) => write!(f, "invariant violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
