use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("unknown symbol {symbol:?} at position {position}")]
    UnknownSymbol { position: usize, symbol: char },
    #[error("record {id:?} has no sequence")]
    EmptyRecord { id: String },
    #[error("sequence data before the first header at line {line}")]
    MissingHeader { line: usize },
    #[error("database contains no records")]
    EmptyDatabase,
    #[error("position {position} outside text of length {len}")]
    OutOfRange { position: usize, len: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndexError {
    #[error("empty text")]
    EmptyText,
    #[error("invalid symbol code {0}")]
    InvalidSymbol(u8),
    #[error("empty SA range")]
    EmptyRange,
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported index format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("checksum mismatch (stored {stored:#010x}, computed {computed:#010x})")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("index file truncated")]
    Truncated,
    #[error("malformed index: {0}")]
    Malformed(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoringError {
    #[error("invalid scoring scheme: {0}")]
    InvalidScheme(String),
    #[error("threshold {h} is infeasible: minimum length {min_len} exceeds maximum {l_max}")]
    InfeasibleThreshold { h: i32, min_len: usize, l_max: usize },
    #[error("threshold must be at least 1")]
    NonPositiveThreshold,
    #[error("parameter {0} must be positive")]
    NonPositiveParameter(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FilterError {
    #[error("query of length {m} is shorter than q = {q}")]
    QueryTooShort { m: usize, q: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("G-matrix of {cells} bits exceeds the gate of {limit} bits")]
    GMatrixTooLarge { cells: u64, limit: u64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("alphabet size {0} is too small (needs at least 3)")]
    SigmaTooSmall(usize),
    #[error("bound diverges: k2 = {k2} >= sigma = {sigma}")]
    Divergent { k2: f64, sigma: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("oracle mode limited to {limit} cells, requested {cells}")]
    OracleTooLarge { cells: u64, limit: u64 },
    #[error("filtering ratio needs a baseline entry count")]
    MissingBaseline,
    #[error("query symbol code {0} outside the index alphabet")]
    AlphabetMismatch(u8),
    #[error("cannot start worker pool: {0}")]
    ThreadPool(String),
}
