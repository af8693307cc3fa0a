use thiserror::Error;

/// Errors produced while loading data, configuring a search, or running one.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("row {row}: column count mismatch (expected {expected}, found {found})")]
    ColumnCount {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}: missing or unparsable value {value:?} in numeric column {column:?}")]
    MissingNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    Contract(String),

    /// Requested AD-tree content was never inserted. Indicates a broken
    /// enumeration order upstream, never recovered from silently.
    #[error("AD-tree cache miss: no entry for attributes {attributes:?} under condition {condition:?}")]
    CacheMiss {
        attributes: Vec<usize>,
        condition: Vec<(usize, u32)>,
    },

    #[error("memory budget exceeded: {used} bytes > cap {cap} bytes after pass {pass}; try a smaller k")]
    MemoryBudget { used: usize, cap: usize, pass: usize },

    #[error("insufficient rows: {0}")]
    InsufficientRows(String),
}

pub type Result<T> = std::result::Result<T, Error>;
