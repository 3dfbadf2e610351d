use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("letter {letter} outside alphabet of rank {rank}")]
    LetterOutOfRange { letter: i64, rank: u32 },
    #[error("rank must be at least {min}, got {rank}")]
    Rank { rank: u32, min: u32 },
    #[error("empty word where a nonempty one is required")]
    EmptyWord,
    #[error("cannot parse word: {0}")]
    Parse(String),
    #[error("invalid core automaton: {0}")]
    InvalidCore(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("sequence not admissible at index {index}: {detail}")]
    Inadmissible { index: usize, detail: String },
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error("embedding fails at ({0}, {1})")]
    Embedding(usize, usize),
    #[error("malformed input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
