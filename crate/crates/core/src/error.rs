use std::path::PathBuf;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid phoneme {ch:?} at position {position}")]
    InvalidPhoneme { position: usize, ch: char },
    #[error("empty input")]
    EmptyInput,
    #[error("{source_name}:{line}: malformed row: {reason}")]
    MalformedRow {
        source_name: String,
        line: usize,
        reason: String,
    },
    #[error("duplicate rule id `{0}`")]
    DuplicateRule(String),
    #[error("conflicting rules for {u}|{v} ({context})")]
    ConflictingRule {
        u: String,
        v: String,
        context: String,
    },
    #[error("unknown phase `{0}`")]
    UnknownPhase(String),
    #[error("Accept is not reachable from Start")]
    NoAcceptPath,
    #[error("{source_name}:{line}: negative count")]
    NegativeCount { source_name: String, line: usize },
    #[error("{source_name}:{line}: zero count")]
    ZeroCount { source_name: String, line: usize },
    #[error("transition `{rule_id}` does not match the loaded rule table")]
    RuleMismatch { rule_id: String },
    #[error("reports cover different corpora ({0} vs {1} items)")]
    DifferentCorpora(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
