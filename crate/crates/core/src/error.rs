use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order relation has a cycle through `{0}` and `{1}`")]
    Cycle(String, String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("operation undefined on the empty poset")]
    EmptyPoset,
    #[error("{what}: {count} exceeds the limit of {limit}")]
    GuardExceeded {
        what: &'static str,
        count: u128,
        limit: u128,
    },
    #[error("set is not a down-set of the codomain")]
    NotDownSet,
    #[error("set family is not a topology: {0}")]
    NotATopology(&'static str),
    #[error("element `{0}` is not a beat point")]
    NotABeatPoint(String),
    #[error("poset has height {0}, expected at most 1")]
    HeightExceeded(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
