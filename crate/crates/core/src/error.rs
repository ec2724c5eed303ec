use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("observer exceeded the cap of {cap} reachable subsets")]
    ObserverBlowup { cap: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("input automaton #{0} is not deterministic")]
    InputNotDeterministic(usize),

    #[error("malformed formula: {0}")]
    MalformedFormula(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown event `{0}`")]
    UnknownEvent(String),

    #[error("duplicate state `{0}`")]
    DuplicateState(String),

    #[error("duplicate event `{0}`")]
    DuplicateEvent(String),

    #[error("invalid event name `{0}`")]
    InvalidEventName(String),

    #[error("invalid state name `{0}`")]
    InvalidStateName(String),

    #[error("automaton has no initial state")]
    NoInitialState,

    #[error("alphabets differ: {0}")]
    AlphabetMismatch(String),

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("DIMACS parse error on line {line}: {message}")]
    Dimacs { line: usize, message: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
