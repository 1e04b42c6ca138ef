use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("database contains no sequences")]
    EmptyDatabase,
    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),
    #[error("unknown item id {0}")]
    UnknownItemId(u32),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate sequence id {0:?}")]
    DuplicateSequenceId(String),
    #[error("cannot parse pattern {0:?}")]
    PatternSyntax(String),

    #[error("line {line}: malformed record ({reason})")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: event id {value:?} is not an integer")]
    NonIntegerEventId { line: usize, value: String },
    #[error("sequence {sequence_id:?}: duplicate event id {event_id}")]
    DuplicateEventId { sequence_id: String, event_id: i64 },
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("line {line}: column {column:?} has non-numeric value {value:?}")]
    InvalidNumber {
        line: usize,
        column: String,
        value: String,
    },
    #[error("sequence {0:?}: events carry different group labels")]
    InconsistentGroup(String),
    #[error("sequence {0:?}: timestamps decrease")]
    NonMonotonicTimestamp(String),
    #[error("expected {expected} but got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("sequence {0:?}: itemset with more than one item")]
    MultiItemItemset(String),
    #[error("sequence {sequence_id:?} position {position}: missing attribute {attribute:?}")]
    MissingAttribute {
        sequence_id: String,
        position: usize,
        attribute: String,
    },
    #[error("sequence {0:?}: event without timestamp")]
    MissingTimestamp(String),
    #[error("sequence {0:?}: event without actor")]
    MissingActor(String),
    #[error("line {line}: invalid rule ({reason})")]
    InvalidRule { line: usize, reason: String },

    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("contingency table has a zero marginal")]
    ZeroMarginal,
    #[error("value {0} outside [0, 1]")]
    OutOfRange(f64),

    #[error("expected exactly 2 groups, found {0}")]
    NotTwoGroups(usize),
    #[error("group {group:?} has {size} sequences; at least 2 required")]
    GroupTooSmall { group: String, size: usize },
    #[error("at least 2 bins required, got {0}")]
    TooFewBins(usize),
    #[error("sequence {0:?} has no group label")]
    MissingGroup(String),
    #[error("rule metrics need a pattern of at least 2 itemsets, got {0}")]
    PatternTooShort(usize),
    #[error("a rule component has zero support")]
    ZeroComponentSupport,
    #[error("every sequence was excluded")]
    AllSequencesExcluded,

    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by the requested parameters rather than the input data.
    pub fn is_constraint_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConstraints(_) | Error::TooFewBins(_) | Error::InstanceTooLarge(_)
        )
    }
}
