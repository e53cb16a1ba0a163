use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}` in universe")]
    DuplicateVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("variable universe must not be empty")]
    EmptyUniverse,
    #[error("clause contains both `{0}` and its negation")]
    TautologicalClause(String),
    #[error("operation needs a non-empty clause")]
    EmptyClause,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("formulas are over different variable universes")]
    UniverseMismatch,
    #[error("formula is not Horn")]
    NotHorn,
    #[error("universe of {vars} variables exceeds the limit of {limit}")]
    UniverseTooLarge { vars: usize, limit: usize },
    #[error("set of {size} elements exceeds the limit of {limit}")]
    SetTooLarge { size: usize, limit: usize },
    #[error("model set is not closed under componentwise AND")]
    NotClosed,
    #[error("model set is empty")]
    EmptyModelSet,
    #[error("`{0}` is not a model-based formalism")]
    NotModelBased(String),
    #[error("unknown formalism `{0}`")]
    UnknownFormalism(String),
    #[error("the base formula is unsatisfiable")]
    UnsatisfiableBase,
    #[error("the update formula is unsatisfiable")]
    UnsatisfiableUpdate,
    #[error("no linear-time algorithm applies; semantic fallback required")]
    NeedsSemanticFallback,
    #[error("core index {index} out of range 1..={count}")]
    BadIndex { index: usize, count: usize },
    #[error("formula is not pure: clause {0} mixes polarities")]
    NotPure(usize),
    #[error("invalid graph or hypergraph: {0}")]
    InvalidGraph(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("duplicate knowledge base item name `{0}`")]
    DuplicateItem(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
