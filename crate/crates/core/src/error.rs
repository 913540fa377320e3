use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("probability {0} is outside (0,1)")]
    BadProbability(String),
    #[error("invalid action vector: {0}")]
    InvalidVector(String),
    #[error("definition of `{0}` is not weakly guarded")]
    NotWeaklyGuarded(String),
    #[error("{feature} is disabled in this mode: {what}")]
    FeatureDisabled { feature: &'static str, what: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown data state `{0}`")]
    UnknownState(String),
    #[error("no effect declared for `{action}` in state `{state}`")]
    MissingEffect { action: String, state: String },
    #[error("states `{0}` and `{1}` have no declared join")]
    NonJoinableStates(String, String),
    #[error("past event with key {0} has no recorded history and no inverse effect")]
    UnknownKey(u32),
    #[error("model error: {0}")]
    Model(String),
    #[error("unguarded recursion while unfolding `{0}`")]
    UnguardedRecursion(String),
    #[error("state space exceeds {0} configurations")]
    StateSpaceBoundExceeded(usize),
    #[error("systems were built over different data-state models")]
    IncompatibleModels,
    #[error("search bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("oracle input too large: {0} configurations")]
    TooLarge(usize),
    #[error("partition is not stable")]
    UnstablePartition,
    #[error("term does not have the required shape: {0}")]
    Shape(String),
}
