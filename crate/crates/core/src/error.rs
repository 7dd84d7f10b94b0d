use thiserror::Error;

/// Errors raised while building or querying preference models.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable name must be non-empty")]
    EmptyName,
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` needs at least two distinct values")]
    DomainTooSmall(String),
    #[error("duplicate value `{value}` in the domain of `{var}`")]
    DuplicateValue { var: String, value: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("`{value}` is not in the domain of `{var}`")]
    UnknownValue { var: String, value: String },
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("conflicting bindings for `{0}`")]
    ConflictingBinding(String),
    #[error("assignment does not bind exactly the expected variables")]
    IncompleteOutcome,

    #[error("variable `{0}` has no CPT")]
    MissingCpt(String),
    #[error("variable `{0}` has more than one CPT")]
    DuplicateCpt(String),
    #[error("CPT of `{var}`: {reason}")]
    InvalidCpt { var: String, reason: String },
    #[error("declared edges do not match the CPT parent sets")]
    EdgeMismatch,
    #[error("the dependency graph has a cycle through `{0}`")]
    CyclicNet(String),
    #[error("no arc `{0}` -> `{1}`")]
    UnknownArc(String, String),
    #[error("CPT of `{0}` has a partial row where a total order is required")]
    PartialRowUnsupported(String),
    #[error("arc `{0}` -> `{1}` is not totally dependent")]
    NotTotallyDependent(String, String),
    #[error("bound variables are not ancestor-closed: `{0}` is an unbound ancestor")]
    NotAncestorClosed(String),

    #[error("ARI `{0}` > `{1}` orders a pair that is already joined by an arc")]
    AriNotOnNop(String, String),
    #[error("more than one ARI on the pair `{0}`, `{1}`")]
    DuplicateAri(String, String),
    #[error("the non-ordered pair `{0}`, `{1}` has no ARI")]
    NopUncovered(String, String),
    #[error("arcs and ARIs form a cycle through `{0}`")]
    CyclicCprNet(String),

    #[error("LP-tree node `{0}`: branch labels do not partition its domain")]
    LabelNotPartition(String),
    #[error("LP-tree: `{0}` appears twice on one path")]
    VariableRepeated(String),
    #[error("LP-tree: a root-to-leaf path misses `{0}`")]
    PathIncomplete(String),
    #[error("LP-tree node `{var}`: {reason}")]
    BadCptScope { var: String, reason: String },
    #[error("models are defined over different variables")]
    VariableMismatch,

    #[error("constraint: {0}")]
    InvalidConstraint(String),
    #[error("constraints and preference model use different variable sets")]
    ModelMismatch,
    #[error("the two outcomes are equal")]
    EqualOutcomes,
    #[error("{count} outcomes exceed the limit of {limit}")]
    TooManyOutcomes { count: u128, limit: u128 },
    #[error("dominance search exceeded its budget of {0} sub-calls")]
    BudgetExhausted(u64),
    #[error("sub-network has {0} parentless variables, expected exactly one")]
    NoUniqueSource(usize),

    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("{line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
