use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least 2 colors, got q = {0}")]
    TooFewColors(usize),

    #[error("color {color} outside [1, {q}]")]
    InvalidColor { color: usize, q: usize },

    #[error("messages have mismatched lengths ({expected} vs {found})")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("update needs at least one child message")]
    NoChildren,

    #[error("invalid message: {0}")]
    InvalidMessage(String),

    /// The product sum in the update vanished: the sub-instance admits no coloring.
    #[error("zero denominator in message update (unsatisfiable sub-instance)")]
    ZeroDenominator,

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("root is pinned; its marginal is a point mass")]
    RootPinned,

    #[error("subtree has {free} free vertices, enumeration cap is {cap}")]
    CapExceeded { free: usize, cap: usize },

    #[error("no proper coloring is consistent with the boundary")]
    Unsatisfiable,

    #[error("tree with b = {b}, depth = {depth} exceeds the node budget of {budget}")]
    BudgetExceeded { b: usize, depth: usize, budget: usize },

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("invalid boundary pair: {0}")]
    InvalidBoundaryPair(String),

    #[error("no satisfiable boundary pair found after {0} attempts")]
    RetriesExhausted(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("c*b = {product} is within {guard:e} of an integer for b = {b}")]
    CeilingAmbiguous { b: u64, product: f64, guard: f64 },

    #[error("sampler could not produce a member of {0}")]
    SamplerStuck(String),

    #[error("{lemma} is not defined for q = {q}, b = {b}: {reason}")]
    UnsupportedRegime {
        lemma: String,
        q: usize,
        b: usize,
        reason: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
