use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed interval: {0}")]
    MalformedInterval(String),
    #[error("axis domains differ")]
    AxisMismatch,
    #[error("sets belong to different ground schemas")]
    SchemaMismatch,
    #[error("unknown point or strand `{0}`")]
    UnknownPoint(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("axiom violated at point `{0}`: it is not in its own minimal vicinity")]
    AxiomViolation(String),
    #[error("filter kernel is empty")]
    EmptyKernel,
    #[error("subspace is empty")]
    EmptySubspace,
    #[error("spaces have different point sets")]
    PointSetMismatch,
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("vicinity rules leave points uncovered on strand `{0}`")]
    PatternGap(String),
    #[error("vicinity rules overlap on strand `{0}`")]
    PatternOverlap(String),
    #[error("vicinity rule {0} is not monotone in its parameter")]
    NonMonotoneRule(usize),
    #[error("vicinity rule {0} does not contain its own point")]
    SelfMembershipViolation(usize),
    #[error("unknown builtin space `{0}`")]
    UnknownBuiltin(String),
    #[error("result leaves the decidable fragment: {0}")]
    FragmentEscape(String),
    #[error("truncation window too small: need at least {0}")]
    WindowTooSmall(i64),
    #[error("not a topology: {0}")]
    InvalidTopology(String),
    #[error("preimage of the filter kernel is empty")]
    EmptyPreimage,
    #[error("map is not surjective: `{0}` has an empty fiber")]
    NotSurjective(String),
    #[error("subspace is not dense in the extension")]
    NotDense,
    #[error("extensions are built over different base sets")]
    DifferentBase,
    #[error("image trace of end `{0}` cannot be classified")]
    UnclassifiableImageTrace(String),
    #[error("set literal: {0}")]
    Literal(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
}
