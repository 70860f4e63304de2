use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every domain failure the library can report. Each variant carries a
/// stable kebab-case name (see [`Error::name`]) that the CLI prints.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("endpoint {vertex} out of range for a graph with {n} vertices")]
    EndpointOutOfRange { vertex: usize, n: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("enumeration limit of {0} exceeded")]
    LimitExceeded(u64),
    #[error("maximum out-degree {found} exceeds the bound {bound}")]
    DegreeBoundViolated { found: usize, bound: usize },
    #[error("colouring side condition violated: {0}")]
    ColouringSideCondition(String),
    #[error("invalid colouring: {0}")]
    InvalidColouring(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("edge variable {0} is not assigned")]
    UnassignedVariable(usize),
    #[error("edge variable {var} does not name an edge (graph has {edges} edges)")]
    UnknownEdgeVariable { var: i64, edges: usize },
    #[error("symbol not interpreted: {0}")]
    SymbolNotInterpreted(String),
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("formula is {found}-local, bound is {bound}")]
    LocalityViolated { found: usize, bound: usize },
    #[error("formula has arity {found}, bound is {bound}")]
    ArityViolated { found: usize, bound: usize },
    #[error("path length {0} is too small (need n >= 2)")]
    NTooSmall(usize),
    #[error("vocabulary mismatch: {0}")]
    VocabularyMismatch(String),
    #[error("k = {k} out of range for dimension {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("invalid clow sequence: {0}")]
    InvalidClowSequence(String),
    #[error("diagonal entry ({0}, {0}) is not 1")]
    DiagonalNotUnit(usize),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("program is not layered: {0}")]
    NotLayered(String),
    #[error("bad bit label: {0}")]
    BadBitLabel(String),
    #[error("source or sink misplaced: {0}")]
    SourceSinkMisplaced(String),
    #[error("bad node label: {0}")]
    BadNodeLabel(String),
    #[error("input width mismatch: {0}")]
    WidthMismatch(String),
    #[error("program is not deterministic given y: {0}")]
    NotDeterministic(String),
    #[error("{0} nondeterministic bits exceed the enumeration cap")]
    TooManyYBits(usize),
    #[error("y-read order property violated: {0}")]
    OrderPropertyViolated(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("side condition violated: {0}")]
    SideConditionViolated(String),
    #[error("graph is not a DAG")]
    NotADag,
    #[error("s and t must differ")]
    SEqualsT,
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable identifier used on the command line and in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EndpointOutOfRange { .. } => "endpoint-out-of-range",
            Error::DuplicateEdge(..) => "duplicate-edge",
            Error::LimitExceeded(_) => "limit-exceeded",
            Error::DegreeBoundViolated { .. } => "degree-bound-violated",
            Error::ColouringSideCondition(_) => "colouring-side-condition-violated",
            Error::InvalidColouring(_) => "invalid-colouring",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::UnassignedVariable(_) => "unassigned-variable",
            Error::UnknownEdgeVariable { .. } => "unknown-edge-variable",
            Error::SymbolNotInterpreted(_) => "symbol-not-interpreted",
            Error::InvalidFormula(_) => "invalid-formula",
            Error::InvalidStructure(_) => "invalid-structure",
            Error::LocalityViolated { .. } => "locality-violated",
            Error::ArityViolated { .. } => "arity-violated",
            Error::NTooSmall(_) => "n-too-small",
            Error::VocabularyMismatch(_) => "vocabulary-mismatch",
            Error::KOutOfRange { .. } => "k-out-of-range",
            Error::InvalidClowSequence(_) => "invalid-clow-sequence",
            Error::DiagonalNotUnit(_) => "diagonal-not-unit",
            Error::InvalidMatrix(_) => "invalid-matrix",
            Error::NotLayered(_) => "not-layered",
            Error::BadBitLabel(_) => "bad-bit-label",
            Error::SourceSinkMisplaced(_) => "source-sink-misplaced",
            Error::BadNodeLabel(_) => "bad-node-label",
            Error::WidthMismatch(_) => "width-mismatch",
            Error::NotDeterministic(_) => "not-deterministic",
            Error::TooManyYBits(_) => "too-many-y-bits",
            Error::OrderPropertyViolated(_) => "order-property-violated",
            Error::PreconditionViolated(_) => "precondition-violated",
            Error::SideConditionViolated(_) => "side-condition-violated",
            Error::NotADag => "not-a-dag",
            Error::SEqualsT => "s-equals-t",
            Error::FileNotFound(_) => "file-not-found",
            Error::Parse(_) => "parse-error",
            Error::Io(_) => "io-error",
        }
    }
}
