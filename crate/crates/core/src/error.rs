use thiserror::Error;

/// Everything that can go wrong in the algebra pipelines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operation requires a field, got {0}")]
    NonFieldDomain(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported coefficient domain for {op}: {domain}")]
    UnsupportedDomain { op: &'static str, domain: String },
    #[error("unsupported degree: {0}")]
    UnsupportedDegree(String),
    #[error("a root of {poly} is needed; re-run over the extension it defines")]
    NeedsExtension { poly: String, coefficients: Vec<String> },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid literal {literal:?} for {domain}")]
    InvalidLiteral { literal: String, domain: String },
    #[error("module shape outside the divisible-plus-bounded hypotheses: {0}")]
    NotOmegaStableShape(String),
    #[error("element is not in the module: {0}")]
    ElementNotInModule(String),
    #[error("no direct complement exists for {0}")]
    NoSplit(String),
    #[error("search bound {bound} exceeded")]
    SearchBoundExceeded { bound: usize },
    #[error("input is degenerate: {0}")]
    DegenerateInput(String),
    #[error("enumeration too large: {0}")]
    EnumerationTooLarge(String),
    #[error("module action is not well formed: {0}")]
    ActionNotWellFormed(String),
    #[error("not equicharacteristic: {0}")]
    NotEquicharacteristic(String),
    #[error("not a Lie algebra: {0}")]
    NotLie(String),
    #[error("not nilpotent: lower central series stabilizes at dimension {stable_dim}")]
    NotNilpotent { stable_dim: usize },
    #[error("nilpotency class {class} exceeds the cap {cap}")]
    ClassTooLarge { class: usize, cap: usize },
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("target field does not contain the field generated by the structure constants: {0}")]
    ExtensionNotOverK0(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("idempotent splitting did not converge after {0} probes")]
    SplittingFailed(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
