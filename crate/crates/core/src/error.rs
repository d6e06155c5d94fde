use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed descriptor `{0}`")]
    Descriptor(String),
    #[error("group axiom violated: {0}")]
    GroupAxiom(String),
    #[error("elements do not form a subgroup: {0}")]
    NotSubgroup(String),
    #[error("subgroup is not normal: conjugating by {conjugator} sends {element} outside")]
    NotNormal { conjugator: usize, element: usize },
    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded { what: String, size: usize, cap: usize },
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("cochain is not a cocycle (first violation at {0:?})")]
    NotCocycle(Vec<usize>),
    #[error("cochain is not normalized (nonzero at {0:?})")]
    NotNormalized(Vec<usize>),
    #[error("incompatible module action: {0}")]
    IncompatibleAction(String),
    #[error("monoidal coherence fails: {0}")]
    Coherence(String),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error("orthogonal splitting failed: {0}")]
    Splitting(String),
    #[error("unresolved obstruction: {0}")]
    Unresolved(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors that stem from malformed user input (CLI exit code 2).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Descriptor(_) | Error::Parse(_) | Error::Io(_) | Error::GroupAxiom(_)
        )
    }
}
