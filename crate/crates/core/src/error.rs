use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector length {got} does not match index size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
    #[error("invalid lattice specification: {0}")]
    InvalidLattice(String),
    #[error("invalid Orlicz function: {0}")]
    InvalidOrlicz(String),
    #[error("level {level} is unreachable by the Orlicz function on the search horizon")]
    UnreachableLevel { level: f64 },
    #[error("subset size {size} outside 1..={max}")]
    SubsetSize { size: usize, max: usize },
    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("elements belong to different E-sum algebras")]
    MismatchedParents,
    #[error("summand {0} is not unital with a unit of norm one")]
    NotUnital(usize),
    #[error("invalid J-system: {0}")]
    InvalidSystem(String),
    #[error("index chain must be nonempty, strictly increasing and within the horizon")]
    InvalidChain,
    #[error("brute-force horizon {0} exceeds the enumeration limit")]
    HorizonTooLarge(usize),
    #[error("system carries no algebra structure")]
    NotAnAlgebra,
    #[error("coherence violated at level {0}")]
    CoherenceViolated(usize),
    #[error("functional lies in the annihilator of commutators (distance {0})")]
    CentralFunctional(f64),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
