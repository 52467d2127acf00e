use thiserror::Error;

use crate::nominal::Atom;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("atom {0} occurs twice in tuple")]
    DuplicateAtom(Atom),
    #[error("tuple has length {got}, orbit dimension is {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("positional group exceeds the cap of {cap} elements")]
    GroupCap { cap: usize },
    #[error("orbit count exceeds the cap of {cap}")]
    OrbitCap { cap: usize },
    #[error("orbit index {index} out of range (set has {count} orbits)")]
    NoSuchOrbit { index: usize, count: usize },
    #[error("invalid position permutation: {0}")]
    InvalidPermutation(String),
    #[error("operands live over different carriers")]
    CarrierMismatch,
    #[error("map is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("invalid monoid: {0}")]
    InvalidMonoid(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("search budget of {limit} steps exhausted")]
    BudgetExhausted { limit: u64 },
    #[error("unknown catalog entry `{0}`")]
    UnknownName(String),
    #[error("{0}")]
    Invalid(String),
}
