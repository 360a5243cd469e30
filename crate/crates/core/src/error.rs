use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group closure exceeded the cap of {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("matrix is not invertible over the integers: {0}")]
    NotUnimodular(String),
    #[error("element is not in the group: {0}")]
    NotASubgroupElement(String),
    #[error("lattices are defined over different groups")]
    GroupMismatch,
    #[error("sublattice is not invariant: {0}")]
    NotInvariant(String),
    #[error("action is not by permutation matrices in this basis")]
    NotPermutationInThisBasis,
    #[error("map is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid rank: {0}")]
    InvalidRank(String),
    #[error("invalid residue: {0}")]
    InvalidResidue(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cochain size {needed} exceeds the budget of {cap} cells")]
    BudgetExceeded { needed: u128, cap: u128 },
    #[error("group is not elementary abelian")]
    NotElementaryAbelian,
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("hypotheses violated: {0}")]
    HypothesesViolated(String),
    #[error("parity violation: {0}")]
    ParityViolation(String),
    #[error("invalid prime: {0}")]
    InvalidPrime(String),
    #[error("unsupported root system type: {0}")]
    UnsupportedType(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("construction failed verification: {0}")]
    ConstructionFailed(String),
    #[error("n = {0} is even; the outer resolution needs odd n")]
    EvenN(usize),
    #[error("lattice is not on the quasi-permutation list: {0}")]
    NotOnPositiveList(String),
}

pub type Result<T> = std::result::Result<T, Error>;
