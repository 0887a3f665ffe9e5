use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("could not parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("{what} exceeds cap of {cap}")]
    CapExceeded { what: &'static str, cap: usize },

    #[error("group is trivial")]
    TrivialGroup,

    #[error("group is not abelian")]
    NotAbelian,

    #[error("group is not transitive")]
    NotTransitive,

    #[error("no nonidentity element commutes with all of its conjugates")]
    NoAbelianWitness,

    #[error("no nontrivial abelian normal subgroup")]
    NoAbelianNormalSubgroup,

    #[error("{0} is not coprime to the exponent {1}")]
    UnitNotCoprime(u64, u64),

    #[error("conjugator {0} does not normalize the subgroup")]
    NotNormalizing(String),

    #[error("set is not closed under the action")]
    NotActionClosed,

    #[error("place is ramified in the action; only capped valuations are available")]
    IrregularClass,

    #[error("empty valuation list")]
    EmptyValuations,

    #[error("cohomology count inconsistency: {0}")]
    CohomologyDefect(String),

    #[error("s = {s} is not to the right of the pole at {pole}")]
    LeftOfPole { s: f64, pole: f64 },

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("invalid abelian group: {0}")]
    InvalidAbelianGroup(String),

    #[error("pairing is not well defined: {0}")]
    PairingNotBilinear(String),

    #[error("pairing is not perfect")]
    PairingNotPerfect,

    #[error("zero local H^0 size")]
    ZeroH0,

    #[error("inconsistent subgroup data: {0}")]
    InconsistentSubgroups(String),

    #[error("invalid homomorphism: {0}")]
    InvalidHom(String),

    #[error("degenerate fitting grid: {0}")]
    DegenerateGrid(String),
}
