use thiserror::Error;

/// Errors raised by field, algebra, form and level operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic must be an odd prime, got {0}")]
    CharTwoOrNotPrime(u64),
    #[error("bad field tower: {0}")]
    BadTower(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation undefined for the zero element")]
    ZeroElement,
    #[error("operation requires a {expected} context")]
    WrongField { expected: &'static str },
    #[error("Cayley-Dickson parameter {index} is zero")]
    ZeroAlpha { index: usize },
    #[error("elements belong to different algebras or fields")]
    DescriptorMismatch,
    #[error("element has {got} coefficients, algebra dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("form coefficient {index} is zero")]
    ZeroCoefficient { index: usize },
    #[error("scalar multiple of a form must be nonzero")]
    ZeroScalar,
    #[error("Pfister generator {index} is zero")]
    ZeroGenerator { index: usize },
    #[error("form must start with coefficient 1 and have rank at least 2")]
    NotUnital,
    #[error("pure trace form needs algebra dimension at least 2")]
    DimensionOne,
    #[error("vector length {got} does not match form rank {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("finite algebra has {size} elements, above the limit {limit}")]
    TooLarge { size: u128, limit: u128 },
    #[error("square composition is only constructive for n in {{1, 2, 4, 8}}, got {0}")]
    UnsupportedN(usize),
    #[error("isotropy over the base field is undecided for the {0} component")]
    BaseUndecided(&'static str),
    #[error("parity certificate input `{0}` is zero")]
    ZeroInput(&'static str),
    #[error("leading product {0} vanishes: lower level has a zero divisor")]
    LeadingProductZero(&'static str),
    #[error("base field has infinite level")]
    InfiniteBaseLevel,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
