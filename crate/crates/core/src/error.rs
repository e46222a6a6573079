use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("unsupported characteristic {0}: need an odd prime below 2^31")]
    UnsupportedPrime(u64),
    #[error("field order {p}^{r} does not fit below 2^63")]
    Overflow { p: u64, r: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("label {label} out of range for q = {q}")]
    LabelOutOfRange { label: u64, q: u64 },
    #[error("q = {q} is not congruent to 1 mod 4")]
    BadCongruence { q: u64 },
    #[error("invalid base {0}")]
    BadBase(u64),
    #[error("outside the admissible window: {0}")]
    OutOfWindow(String),
    #[error("q does not have the required form: {0}")]
    BadForm(String),
    #[error("zero polynomial has no root multiplicity")]
    ZeroPolynomial,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("binomial hypothesis fails for n = {n}, q = {q}")]
    HypothesisFails { n: u64, q: u64 },
    #[error("vertex list is not a clique")]
    NotAClique,
    #[error("n = {n} outside [2, {size}]")]
    NOutOfRange { n: u64, size: u64 },
    #[error("no n >= 2 satisfies the binomial hypothesis for a clique of size {size} in q = {q}")]
    NoAdmissibleN { q: u64, size: u64 },
    #[error("inadmissible m: {0}")]
    PreconditionM(String),
    #[error("bad subset: {0}")]
    BadSubset(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::UnsupportedPrime(_) => "UnsupportedPrime",
            Error::Overflow { .. } => "Overflow",
            Error::NotPrimePower(_) => "NotPrimePower",
            Error::BadModulus(_) => "BadModulus",
            Error::FieldMismatch => "FieldMismatch",
            Error::DivisionByZero => "DivisionByZero",
            Error::LabelOutOfRange { .. } => "LabelOutOfRange",
            Error::BadCongruence { .. } => "BadCongruence",
            Error::BadBase(_) => "BadBase",
            Error::OutOfWindow(_) => "OutOfWindow",
            Error::BadForm(_) => "BadForm",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::HypothesisFails { .. } => "HypothesisFails",
            Error::NotAClique => "NotAClique",
            Error::NOutOfRange { .. } => "NOutOfRange",
            Error::NoAdmissibleN { .. } => "NoAdmissibleN",
            Error::PreconditionM(_) => "PreconditionM",
            Error::BadSubset(_) => "BadSubset",
        }
    }
}
