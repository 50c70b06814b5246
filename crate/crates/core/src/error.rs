use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(String),
    #[error("characteristic {0} is outside the supported range (5 <= p < 2^31)")]
    UnsupportedCharacteristic(String),
    #[error("no irreducible polynomial of degree {degree} over F_{p} found within the attempt budget")]
    SearchExhausted { p: u64, degree: usize },
    #[error("operands belong to different fields")]
    DescriptorMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} does not divide the field degree {1}")]
    NotADivisor(usize, usize),

    #[error("F is not monic")]
    NotMonic,
    #[error("degree out of range: {0}")]
    DegreeOutOfRange(String),
    #[error("curve is singular at x = {0}")]
    SingularCurve(String),
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("enumeration over a field of size {0} exceeds the 2^24 guard")]
    TooLarge(String),

    #[error("Mumford invariant violated: {0}")]
    InvariantViolation(String),
    #[error("evaluation divisor meets the support of a Miller function")]
    ZeroEncountered,
    #[error("r = {0} does not divide the group order")]
    NoTorsion(u64),
    #[error("sampling retries exhausted")]
    RetriesExhausted,
    #[error("eigenvalue {0} is a repeated root of P(x) mod r")]
    ProjectionDegenerate(u64),

    #[error("leading term vanishes: expected pole order {expected}, found {found}")]
    OrderMismatch { expected: i64, found: i64 },
    #[error("h(s) is not divisible by r")]
    BadH,
    #[error("divisor is not in the required Frobenius eigenspace")]
    NotInEigenspace,
    #[error("sum h_i q^i does not equal m r")]
    BadExpansion,
    #[error("invalid pairing spec: {0}")]
    BadSpec(String),
    #[error("twist exponent {0} does not divide k = {1}")]
    BadTwistExponent(u64, u64),
    #[error("final exponentiation of zero")]
    ZeroInput,
    #[error("unknown pairing '{0}'")]
    UnknownPairing(String),
    #[error("{0} and {1} are not coprime")]
    NotCoprime(String, String),
    #[error("invalid pairing context: {0}")]
    InvalidContext(String),

    #[error("parse error at {pointer}: {message}")]
    Parse { pointer: String, message: String },
}

impl Error {
    pub fn parse(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
