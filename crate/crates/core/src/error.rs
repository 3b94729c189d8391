use thiserror::Error;

/// Errors raised by the engine.
///
/// Every variant maps to a stable `code()` and an originating `module()`, which
/// the CLI reports verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("specialization of a floored value is ill-defined")]
    FlooredValue,
    #[error("product of two framed monomials")]
    FramingOverflow,
    #[error("series have different truncation policies or pairings")]
    PolicyMismatch,
    #[error("binomial factor needs a non-constant monomial")]
    EmptyMonomial,
    #[error("constant term is not a unit: {0}")]
    NonUnitConstantTerm(String),
    #[error("division is only supported in the unframed commutative torus")]
    FramedDivision,
    #[error("scalar is not a signed power of L^(1/2): {0}")]
    NonUnitScalar(String),
    #[error("vertex index {index} out of range for {n} vertices")]
    BadVertex { index: usize, n: usize },

    #[error("labels have {found_b} B and {found_t} T, expected {n0} and {n1}")]
    BadCounts { n0: usize, n1: usize, found_b: usize, found_t: usize },
    #[error("need n0 >= 1 and 0 <= n1 <= n0, got n0 = {n0}, n1 = {n1}")]
    BadRange { n0: usize, n1: usize },
    #[error("label {0:?} is not B or T")]
    BadLabel(char),
    #[error("path is not closed")]
    NotClosed,
    #[error("edge {0} is not an edge of the quiver")]
    UnknownEdge(usize),

    #[error("infinite products need an L-floor in the truncation policy")]
    MissingFloor,
    #[error("stability parameter is not generic: zeta.alpha = 0 for alpha = {0:?}")]
    NonGenericZeta(Vec<u32>),
    #[error("closed product and truncated ratio disagree at {monomial:?}: {closed} vs {ratio}")]
    StrategyMismatch { monomial: Vec<i64>, closed: String, ratio: String },
    #[error("interval [{a}, {b}] is not inside [1, {max}]")]
    BadInterval { a: usize, b: usize, max: usize },
    #[error("stability parameter has {found} entries, quiver has {expected} vertices")]
    ZetaLength { expected: usize, found: usize },

    #[error("series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("peeling produced a non-integer exponent at {0:?}")]
    NonIntegerExponent(Vec<u32>),
    #[error("series coefficients must be unfloored")]
    FlooredSeries,

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::FlooredValue => "FlooredValue",
            Error::FramingOverflow => "FramingOverflow",
            Error::PolicyMismatch => "PolicyMismatch",
            Error::EmptyMonomial => "EmptyMonomial",
            Error::NonUnitConstantTerm(_) => "NonUnitConstantTerm",
            Error::FramedDivision => "FramedDivision",
            Error::NonUnitScalar(_) => "NonUnitScalar",
            Error::BadVertex { .. } => "BadVertex",
            Error::BadCounts { .. } => "BadCounts",
            Error::BadRange { .. } => "BadRange",
            Error::BadLabel(_) => "BadLabel",
            Error::NotClosed => "NotClosed",
            Error::UnknownEdge(_) => "UnknownEdge",
            Error::MissingFloor => "MissingFloor",
            Error::NonGenericZeta(_) => "NonGenericZeta",
            Error::StrategyMismatch { .. } => "StrategyMismatch",
            Error::BadInterval { .. } => "BadInterval",
            Error::ZetaLength { .. } => "ZetaLength",
            Error::NonzeroConstantTerm => "NonzeroConstantTerm",
            Error::NonIntegerExponent(_) => "NonIntegerExponent",
            Error::FlooredSeries => "FlooredSeries",
            Error::Parse(_) => "Parse",
        }
    }

    /// Module the error originates from.
    pub fn module(&self) -> &'static str {
        match self {
            Error::FlooredValue => "motive-ring",
            Error::FramingOverflow
            | Error::PolicyMismatch
            | Error::EmptyMonomial
            | Error::NonUnitConstantTerm(_)
            | Error::FramedDivision
            | Error::NonUnitScalar(_)
            | Error::BadVertex { .. } => "quantum-torus",
            Error::BadCounts { .. }
            | Error::BadRange { .. }
            | Error::BadLabel(_)
            | Error::NotClosed
            | Error::UnknownEdge(_) => "toric-quiver",
            Error::NonGenericZeta(_) | Error::ZetaLength { .. } => "root-system",
            Error::MissingFloor
            | Error::StrategyMismatch { .. }
            | Error::BadInterval { .. } => "dt-series",
            Error::NonzeroConstantTerm | Error::NonIntegerExponent(_) | Error::FlooredSeries => {
                "plethystics"
            }
            Error::Parse(_) => "cli",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
