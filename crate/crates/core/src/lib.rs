//! Exact genus-zero computations in twisted orbifold Gromov-Witten theory.
//!
//! The crate is organised bottom-up: [`exactalg`] supplies scalars in
//! ℚ(λ)[ℓ] ⊗ ℚ(ζ_N) and truncated series, [`orbtarget`] describes targets and
//! bundles, and the remaining modules build loop operators, J- and I-functions,
//! quantized quadratic Hamiltonians and the Serre-duality transforms on top.

pub mod bernoulli;
pub mod exactalg;
pub mod fockquant;
pub mod genus0;
pub mod giventalspace;
pub mod loopops;
pub mod orbtarget;
pub mod serre;

pub use exactalg::{Matrix, Rational, Scalar, TruncSeries};
pub use giventalspace::GiventalElement;
pub use loopops::{LoopOperator, SValues};
pub use orbtarget::{BundleModel, CohClass, TargetModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("NonUnitConstantTerm: {0}")]
    NonUnitConstantTerm(String),
    #[error("PoleAtZero: {0}")]
    PoleAtZero(String),
    #[error("LogObstruction: {0}")]
    LogObstruction(String),
    #[error("InvalidParams: {0}")]
    InvalidParams(String),
    #[error("BasisMismatch: {0}")]
    BasisMismatch(String),
    #[error("IndexOutOfRange: {0}")]
    IndexOutOfRange(String),
    #[error("SchemaError at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("InvariantViolation({0})")]
    InvariantViolation(String),
    #[error("TruncationTooNarrow: {0}")]
    TruncationTooNarrow(String),
    #[error("NonUnitTwist: {0}")]
    NonUnitTwist(String),
    #[error("NormalFormViolation: {0}")]
    NormalFormViolation(String),
    #[error("AssumptionViolated: {0}")]
    AssumptionViolated(String),
    #[error("PositivityViolated: {0}")]
    PositivityViolated(String),
    #[error("UnsupportedTarget: {0}")]
    UnsupportedTarget(String),
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    #[error("InsufficientTable: missing {}", .0.join(", "))]
    InsufficientTable(Vec<String>),
    #[error("NotInfinitesimallySymplectic: {0}")]
    NotInfinitesimallySymplectic(String),
    #[error("IndexOverflow: {0}")]
    IndexOverflow(String),
    #[error("CyclotomicOrderTooSmall: need a multiple of {needed}, have {have}")]
    CyclotomicOrderTooSmall { needed: u32, have: u32 },
}

impl Error {
    /// Stable error name as surfaced by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonUnitConstantTerm(_) => "NonUnitConstantTerm",
            Error::PoleAtZero(_) => "PoleAtZero",
            Error::LogObstruction(_) => "LogObstruction",
            Error::InvalidParams(_) => "InvalidParams",
            Error::BasisMismatch(_) => "BasisMismatch",
            Error::IndexOutOfRange(_) => "IndexOutOfRange",
            Error::Schema { .. } => "SchemaError",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::TruncationTooNarrow(_) => "TruncationTooNarrow",
            Error::NonUnitTwist(_) => "NonUnitTwist",
            Error::NormalFormViolation(_) => "NormalFormViolation",
            Error::AssumptionViolated(_) => "AssumptionViolated",
            Error::PositivityViolated(_) => "PositivityViolated",
            Error::UnsupportedTarget(_) => "UnsupportedTarget",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::InsufficientTable(_) => "InsufficientTable",
            Error::NotInfinitesimallySymplectic(_) => "NotInfinitesimallySymplectic",
            Error::IndexOverflow(_) => "IndexOverflow",
            Error::CyclotomicOrderTooSmall { .. } => "CyclotomicOrderTooSmall",
        }
    }

    /// Module that raises this error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::NonUnitConstantTerm(_) | Error::PoleAtZero(_) | Error::LogObstruction(_) => "exactalg",
            Error::InvalidParams(_)
            | Error::BasisMismatch(_)
            | Error::IndexOutOfRange(_)
            | Error::Schema { .. }
            | Error::InvariantViolation(_) => "orbtarget",
            Error::TruncationTooNarrow(_) => "loopops",
            Error::NonUnitTwist(_) => "giventalspace",
            Error::NormalFormViolation(_)
            | Error::AssumptionViolated(_)
            | Error::PositivityViolated(_)
            | Error::UnsupportedTarget(_)
            | Error::DimensionMismatch(_)
            | Error::InsufficientTable(_) => "genus0",
            Error::NotInfinitesimallySymplectic(_) | Error::IndexOverflow(_) => "fockquant",
            Error::CyclotomicOrderTooSmall { .. } => "serre",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
