use thiserror::Error;

/// Errors raised by the numeric substrate and the algebraic constructions
/// built on it.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("inconsistent linear system (residual {residual:.3e})")]
    InconsistentSystem { residual: f64 },
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("element is not in the subalgebra (distance {distance:.3e})")]
    NotInSubalgebra { distance: f64 },
    #[error("the algebra carries no star operation")]
    MissingStar,
    #[error("the weak Hopf algebra carries no antipode")]
    MissingAntipode,
    #[error("no antipode exists: {0}")]
    NoAntipode(String),
    #[error("antipode is not unique (solution space of dimension {0})")]
    NonUniqueAntipode(usize),
    #[error("no Haar integral exists: {0}")]
    NoHaar(String),
    #[error("Haar integral is not unique (solution space of dimension {0})")]
    NonUniqueHaar(usize),
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("modules have different parent algebras")]
    ParentMismatch,
    #[error("not a representation: {0}")]
    NotARepresentation(String),
    #[error("vacuum assignment failed: {0}")]
    VacuumAssignmentFailure(String),
    #[error("crossed product has dimension zero")]
    QuotientDegenerate,
    #[error("inclusion is not of depth 2: {0}")]
    NotDepth2(String),
    #[error("conditional expectation has no quasibasis: {0}")]
    NoFiniteIndex(String),
    #[error("span closure did not stabilise after {0} rounds")]
    GenerationOverflow(usize),
    #[error("no conjugate for sector {0}")]
    NoConjugate(usize),
    #[error("pairing is degenerate (smallest singular value {0:.3e})")]
    DegeneratePairing(f64),
    #[error("axiom {axiom} violated (residual {residual:.3e})")]
    AxiomViolation { axiom: String, residual: f64 },
    #[error("spectral splitting failed: {0}")]
    SpectralSplitting(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Variant name, stable for scripting.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::InconsistentSystem { .. } => "InconsistentSystem",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPositive { .. } => "NotPositive",
            Error::NotInSubalgebra { .. } => "NotInSubalgebra",
            Error::MissingStar => "MissingStar",
            Error::MissingAntipode => "MissingAntipode",
            Error::NoAntipode(..) => "NoAntipode",
            Error::NonUniqueAntipode(..) => "NonUniqueAntipode",
            Error::NoHaar(..) => "NoHaar",
            Error::NonUniqueHaar(..) => "NonUniqueHaar",
            Error::InvalidGroupoid(..) => "InvalidGroupoid",
            Error::ParentMismatch => "ParentMismatch",
            Error::NotARepresentation(..) => "NotARepresentation",
            Error::VacuumAssignmentFailure(..) => "VacuumAssignmentFailure",
            Error::QuotientDegenerate => "QuotientDegenerate",
            Error::NotDepth2(..) => "NotDepth2",
            Error::NoFiniteIndex(..) => "NoFiniteIndex",
            Error::GenerationOverflow(..) => "GenerationOverflow",
            Error::NoConjugate(..) => "NoConjugate",
            Error::DegeneratePairing(..) => "DegeneratePairing",
            Error::AxiomViolation { .. } => "AxiomViolation",
            Error::SpectralSplitting(..) => "SpectralSplitting",
            Error::InvalidInput(..) => "InvalidInput",
            Error::Unsupported(..) => "Unsupported",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
