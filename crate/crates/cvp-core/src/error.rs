use thiserror::Error;

/// Errors produced by validation and the solver pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("lagrangian matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NotSquare { rows: usize, row: usize, cols: usize },
    #[error("lagrangian not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("negative lagrangian entry at ({0}, {1})")]
    NegativeEntry(usize, usize),
    #[error("nonpositive diagonal entry at ({0}, {0})")]
    NonpositiveDiagonal(usize),
    #[error("point space must have at least one point")]
    EmptySpace,
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("multiplier s must be positive, got {0}")]
    NonpositiveMultiplier(f64),
    #[error("rescaling factor must be positive, got {0}")]
    NonpositiveLambda(f64),
    #[error("negative measure weight at index {0}")]
    NegativeWeight(usize),
    #[error("negative potential value at index {0}")]
    NegativePotential(usize),
    #[error("point index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("{n} points exceed the exact-solver cap of {max}")]
    TooManyPoints { n: usize, max: usize },
    #[error("iterative solver did not converge (best residual {residual:e})")]
    NotConverged { residual: f64 },
    #[error("extension measure must be nonzero")]
    NuZero,
    #[error("extension measure charges index {0}, which is not in K \\ supp(rho)")]
    NuNotInK(usize),
    #[error("initial data is not admissible")]
    NotAdmissible,
    #[error("subset does not enclose the initial data (missing index {0})")]
    DoesNotEncloseInitialData(usize),
    #[error("no enclosing subset certifies as dependent")]
    NoDependentSet,
    #[error("no solution germs exist for the initial data")]
    NoGerms,
    #[error("lagrangian restricted to the support is singular")]
    SingularSupportMatrix,
    #[error("constant potential must lie in [0, 1), got {0}")]
    COutOfRange(f64),
    #[error("circle discretization needs at least {min} points, got {n}")]
    TooFewCirclePoints { n: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
