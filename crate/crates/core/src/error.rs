use alloc::string::String;

/// Errors raised by sector algebra, state construction and estimation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("operator is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "truncation remainder {remainder:e} at n_max = {n_max} exceeds the allowed budget; \
         try n_max >= {required_n_max}"
    )]
    Truncation {
        remainder: f64,
        n_max: usize,
        required_n_max: usize,
    },

    #[error("state has no amplitude above the floor")]
    DegenerateState,

    #[error("state has no phase sensitivity (Var(J3) = {variance:e})")]
    NoSensitivity { variance: f64 },

    #[error("no real estimator saturates the bound at phase {phi}: outcomes {outcomes:?} vanish while <m1|J3|psi> does not")]
    EstimatorUnachievable {
        phi: f64,
        outcomes: alloc::vec::Vec<usize>,
    },

    #[error("likelihood is flat over the estimation window")]
    FlatLikelihood,

    #[error("estimation window {window} must be below the fringe ambiguity {max}")]
    WindowTooWide { window: f64, max: f64 },

    #[error("uncertainty relation violated: {lhs} < {rhs}")]
    UncertaintyViolated { lhs: f64, rhs: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
