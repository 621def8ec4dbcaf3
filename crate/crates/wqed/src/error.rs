use thiserror::Error;

/// Domain errors. Physics flags (divergent ratios, partial decay) are not
/// errors; they travel inside result structs.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("state is not in the single-excitation span (|eg>, |ge>) within tol {tol}: residual {residual}")]
    NotSingleExcitation { residual: f64, tol: f64 },

    #[error("integral diverges: rate pair with Re(z_a + conj(z_b)) = {0} <= 0")]
    NonIntegrable(f64),

    #[error("non-decaying term with non-negligible coefficient |c| = {coeff} at Re(z) = {rate}")]
    MarginalTerm { coeff: f64, rate: f64 },

    #[error("rate magnitude {0} too close to zero for a closed-form antiderivative")]
    DegenerateRate(f64),

    #[error("mode envelope must have unit L2 norm, got norm^2 = {0}")]
    ModeNotNormalized(f64),

    #[error("bin width gamma*dt = {0} outside the supported regime (0, 0.1]")]
    BinWidth(f64),

    #[error("collision run needs at least one bin")]
    NoBins,

    #[error("initial state must be |ee> or lie in the single-excitation span")]
    ExcitationSector,

    #[error("dense two-photon storage would need {needed} entries, budget is {budget}; use streaming")]
    MemoryBudget { needed: usize, budget: usize },

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
