use num_complex::Complex64 as C64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("tensor slot {slot} out of range ({factors} factors)")]
    SlotOutOfRange { slot: usize, factors: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported realization: {0}")]
    UnsupportedRealization(String),

    #[error("parameters inconsistent with realization: {0}")]
    InconsistentParams(String),

    #[error("R-matrix is singular at spectral argument {0}")]
    SingularArgument(C64),

    #[error("interpolation nodes are ill-conditioned (condition estimate {0:.3e})")]
    IllConditioned(f64),

    #[error("pseudovacuum is not annihilated by C(lambda) (residual {0:.3e})")]
    VacuumNotAnnihilated(f64),

    #[error("evaluation at a pole: {0}")]
    Pole(C64),

    #[error("Bethe roots {0} and {1} collide without a degeneracy certificate")]
    RootCollision(usize, usize),

    #[error("beta vanishes at root {0} while alpha does not")]
    BetaZero(usize),

    #[error("alpha(lambda) - beta(lambda) vanishes identically")]
    DegenerateVacuum,

    #[error("invalid sector: {0}")]
    InvalidSector(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}
