//! Integrable matter-radiation models: Lax and transfer-matrix machinery,
//! algebraic Bethe ansatz and an exact-diagonalisation oracle.

pub mod bethe;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod lax;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod poly;

pub use error::{Error, Result};
pub use hilbert::{ModeKind, OperatorMatrix, SpaceSpec};
pub use num_complex::Complex64 as C64;
pub use poly::Poly;
