//! Eigenvalue bounds for Hermitian matrices coupled through principal
//! submatrices, secular equations and majorization.

pub mod bounds;
pub mod campaign;
pub mod error;
pub mod hierarchy;
pub mod inspect;
pub mod io;
pub mod linalg;
pub mod majorization;
pub mod random;
pub mod secular;

pub use error::{Error, Result};
pub use linalg::{EigenDecomposition, HermitianMatrix, IndexSet, Spectrum, C64};
pub use secular::{SecularProblem, SecularRoots};
