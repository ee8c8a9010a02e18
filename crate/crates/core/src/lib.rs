//! Moore-Penrose inverses, EP operator analysis and product theorems over
//! finite-dimensional models of Hilbert C*-modules.
//!
//! Operators are dense complex matrices ([`ComplexMatrix`]); closed
//! submodules are orthonormal bases ([`Subspace`]). Every exact statement is
//! evaluated through a [`NumericalContext`] that fixes the rank threshold and
//! the equality tolerance.

mod compensated;

pub mod compacts;
pub mod ep;
pub mod error;
pub mod linalg;
pub mod products;
pub mod pseudoinverse;
pub mod random;
pub mod shift;
pub mod subspace;

pub use ep::{is_ep, EpReport};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Determinacy, NumericalContext, NumericalRank, C64};
pub use pseudoinverse::{mp_svd, pinv};
pub use subspace::Subspace;
