//! Minimization of ladder-operator Hamiltonians over pure Gaussian states.
//!
//! A Hamiltonian is stored as a Wick-ordered polynomial in creation and
//! annihilation operators ([`wick_poly`]). Bogoliubov maps ([`bogoliubov`])
//! act on it by linear substitution followed by normal ordering
//! ([`normal_order`]). The [`variational`] module walks the Gaussian manifold
//! by steepest descent until the linear and anomalous quadratic blocks of the
//! re-expanded Hamiltonian vanish, leaving `B + Σ D_ij b*_i b_j` plus terms of
//! degree three and higher. Every step can be cross-checked against dense
//! truncated Fock-space matrices in [`fock_oracle`].
//!
//! Mode indices are 0-based throughout the library.

pub mod bogoliubov;
pub mod error;
pub mod fock_oracle;
pub mod linalg;
pub mod normal_order;
pub mod variational;
pub mod wick_poly;

pub use error::{Error, Result};

/// Complex scalar used for all coefficients and amplitudes.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVector = nalgebra::DVector<C64>;
