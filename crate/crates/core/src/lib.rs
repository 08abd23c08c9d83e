//! Quantum Rényi divergences, channel Rényi information and the strong
//! converse exponent of entanglement-assisted communication.
//!
//! The crate is `no_std` (it needs `alloc`). Dense complex linear algebra is
//! done with `nalgebra`; all logarithms and exponentials are base 2 so that
//! every information quantity is in bits.
//!
//! Layout:
//!
//! - [`operator`]: Hermitian spectral calculus, tensor structure, channels, pinching.
//! - [`divergence`]: sandwiched and log-Euclidean Rényi divergences and friends.
//! - [`optimize`]: the optimization layers (mutual information, channel information,
//!   exponents, the log-Euclidean quantities `F`, `F₁`, `F₂`).
//! - [`symmetry`]: types, permutation representations, universal symmetric states.
//! - [`coding`]: desk-scale entanglement-assisted code simulation.
//! - [`suites`]: seeded property suites shared by the CLI and the tests.
#![no_std]

#[cfg(test)]
extern crate std;

extern crate alloc;

pub mod coding;
pub mod divergence;
mod error;
pub mod operator;
pub mod optimize;
pub mod random;
pub mod suites;
pub mod symmetry;

pub use error::{Error, Result};
pub use operator::{
    CMatrix, CVector, DensityOperator, HermitianOperator, PureState, QuantumChannel,
    StateEnsemble, C64,
};
