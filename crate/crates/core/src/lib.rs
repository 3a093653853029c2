//! Secrecy-rate-maximizing beamforming for AN-aided directional modulation.
//!
//! The library models a uniform linear array transmitting a confidential
//! stream toward a desired direction while an artificial-noise (AN)
//! projection matrix degrades an eavesdropper. It provides:
//!
//! - [`array_channel`]: steering vectors and rank-1 channel Gram matrices,
//! - [`secrecy_metrics`]: achievable rates, the secrecy rate and the
//!   coefficient matrices of its quadratic-ratio form,
//! - [`numeric_solvers`]: Hermitian-definite generalized eigensolver and the
//!   generalized power iteration (GPI) for ratio-product objectives,
//! - [`beamformers`]: the alternating Max-SR solver plus leakage and
//!   null-space-projection baselines,
//! - [`link_sim`]: a Monte-Carlo QPSK link simulator for BER-versus-angle
//!   curves.

pub mod array_channel;
pub mod beamformers;
pub mod link_sim;
pub mod numeric_solvers;
pub mod secrecy_metrics;

mod error;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dynamically sized complex vector.
pub type CVector = nalgebra::DVector<C64>;
/// Dynamically sized complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
