//! Fourier-coefficient numerics for the periodic Korteweg-de Vries equation.
//!
//! States are finitely supported, zero-mean coefficient maps `k -> v_k`.
//! The crate evaluates the multilinear convolution operators that appear
//! when the equation is averaged by differentiating by parts in time,
//! integrates the Galerkin-truncated system, inverts the linearized
//! operator `I - c B2(phi, .)`, solves the rotating complex Burgers model,
//! and measures the operator bounds empirically.

pub mod burgers;
pub mod error;
pub mod estimates;
pub mod galerkin;
pub mod inverse;
pub mod io;
pub mod operators;
pub mod phase;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use spectrum::{FourierState, Side};
