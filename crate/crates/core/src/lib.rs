//! Bound states of the one-dimensional Schrödinger equation with the
//! hyperbolic double well v(z) = -v₀ sinh⁴(z)/cosh⁶(z).
//!
//! Two routes share one three-term recurrence for the Frobenius coefficients
//! in ξ = 1/cosh²(z):
//!
//! * [`exact`]: truncated (polynomial) solutions at special couplings, built
//!   in exact integer arithmetic with certified real-root isolation;
//! * [`spectrum`]: all bound states at any v₀ from the roots of c_N(β) = 0,
//!   tracked across increasing N, plus the critical couplings where new
//!   states appear.
//!
//! [`asymptotics`] and [`wavefunction`] provide the harmonic asymptote,
//! potential geometry, real-space eigenfunctions and the Hellmann–Feynman
//! consistency check.

pub mod asymptotics;
pub mod error;
pub mod exact;
pub mod recurrence;
pub mod scalar;
pub mod spectrum;
pub mod wavefunction;

pub use error::{Error, Result};
pub use recurrence::{ModelContext, Parity};
pub use scalar::Precision;
