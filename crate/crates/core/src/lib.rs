//! Two attractive-repulsively coupled quantum Stuart-Landau oscillators.
//!
//! The crate provides three views of the same system:
//!
//! - the Lindblad master equation on a truncated two-oscillator Fock space
//!   ([`liouvillian`]), with phase-space ([`wigner`]) and entanglement
//!   ([`observables`]) diagnostics of the limit-cycle → oscillation-death
//!   transition;
//! - the deterministic classical amplitude model ([`classical`]) with its
//!   fixed-point and bifurcation analysis;
//! - the noisy classical (Fokker-Planck / SDE) reduction ([`sde`]) valid in
//!   the weak quantum regime.
//!
//! All models share the parameter set [`params::SystemParams`].

pub mod classical;
pub mod config;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod liouvillian;
pub mod observables;
pub mod params;
pub mod sde;
pub mod wigner;

pub use error::{Error, Result};
pub use params::SystemParams;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
