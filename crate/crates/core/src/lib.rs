//! One-photon absorption of two identical atoms.
//!
//! Computes transition amplitudes and probabilities for a pair of identical
//! atoms in an (anti)symmetrized center-of-mass state interacting with a
//! short resonant pulse, and compares them with the factorized-state
//! baseline. The exchange term suppresses absorption for bosons and enhances
//! it for fermions as a function of the wavefunction overlap; the ratio
//! approaches `1/(1 +/- |<phi|psi>|^2)` when the crossed channel is
//! negligible.
//!
//! Module map:
//! - [`hilbert`]: grid wavefunctions, Gaussian packets, inner products,
//!   momentum kicks, spectral free propagation;
//! - [`evolution`]: the single-particle pulse unitary and its matrix
//!   elements;
//! - [`exchange`]: the two-particle amplitude algebra (direct/crossed
//!   channels, interference, factorized baseline, ratio, equal-state limit);
//! - [`oracle`]: dense tensor-product cross-validation of every amplitude;
//! - [`experiment`]: thermal-wavelength overlap control and the
//!   delay-controlled two-atom scan with Monte Carlo counting;
//! - [`tol`]: every pinned numerical threshold.

pub mod error;
pub mod evolution;
pub mod exchange;
pub mod experiment;
pub mod hilbert;
pub mod oracle;
pub mod tol;

pub use error::{Error, Result};
