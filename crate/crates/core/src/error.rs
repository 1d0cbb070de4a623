//! Error types shared across the crate.

use thiserror::Error;

/// Everything that can go wrong when constructing states or evaluating
/// absorption quantities.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Packet width is below the resolvable limit of the grid.
    #[error("GridTooCoarse: sigma = {sigma} is below 4*dx = {min_sigma}")]
    GridTooCoarse { sigma: f64, min_sigma: f64 },

    /// Packet support does not fit inside the grid domain.
    #[error("PacketTruncated: boundary amplitude is {boundary_ratio:.3e} of peak (limit {limit:.1e})")]
    PacketTruncated { boundary_ratio: f64, limit: f64 },

    /// Two wavefunctions do not live on the same grid.
    #[error("GridMismatch: operands are defined on different grids")]
    GridMismatch,

    /// Free propagation leaked probability around the periodic boundary.
    #[error("WrapAround: boundary amplitude is {boundary_ratio:.3e} of peak after propagation (limit {limit:.1e})")]
    WrapAround { boundary_ratio: f64, limit: f64 },

    /// Tried to normalize a channel that carries no amplitude.
    #[error("ZeroAmplitude: channel norm is zero, nothing to normalize")]
    ZeroAmplitude,

    /// Fermion pair with (near-)unit overlap: the antisymmetrized state vanishes.
    #[error("PauliViolation: fermion overlap^2 = {overlap_sq} exceeds 1 - {epsilon:.1e}")]
    PauliViolation { overlap_sq: f64, epsilon: f64 },

    /// The equal-state superposition only exists for bosons.
    #[error("FermionEqualState: equal CM states are Pauli-forbidden for fermions")]
    FermionEqualState,

    /// Final CM states too similar for the distinguishable-mixture treatment.
    #[error("IndistinguishableFinals: final-state fidelity {fidelity} exceeds 1 - {epsilon:.1e}")]
    IndistinguishableFinals { fidelity: f64, epsilon: f64 },

    /// The factorized reference probability vanishes; the ratio is undefined.
    #[error("DegenerateBaseline: factorized probability is zero")]
    DegenerateBaseline,

    /// Grid too large for the dense two-particle oracle.
    #[error("TooLarge: n_points = {n_points} exceeds the dense-oracle limit {max}")]
    TooLarge { n_points: usize, max: usize },

    /// Dense vectors of incompatible dimension.
    #[error("DimensionMismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Thermal wavelength is undefined at non-positive temperature.
    #[error("NonpositiveTemperature: T = {temperature} K")]
    NonpositiveTemperature { temperature: f64 },

    /// A model or config parameter is outside its allowed range.
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
