//! Pinned numerical thresholds.
//!
//! Every guard and agreement tolerance used by the library lives here, so the
//! acceptance suite and the implementation cannot drift apart.

/// Algebraic identities and norm preservation (double-precision headroom).
pub const ALGEBRAIC: f64 = 1e-12;

/// Grid quadrature against closed-form Gaussian integrals.
pub const QUADRATURE: f64 = 1e-9;

/// Spectral propagation against analytic free-Gaussian evolution (relative).
pub const PROPAGATION: f64 = 1e-6;

/// Dense-oracle vs analytic amplitude agreement (absolute).
pub const ORACLE_AGREEMENT: f64 = 1e-10;

/// Fermion cutoff: overlap^2 above `1 - PAULI_EPSILON` makes the
/// antisymmetrized state identically zero for numerical purposes.
pub const PAULI_EPSILON: f64 = 1e-9;

/// Final-state fidelity above `1 - DISTINGUISHABILITY_EPSILON` routes the
/// computation to the equal-state superposition path.
pub const DISTINGUISHABILITY_EPSILON: f64 = 1e-9;

/// The crossed channel counts as negligible when
/// `|m_crossed| <= CROSSED_NEGLIGIBLE_FACTOR * |m_direct|`.
pub const CROSSED_NEGLIGIBLE_FACTOR: f64 = 1e-6;

/// Packet construction: boundary amplitude must stay below this fraction of
/// the peak amplitude.
pub const TRUNCATION_LIMIT: f64 = 1e-8;

/// Free propagation: boundary amplitude above this fraction of the peak
/// counts as periodic wrap-around leakage.
pub const WRAP_LEAK_LIMIT: f64 = 1e-6;

/// Packet width must be at least this many grid steps to be resolvable.
pub const MIN_SIGMA_STEPS: f64 = 4.0;

/// Largest grid accepted by the dense two-particle oracle.
pub const ORACLE_MAX_POINTS: usize = 128;
