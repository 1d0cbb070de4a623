//! Single-particle evolution: free flight, an instantaneous Rabi rotation
//! with recoil, free flight again.
//!
//! The pulse couples the internal levels with amplitude `sin(theta)` and
//! transfers momentum `+k_recoil` on g -> e (and `-k_recoil` on e -> g, so the
//! whole operator is exactly unitary). All two-particle formulas consume the
//! four single-particle matrix elements produced here.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{inner, AtomState, CMWaveFunction, InternalLabel};
use crate::tol;

/// How propagation segments treat periodic boundary leakage.
///
/// Physics paths reject leaking packets; the dense oracle works on the
/// periodic grid where the spectral kernel is exact regardless.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Bounds {
    Guarded,
    Periodic,
}

/// Parameters of the pulse unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseModel {
    theta: f64,
    k_recoil: f64,
    t_pre: f64,
    t_post: f64,
    mass: f64,
}

impl PulseModel {
    /// `theta` is half the pulse area (absorption amplitude `sin(theta)`),
    /// `k_recoil` the photon momentum transferred on an internal flip,
    /// `t_pre`/`t_post` free-flight durations around the pulse.
    pub fn new(theta: f64, k_recoil: f64, t_pre: f64, t_post: f64, mass: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidParameter(format!("theta = {theta} outside [0, pi/2]")));
        }
        if k_recoil < 0.0 {
            return Err(Error::InvalidParameter(format!("k_recoil = {k_recoil} negative")));
        }
        if t_pre < 0.0 || t_post < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "free-flight times ({t_pre}, {t_post}) must be nonnegative"
            )));
        }
        if !mass.is_finite() || mass <= 0.0 {
            return Err(Error::InvalidParameter(format!("mass = {mass} must be positive")));
        }
        Ok(Self { theta, k_recoil, t_pre, t_post, mass })
    }

    /// Pulse with no free flight.
    pub fn instantaneous(theta: f64, k_recoil: f64) -> Result<Self> {
        Self::new(theta, k_recoil, 0.0, 0.0, 1.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn k_recoil(&self) -> f64 {
        self.k_recoil
    }

    pub fn t_pre(&self) -> f64 {
        self.t_pre
    }

    pub fn t_post(&self) -> f64 {
        self.t_post
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Apply the full evolution to one atom, returning the (unnormalized)
    /// ground and excited output channels.
    pub fn apply(&self, state: &AtomState) -> Result<ChannelPair> {
        self.apply_with(state, Bounds::Guarded)
    }

    pub(crate) fn apply_with(&self, state: &AtomState, bounds: Bounds) -> Result<ChannelPair> {
        let propagate = |wf: &CMWaveFunction, t: f64| -> Result<CMWaveFunction> {
            match bounds {
                Bounds::Guarded => wf.free_propagate(t, self.mass),
                Bounds::Periodic => Ok(wf.free_propagate_periodic(t, self.mass)),
            }
        };
        let flip = C64::new(0.0, self.theta.sin());
        let stay = C64::new(self.theta.cos(), 0.0);
        let arrived = propagate(&state.cm, self.t_pre)?;
        let (g_mid, e_mid) = match state.internal {
            InternalLabel::Ground => {
                (arrived.scaled(stay), arrived.momentum_kick(self.k_recoil).scaled(flip))
            }
            InternalLabel::Excited => {
                (arrived.momentum_kick(-self.k_recoil).scaled(flip), arrived.scaled(stay))
            }
        };
        Ok(ChannelPair { g: propagate(&g_mid, self.t_post)?, e: propagate(&e_mid, self.t_post)? })
    }
}

/// Output of the pulse unitary, decomposed over internal labels.
///
/// For a normalized input, `|g|^2 + |e|^2 = 1` up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPair {
    pub g: CMWaveFunction,
    pub e: CMWaveFunction,
}

impl ChannelPair {
    /// Combined norm squared of both channels.
    pub fn total_norm_sq(&self) -> f64 {
        self.g.norm_sq() + self.e.norm_sq()
    }

    pub fn channel(&self, label: InternalLabel) -> &CMWaveFunction {
        match label {
            InternalLabel::Ground => &self.g,
            InternalLabel::Excited => &self.e,
        }
    }
}

/// `<final | U | initial>` for one atom.
pub fn single_amplitude(model: &PulseModel, fin: &AtomState, init: &AtomState) -> Result<C64> {
    single_amplitude_with(model, fin, init, Bounds::Guarded)
}

pub(crate) fn single_amplitude_with(
    model: &PulseModel,
    fin: &AtomState,
    init: &AtomState,
    bounds: Bounds,
) -> Result<C64> {
    if fin.cm.grid() != init.cm.grid() {
        return Err(Error::GridMismatch);
    }
    let channels = model.apply_with(init, bounds)?;
    inner(&fin.cm, channels.channel(fin.internal))
}

/// The recoiled final CM states: normalized excited-channel outputs of the
/// pulse acting on `phi` and `psi`. `ZeroAmplitude` at `theta = 0`.
pub fn default_final_states(
    model: &PulseModel,
    phi: &CMWaveFunction,
    psi: &CMWaveFunction,
) -> Result<(CMWaveFunction, CMWaveFunction)> {
    Ok((default_final(model, phi, Bounds::Guarded)?, default_final(model, psi, Bounds::Guarded)?))
}

pub(crate) fn default_final(
    model: &PulseModel,
    cm: &CMWaveFunction,
    bounds: Bounds,
) -> Result<CMWaveFunction> {
    let mut excited = model.apply_with(&AtomState::ground(cm.clone()), bounds)?.e;
    excited.renormalize()?;
    Ok(excited)
}

/// Final states orthogonalized against the other atom's excited channel, so
/// that the crossed amplitude of the two-particle formula vanishes: the pair
/// (`phi_tilde`, `psi_tilde`) satisfies `<phi_tilde | U_e psi> = 0` and
/// `<psi_tilde | U_e phi> = 0`.
///
/// This realizes the regime where only the direct channel contributes, which
/// is unreachable with the self-consistent defaults once the initial overlap
/// is appreciable.
pub fn crossed_suppressed_finals(
    model: &PulseModel,
    phi: &CMWaveFunction,
    psi: &CMWaveFunction,
) -> Result<(CMWaveFunction, CMWaveFunction)> {
    let e_phi = default_final(model, phi, Bounds::Guarded)?;
    let e_psi = default_final(model, psi, Bounds::Guarded)?;
    let c = inner(&e_phi, &e_psi)?;
    let x = c.norm_sqr();
    if x > 1.0 - tol::DISTINGUISHABILITY_EPSILON {
        return Err(Error::IndistinguishableFinals {
            fidelity: x,
            epsilon: tol::DISTINGUISHABILITY_EPSILON,
        });
    }
    let mut phi_tilde = CMWaveFunction::linear_combination(&e_phi, C64::ONE, &e_psi, -c.conj())?;
    let mut psi_tilde = CMWaveFunction::linear_combination(&e_psi, C64::ONE, &e_phi, -c)?;
    phi_tilde.renormalize()?;
    psi_tilde.renormalize()?;
    Ok((phi_tilde, psi_tilde))
}
