//! Two-particle exchange algebra: (anti)symmetrized initial states, the
//! direct/crossed transition amplitudes, probability decomposition with the
//! interference term, the factorized baseline, and the ratio between them.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{
    crossed_suppressed_finals, default_final, default_final_states, single_amplitude_with, Bounds,
    PulseModel,
};
use crate::hilbert::{overlap_sq, AtomState, CMWaveFunction};
use crate::tol;

/// Exchange statistics of the pair; fixes the sign in every double-sign
/// expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// `+1` for bosons, `-1` for fermions.
    pub fn sign(&self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }
}

impl std::fmt::Display for Statistics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Statistics::Boson => write!(f, "boson"),
            Statistics::Fermion => write!(f, "fermion"),
        }
    }
}

impl std::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "boson" | "bosons" => Ok(Statistics::Boson),
            "fermion" | "fermions" => Ok(Statistics::Fermion),
            other => Err(Error::InvalidParameter(format!("unknown statistics '{other}'"))),
        }
    }
}

/// Which final-state pair a problem is built with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FinalsPolicy {
    /// The pulse's own excited-channel outputs (self-consistent choice).
    Default,
    /// Finals orthogonalized against the other atom's excited channel, so the
    /// crossed amplitude vanishes.
    CrossedSuppressed,
}

impl std::str::FromStr for FinalsPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "default" => Ok(FinalsPolicy::Default),
            "suppressed" | "crossed-suppressed" => Ok(FinalsPolicy::CrossedSuppressed),
            other => Err(Error::InvalidParameter(format!("unknown finals policy '{other}'"))),
        }
    }
}

/// One fully specified absorption problem: pulse model, initial CM pair,
/// final excited CM pair, statistics.
#[derive(Debug, Clone)]
pub struct TwoParticleProblem {
    model: PulseModel,
    phi: CMWaveFunction,
    psi: CMWaveFunction,
    phi_tilde: CMWaveFunction,
    psi_tilde: CMWaveFunction,
    stats: Statistics,
    overlap_sq: f64,
}

impl TwoParticleProblem {
    /// Build a problem with explicit final states. Validates grids, norms and
    /// the Pauli constraint for fermions.
    pub fn new(
        model: PulseModel,
        phi: CMWaveFunction,
        psi: CMWaveFunction,
        phi_tilde: CMWaveFunction,
        psi_tilde: CMWaveFunction,
        stats: Statistics,
    ) -> Result<Self> {
        let grid = phi.grid();
        for (name, wf) in
            [("phi", &phi), ("psi", &psi), ("phi_tilde", &phi_tilde), ("psi_tilde", &psi_tilde)]
        {
            if wf.grid() != grid {
                return Err(Error::GridMismatch);
            }
            if !wf.is_normalized() {
                return Err(Error::InvalidParameter(format!(
                    "{name} is not normalized (norm^2 = {})",
                    wf.norm_sq()
                )));
            }
        }
        let x = clamped_overlap_sq(&phi, &psi)?;
        if stats == Statistics::Fermion && x > 1.0 - tol::PAULI_EPSILON {
            return Err(Error::PauliViolation { overlap_sq: x, epsilon: tol::PAULI_EPSILON });
        }
        Ok(Self { model, phi, psi, phi_tilde, psi_tilde, stats, overlap_sq: x })
    }

    /// Problem with the pulse's own excited channels as finals.
    pub fn with_default_finals(
        model: PulseModel,
        phi: CMWaveFunction,
        psi: CMWaveFunction,
        stats: Statistics,
    ) -> Result<Self> {
        let (phi_tilde, psi_tilde) = default_final_states(&model, &phi, &psi)?;
        Self::new(model, phi, psi, phi_tilde, psi_tilde, stats)
    }

    /// Problem with orthogonalized finals (vanishing crossed amplitude).
    pub fn with_crossed_suppressed_finals(
        model: PulseModel,
        phi: CMWaveFunction,
        psi: CMWaveFunction,
        stats: Statistics,
    ) -> Result<Self> {
        let (phi_tilde, psi_tilde) = crossed_suppressed_finals(&model, &phi, &psi)?;
        Self::new(model, phi, psi, phi_tilde, psi_tilde, stats)
    }

    pub fn with_finals_policy(
        model: PulseModel,
        phi: CMWaveFunction,
        psi: CMWaveFunction,
        policy: FinalsPolicy,
        stats: Statistics,
    ) -> Result<Self> {
        match policy {
            FinalsPolicy::Default => Self::with_default_finals(model, phi, psi, stats),
            FinalsPolicy::CrossedSuppressed => {
                Self::with_crossed_suppressed_finals(model, phi, psi, stats)
            }
        }
    }

    /// The same physical problem with the roles of the two initial (and
    /// final) states exchanged: the other branch of the final-state mixture.
    pub fn swapped(&self) -> Self {
        Self {
            model: self.model,
            phi: self.psi.clone(),
            psi: self.phi.clone(),
            phi_tilde: self.psi_tilde.clone(),
            psi_tilde: self.phi_tilde.clone(),
            stats: self.stats,
            overlap_sq: self.overlap_sq,
        }
    }

    pub fn model(&self) -> &PulseModel {
        &self.model
    }

    pub fn phi(&self) -> &CMWaveFunction {
        &self.phi
    }

    pub fn psi(&self) -> &CMWaveFunction {
        &self.psi
    }

    pub fn phi_tilde(&self) -> &CMWaveFunction {
        &self.phi_tilde
    }

    pub fn psi_tilde(&self) -> &CMWaveFunction {
        &self.psi_tilde
    }

    pub fn statistics(&self) -> Statistics {
        self.stats
    }

    /// `x = |<phi|psi>|^2`.
    pub fn overlap_sq(&self) -> f64 {
        self.overlap_sq
    }
}

fn clamped_overlap_sq(phi: &CMWaveFunction, psi: &CMWaveFunction) -> Result<f64> {
    let x = overlap_sq(phi, psi)?;
    if x > 1.0 + tol::ALGEBRAIC {
        return Err(Error::InvalidParameter(format!("overlap^2 = {x} above 1")));
    }
    Ok(x.min(1.0))
}

/// Normalization factor of the (anti)symmetrized initial state,
/// `1 / sqrt(2 (1 +/- x))`.
pub fn normalization_factor(overlap_sq: f64, stats: Statistics) -> Result<f64> {
    if !(0.0..=1.0).contains(&overlap_sq) {
        return Err(Error::InvalidParameter(format!("overlap^2 = {overlap_sq} outside [0, 1]")));
    }
    if stats == Statistics::Fermion && overlap_sq > 1.0 - tol::PAULI_EPSILON {
        return Err(Error::PauliViolation { overlap_sq, epsilon: tol::PAULI_EPSILON });
    }
    Ok(1.0 / (2.0 * (1.0 + stats.sign() * overlap_sq)).sqrt())
}

/// The four single-particle matrix elements combined into the two-particle
/// transition amplitude.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TransitionAmplitudes {
    /// `x = |<phi|psi>|^2`.
    pub overlap_sq: f64,
    /// `1 / sqrt(2 (1 +/- x))`.
    pub norm_factor: f64,
    /// `<phi_tilde_e|U|phi_g> <psi_g|U|psi_g>`.
    pub direct: C64,
    /// `<phi_tilde_e|U|psi_g> <psi_g|U|phi_g>`.
    pub crossed: C64,
    /// `(direct +/- crossed) / sqrt(1 +/- x)`.
    pub total: C64,
}

/// Transition amplitude of the symmetrized pair into the mixture branch whose
/// excited CM state is `phi_tilde`.
pub fn transition_amplitude(problem: &TwoParticleProblem) -> Result<TransitionAmplitudes> {
    transition_amplitude_with(problem, Bounds::Guarded)
}

pub(crate) fn transition_amplitude_with(
    problem: &TwoParticleProblem,
    bounds: Bounds,
) -> Result<TransitionAmplitudes> {
    let model = &problem.model;
    let x = problem.overlap_sq;
    let sign = problem.stats.sign();
    let phi_g = AtomState::ground(problem.phi.clone());
    let psi_g = AtomState::ground(problem.psi.clone());
    let phi_tilde_e = AtomState::excited(problem.phi_tilde.clone());
    let absorb_phi = single_amplitude_with(model, &phi_tilde_e, &phi_g, bounds)?;
    let stay_psi = single_amplitude_with(model, &psi_g, &psi_g, bounds)?;
    let absorb_psi = single_amplitude_with(model, &phi_tilde_e, &psi_g, bounds)?;
    let exchange_psi_phi = single_amplitude_with(model, &psi_g, &phi_g, bounds)?;
    let direct = absorb_phi * stay_psi;
    let crossed = absorb_psi * exchange_psi_phi;
    let total = (direct + sign * crossed) / (1.0 + sign * x).sqrt();
    Ok(TransitionAmplitudes {
        overlap_sq: x,
        norm_factor: normalization_factor(x, problem.stats)?,
        direct,
        crossed,
        total,
    })
}

/// Regime classification of an absorption result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `|crossed| <= 1e-6 |direct|`: the ratio law `1/(1 +/- x)` applies.
    CrossedNegligible,
    /// The crossed amplitude contributes; only the full expression is valid.
    Full,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::CrossedNegligible => write!(f, "crossed-negligible"),
            Regime::Full => write!(f, "full"),
        }
    }
}

/// Amplitudes and probabilities of one absorption branch, with the factorized
/// baseline alongside.
#[derive(Debug, Clone, Serialize)]
pub struct AbsorptionResult {
    pub overlap_sq: f64,
    pub norm_factor: f64,
    pub m_direct: C64,
    pub m_crossed: C64,
    pub m_total: C64,
    /// `|m_total|^2`.
    pub p_two: f64,
    /// Factorized-state probability of the same outcome.
    pub p_fac: f64,
    /// `2 Re(conj(m_direct) m_crossed)`; enters the decomposition with the
    /// statistics sign.
    pub interference: f64,
    /// `p_two / p_fac`, absent when the baseline vanishes.
    pub ratio: Option<f64>,
    pub regime: Regime,
}

impl AbsorptionResult {
    /// Residual of the decomposition identity
    /// `(1 +/- x) p_two = |m_direct|^2 + |m_crossed|^2 +/- interference`.
    pub fn identity_residual(&self, stats: Statistics) -> f64 {
        let lhs = (1.0 + stats.sign() * self.overlap_sq) * self.p_two;
        let rhs = self.m_direct.norm_sqr()
            + self.m_crossed.norm_sqr()
            + stats.sign() * self.interference;
        (lhs - rhs).abs()
    }
}

/// Full probability decomposition of the `phi_tilde` branch.
pub fn probability_decomposition(problem: &TwoParticleProblem) -> Result<AbsorptionResult> {
    probability_decomposition_with(problem, Bounds::Guarded)
}

pub(crate) fn probability_decomposition_with(
    problem: &TwoParticleProblem,
    bounds: Bounds,
) -> Result<AbsorptionResult> {
    let amps = transition_amplitude_with(problem, bounds)?;
    let p_two = amps.total.norm_sqr();
    let p_fac = factorized_probability_with(problem, bounds)?;
    let interference = 2.0 * (amps.direct.conj() * amps.crossed).re;
    let regime = if amps.crossed.norm() <= tol::CROSSED_NEGLIGIBLE_FACTOR * amps.direct.norm() {
        Regime::CrossedNegligible
    } else {
        Regime::Full
    };
    Ok(AbsorptionResult {
        overlap_sq: amps.overlap_sq,
        norm_factor: amps.norm_factor,
        m_direct: amps.direct,
        m_crossed: amps.crossed,
        m_total: amps.total,
        p_two,
        p_fac,
        interference,
        ratio: if p_fac > 0.0 { Some(p_two / p_fac) } else { None },
        regime,
    })
}

/// Probability of the same outcome for the unsymmetrized product state:
/// `P_sin(phi_g -> phi_tilde_e) P_sin(psi_g -> psi_g)`.
///
/// When the two initial states coincide (up to the distinguishability
/// threshold) the absorption can come from either factor and the value
/// doubles.
pub fn factorized_probability(problem: &TwoParticleProblem) -> Result<f64> {
    factorized_probability_with(problem, Bounds::Guarded)
}

pub(crate) fn factorized_probability_with(
    problem: &TwoParticleProblem,
    bounds: Bounds,
) -> Result<f64> {
    let model = &problem.model;
    let phi_g = AtomState::ground(problem.phi.clone());
    let psi_g = AtomState::ground(problem.psi.clone());
    let phi_tilde_e = AtomState::excited(problem.phi_tilde.clone());
    let p_absorb = single_amplitude_with(model, &phi_tilde_e, &phi_g, bounds)?.norm_sqr();
    if problem.overlap_sq > 1.0 - tol::DISTINGUISHABILITY_EPSILON {
        let p_stay = single_amplitude_with(model, &phi_g, &phi_g, bounds)?.norm_sqr();
        return Ok(2.0 * p_absorb * p_stay);
    }
    let p_stay = single_amplitude_with(model, &psi_g, &psi_g, bounds)?.norm_sqr();
    Ok(p_absorb * p_stay)
}

/// `P_two / P_two^fac`, always evaluated from the full amplitude (the closed
/// form `1/(1 +/- x)` is a cross-check target, not the implementation).
pub fn ratio(problem: &TwoParticleProblem) -> Result<f64> {
    let result = probability_decomposition(problem)?;
    result.ratio.ok_or(Error::DegenerateBaseline)
}

/// Probability of one absorption into either mixture branch: the branches are
/// distinguishable and their probabilities add.
pub fn total_absorption_probability(problem: &TwoParticleProblem) -> Result<f64> {
    let fidelity = overlap_sq(&problem.phi_tilde, &problem.psi_tilde)?;
    if fidelity > 1.0 - tol::DISTINGUISHABILITY_EPSILON {
        return Err(Error::IndistinguishableFinals {
            fidelity,
            epsilon: tol::DISTINGUISHABILITY_EPSILON,
        });
    }
    let phi_branch = transition_amplitude(problem)?.total.norm_sqr();
    let psi_branch = transition_amplitude(&problem.swapped())?.total.norm_sqr();
    Ok(phi_branch + psi_branch)
}

/// Absorption probability for equal initial CM states, computed from the
/// superposition final state: `|sqrt(2) <phi_tilde_e|U|phi_g> <phi_g|U|phi_g>|^2`.
///
/// Coincides with the factorized equal-state baseline; bosons only.
pub fn equal_state_probability(
    model: &PulseModel,
    phi: &CMWaveFunction,
    stats: Statistics,
) -> Result<f64> {
    equal_state_probability_with(model, phi, stats, Bounds::Guarded)
}

pub(crate) fn equal_state_probability_with(
    model: &PulseModel,
    phi: &CMWaveFunction,
    stats: Statistics,
    bounds: Bounds,
) -> Result<f64> {
    if stats == Statistics::Fermion {
        return Err(Error::FermionEqualState);
    }
    if model.theta() == 0.0 {
        return Ok(0.0);
    }
    let amplitude = equal_state_amplitude_with(model, phi, bounds)?;
    Ok(amplitude.norm_sqr())
}

pub(crate) fn equal_state_amplitude_with(
    model: &PulseModel,
    phi: &CMWaveFunction,
    bounds: Bounds,
) -> Result<C64> {
    let phi_tilde = default_final(model, phi, bounds)?;
    equal_state_amplitude_explicit(model, phi, &phi_tilde, bounds)
}

pub(crate) fn equal_state_amplitude_explicit(
    model: &PulseModel,
    phi: &CMWaveFunction,
    phi_tilde: &CMWaveFunction,
    bounds: Bounds,
) -> Result<C64> {
    let phi_g = AtomState::ground(phi.clone());
    let absorb = single_amplitude_with(model, &AtomState::excited(phi_tilde.clone()), &phi_g, bounds)?;
    let stay = single_amplitude_with(model, &phi_g, &phi_g, bounds)?;
    Ok(std::f64::consts::SQRT_2 * absorb * stay)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::GridSpec;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    fn grid() -> GridSpec {
        GridSpec::new(1024, -50.0, 50.0).unwrap()
    }

    fn packet(center: f64) -> CMWaveFunction {
        CMWaveFunction::gaussian(grid(), center, 1.0, 0.0).unwrap()
    }

    #[test]
    fn normalization_factor_limits() {
        let sqrt_half = 0.5f64.sqrt();
        assert_abs_diff_eq!(
            normalization_factor(0.0, Statistics::Boson).unwrap(),
            sqrt_half,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            normalization_factor(0.0, Statistics::Fermion).unwrap(),
            sqrt_half,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            normalization_factor(1.0, Statistics::Boson).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        assert!(matches!(
            normalization_factor(1.0, Statistics::Fermion),
            Err(Error::PauliViolation { .. })
        ));
        assert!(normalization_factor(1.5, Statistics::Boson).is_err());
    }

    #[test]
    fn pauli_guard_in_problem_construction() {
        let model = PulseModel::instantaneous(FRAC_PI_4, 1.0).unwrap();
        let phi = packet(0.0);
        let err = TwoParticleProblem::with_default_finals(
            model,
            phi.clone(),
            phi,
            Statistics::Fermion,
        )
        .unwrap_err();
        assert!(matches!(err, Error::PauliViolation { .. }));
    }

    #[test]
    fn far_separated_amplitude_is_product_of_singles() {
        let k = 1.3;
        let model = PulseModel::instantaneous(FRAC_PI_6, k).unwrap();
        let phi = packet(-15.0);
        let psi = packet(15.0);
        for stats in [Statistics::Boson, Statistics::Fermion] {
            // explicit recoiled finals, so <phi_tilde_e|U|phi_g> = i sin(theta)
            let p = TwoParticleProblem::new(
                model,
                phi.clone(),
                psi.clone(),
                phi.momentum_kick(k),
                psi.momentum_kick(k),
                stats,
            )
            .unwrap();
            assert!(p.overlap_sq() < 1e-15);
            let amps = transition_amplitude(&p).unwrap();
            assert!(amps.crossed.norm() < 1e-12);
            // i sin(pi/6) cos(pi/6) = 0.433013 i
            let expect = C64::new(0.0, FRAC_PI_6.sin() * FRAC_PI_6.cos());
            assert!((amps.total - expect).norm() < tol::QUADRATURE);
            assert_abs_diff_eq!(expect.im, 0.433013, epsilon = 1e-6);
        }
    }

    #[test]
    fn equal_state_amplitude_matches_superposition_form() {
        let model = PulseModel::instantaneous(FRAC_PI_6, 1.3).unwrap();
        let phi = packet(0.0);
        let p = TwoParticleProblem::with_default_finals(
            model,
            phi.clone(),
            phi.clone(),
            Statistics::Boson,
        )
        .unwrap();
        let amps = transition_amplitude(&p).unwrap();
        // (d + c)/sqrt(2) with d = c reduces to sqrt(2) d
        let direct = amps.direct;
        assert!((amps.total - std::f64::consts::SQRT_2 * direct).norm() < 1e-10);
        let eq = equal_state_amplitude_with(&model, &phi, Bounds::Guarded).unwrap();
        assert!((amps.total - eq).norm() < 1e-10);
    }

    #[test]
    fn swapped_branches_agree_for_mirror_pairs() {
        let model = PulseModel::new(FRAC_PI_6, 1.1, 0.4, 0.3, 1.0).unwrap();
        let phi = CMWaveFunction::gaussian(grid(), -1.5, 1.0, 0.6).unwrap();
        let psi = CMWaveFunction::gaussian(grid(), 1.5, 1.0, -0.6).unwrap();
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let p =
                TwoParticleProblem::with_default_finals(model, phi.clone(), psi.clone(), stats)
                    .unwrap();
            let a = transition_amplitude(&p).unwrap().total.norm();
            let b = transition_amplitude(&p.swapped()).unwrap().total.norm();
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn decomposition_identity_and_crossed_free_limit() {
        let model = PulseModel::instantaneous(0.7, 1.2).unwrap();
        let phi = packet(-1.0);
        let psi = packet(1.0);
        for stats in [Statistics::Boson, Statistics::Fermion] {
            // suppressed finals: interference vanishes, p_two = |d|^2/(1 +/- x)
            let p = TwoParticleProblem::with_crossed_suppressed_finals(
                model,
                phi.clone(),
                psi.clone(),
                stats,
            )
            .unwrap();
            let r = probability_decomposition(&p).unwrap();
            assert!(r.m_crossed.norm() < 1e-13);
            assert!(r.interference.abs() < 1e-13);
            assert_eq!(r.regime, Regime::CrossedNegligible);
            let expect = r.m_direct.norm_sqr() / (1.0 + stats.sign() * r.overlap_sq);
            assert_abs_diff_eq!(r.p_two, expect, epsilon = tol::ALGEBRAIC);
            assert!(r.identity_residual(stats) < tol::ALGEBRAIC);

            // default finals: full regime, identity still exact
            let p = TwoParticleProblem::with_default_finals(
                model,
                phi.clone(),
                psi.clone(),
                stats,
            )
            .unwrap();
            let r = probability_decomposition(&p).unwrap();
            assert_eq!(r.regime, Regime::Full);
            assert!(r.identity_residual(stats) < tol::ALGEBRAIC);
        }
    }

    #[test]
    fn factorized_probability_values() {
        let model = PulseModel::instantaneous(FRAC_PI_6, 1.3).unwrap();
        let phi = packet(-15.0);
        let psi = packet(15.0);
        let p = TwoParticleProblem::with_default_finals(
            model,
            phi.clone(),
            psi,
            Statistics::Boson,
        )
        .unwrap();
        // sin^2(pi/6) cos^2(pi/6) = 0.1875
        assert_abs_diff_eq!(factorized_probability(&p).unwrap(), 0.1875, epsilon = tol::QUADRATURE);

        let off = PulseModel::instantaneous(0.0, 1.3).unwrap();
        let same = TwoParticleProblem::new(
            off,
            phi.clone(),
            phi.clone(),
            phi.clone(),
            phi.clone(),
            Statistics::Boson,
        )
        .unwrap();
        assert_eq!(factorized_probability(&same).unwrap(), 0.0);
    }

    #[test]
    fn equal_state_factorized_baseline_doubles() {
        let model = PulseModel::instantaneous(FRAC_PI_4, 1.3).unwrap();
        let phi = packet(0.0);
        let p = TwoParticleProblem::with_default_finals(
            model,
            phi.clone(),
            phi,
            Statistics::Boson,
        )
        .unwrap();
        // 2 * (1/2) * (1/2) = 1/2
        assert_abs_diff_eq!(factorized_probability(&p).unwrap(), 0.5, epsilon = tol::QUADRATURE);
    }

    #[test]
    fn ratio_in_suppressed_regime_follows_overlap_law() {
        let model = PulseModel::instantaneous(FRAC_PI_6, 1.0).unwrap();
        let phi = packet(-1.0);
        let psi = packet(1.0); // d = 2 sigma -> x = e^-1
        let x = (-1.0f64).exp();
        let boson = TwoParticleProblem::with_crossed_suppressed_finals(
            model,
            phi.clone(),
            psi.clone(),
            Statistics::Boson,
        )
        .unwrap();
        assert!((ratio(&boson).unwrap() - 1.0 / (1.0 + x)).abs() < 1e-6);
        assert_abs_diff_eq!(1.0 / (1.0 + x), 0.731059, epsilon = 1e-6);
        let fermion = TwoParticleProblem::with_crossed_suppressed_finals(
            model,
            phi.clone(),
            psi.clone(),
            Statistics::Fermion,
        )
        .unwrap();
        assert!((ratio(&fermion).unwrap() - 1.0 / (1.0 - x)).abs() < 1e-6);
        assert_abs_diff_eq!(1.0 / (1.0 - x), 1.581977, epsilon = 1e-6);
    }

    #[test]
    fn ratio_tends_to_one_at_negligible_overlap() {
        let model = PulseModel::instantaneous(FRAC_PI_6, 1.0).unwrap();
        let phi = packet(-12.0);
        let psi = packet(12.0);
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let p =
                TwoParticleProblem::with_default_finals(model, phi.clone(), psi.clone(), stats)
                    .unwrap();
            assert!(p.overlap_sq() < 1e-12);
            assert_abs_diff_eq!(ratio(&p).unwrap(), 1.0, epsilon = tol::QUADRATURE);
        }
    }

    #[test]
    fn degenerate_baseline_is_an_error() {
        let off = PulseModel::instantaneous(0.0, 1.0).unwrap();
        let phi = packet(-1.0);
        let psi = packet(1.0);
        let p = TwoParticleProblem::new(
            off,
            phi.clone(),
            psi.clone(),
            phi.momentum_kick(1.0),
            psi.momentum_kick(1.0),
            Statistics::Boson,
        )
        .unwrap();
        assert_eq!(ratio(&p).unwrap_err(), Error::DegenerateBaseline);
    }

    #[test]
    fn total_probability_adds_branches() {
        let model = PulseModel::instantaneous(FRAC_PI_6, 1.3).unwrap();
        let phi = packet(-15.0);
        let psi = packet(15.0);
        let p = TwoParticleProblem::with_default_finals(
            model,
            phi.clone(),
            psi.clone(),
            Statistics::Boson,
        )
        .unwrap();
        // two independent single-atom absorptions: 2 * 0.1875
        assert!((total_absorption_probability(&p).unwrap() - 0.375).abs() < tol::PROPAGATION);

        // mirror-image configuration: exactly twice one branch
        let phi = CMWaveFunction::gaussian(grid(), -2.0, 1.0, 0.4).unwrap();
        let psi = CMWaveFunction::gaussian(grid(), 2.0, 1.0, -0.4).unwrap();
        let p = TwoParticleProblem::with_default_finals(model, phi, psi, Statistics::Boson)
            .unwrap();
        let single = transition_amplitude(&p).unwrap().total.norm_sqr();
        assert_abs_diff_eq!(
            total_absorption_probability(&p).unwrap(),
            2.0 * single,
            epsilon = 1e-10
        );
    }

    #[test]
    fn total_probability_rejects_equal_finals() {
        let model = PulseModel::instantaneous(FRAC_PI_6, 1.3).unwrap();
        let phi = packet(0.0);
        let p = TwoParticleProblem::with_default_finals(
            model,
            phi.clone(),
            phi,
            Statistics::Boson,
        )
        .unwrap();
        assert!(matches!(
            total_absorption_probability(&p),
            Err(Error::IndistinguishableFinals { .. })
        ));
    }

    #[test]
    fn equal_state_probability_values() {
        let phi = packet(0.0);
        let model = PulseModel::instantaneous(FRAC_PI_4, 1.3).unwrap();
        let p = equal_state_probability(&model, &phi, Statistics::Boson).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = tol::QUADRATURE);

        let off = PulseModel::instantaneous(0.0, 1.3).unwrap();
        assert_eq!(equal_state_probability(&off, &phi, Statistics::Boson).unwrap(), 0.0);

        assert_eq!(
            equal_state_probability(&model, &phi, Statistics::Fermion).unwrap_err(),
            Error::FermionEqualState
        );
    }

    #[test]
    fn equal_state_matches_factorized_baseline() {
        let phi = packet(0.0);
        let model = PulseModel::new(0.9, 1.3, 0.2, 0.3, 1.0).unwrap();
        let p_eq = equal_state_probability(&model, &phi, Statistics::Boson).unwrap();
        let problem = TwoParticleProblem::with_default_finals(
            model,
            phi.clone(),
            phi,
            Statistics::Boson,
        )
        .unwrap();
        assert_abs_diff_eq!(p_eq, factorized_probability(&problem).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn general_path_approaches_equal_state_limit() {
        // x = 1 - 1e-6 via a small displacement
        let model = PulseModel::instantaneous(0.6, 1.3).unwrap();
        let sep = 2.0 * (-(1.0f64 - 1e-6).ln()).sqrt(); // sigma = 1
        let phi = packet(0.0);
        let psi = packet(sep);
        let p = TwoParticleProblem::with_default_finals(
            model,
            phi.clone(),
            psi,
            Statistics::Boson,
        )
        .unwrap();
        assert!((p.overlap_sq() - (1.0 - 1e-6)).abs() < 1e-9);
        let general = transition_amplitude(&p).unwrap().total.norm_sqr();
        let limit = equal_state_probability(&model, &phi, Statistics::Boson).unwrap();
        assert!((general - limit).abs() / limit < 1e-3);
    }

    #[test]
    fn global_phase_changes_no_probability() {
        let model = PulseModel::instantaneous(0.8, 1.2).unwrap();
        let phi = packet(-1.0);
        let psi = packet(1.0);
        let mut rotated = psi.scaled(C64::cis(1.234));
        rotated.renormalize().unwrap();
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let a = probability_decomposition(
                &TwoParticleProblem::with_default_finals(model, phi.clone(), psi.clone(), stats)
                    .unwrap(),
            )
            .unwrap();
            let b = probability_decomposition(
                &TwoParticleProblem::with_default_finals(
                    model,
                    phi.clone(),
                    rotated.clone(),
                    stats,
                )
                .unwrap(),
            )
            .unwrap();
            assert_abs_diff_eq!(a.p_two, b.p_two, epsilon = tol::ALGEBRAIC);
            assert_abs_diff_eq!(a.p_fac, b.p_fac, epsilon = tol::ALGEBRAIC);
            assert_abs_diff_eq!(a.overlap_sq, b.overlap_sq, epsilon = tol::ALGEBRAIC);
        }
    }
}
