//! Statistical model of the proposed measurements: a delay-controlled
//! two-atom run with Monte Carlo emission counting, and a temperature scan
//! that maps thermal coherence onto the two-atom overlap as a qualitative
//! proxy for the trap experiment.
//!
//! This is the only module that speaks SI units; everything handed to the
//! kernel is converted to natural units (hbar = 1) here.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::PulseModel;
use crate::exchange::{
    equal_state_probability, probability_decomposition, ratio, total_absorption_probability,
    FinalsPolicy, Regime, Statistics, TwoParticleProblem,
};
use crate::hilbert::{overlap_sq, CMWaveFunction, GridSpec};
use crate::tol;

/// Planck constant, J s (exact SI value).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = PLANCK / std::f64::consts::TAU;
/// Mass of Rb-87, kg.
pub const RB87_MASS: f64 = 1.443_160_6e-25;

/// An atom species, identified by its mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomSpecies {
    pub name: String,
    /// kg
    pub mass: f64,
}

impl AtomSpecies {
    pub fn new(name: impl Into<String>, mass: f64) -> Result<Self> {
        if !mass.is_finite() || mass <= 0.0 {
            return Err(Error::InvalidParameter(format!("species mass = {mass} kg")));
        }
        Ok(Self { name: name.into(), mass })
    }

    pub fn rb87() -> Self {
        Self { name: "Rb-87".into(), mass: RB87_MASS }
    }
}

/// Thermal de Broglie wavelength `h / sqrt(2 pi m k_B T)` in meters.
pub fn thermal_wavelength(temperature: f64, species: &AtomSpecies) -> Result<f64> {
    if !temperature.is_finite() || temperature <= 0.0 {
        return Err(Error::NonpositiveTemperature { temperature });
    }
    Ok(PLANCK / (std::f64::consts::TAU * species.mass * BOLTZMANN * temperature).sqrt())
}

/// Configuration of a delay-controlled two-atom scan.
#[derive(Debug, Clone)]
pub struct DelayScanConfig {
    pub species: AtomSpecies,
    /// Packet width at the laser, m.
    pub sigma0: f64,
    /// Mean fall speed at the interaction region, m/s.
    pub v_mean: f64,
    /// Gravitational acceleration, m/s^2.
    pub g_accel: f64,
    /// Release delays to scan, s.
    pub delays: Vec<f64>,
    /// Pulse model in natural units on `grid`.
    pub model: PulseModel,
    pub stats: Statistics,
    pub shots: u64,
    pub seed: u64,
    /// Detection efficiency per absorbed atom.
    pub efficiency: f64,
    pub finals: FinalsPolicy,
    /// Kernel grid, in meters.
    pub grid: GridSpec,
}

impl DelayScanConfig {
    /// Rb-87 defaults: 0.1 um packets on a +/- 2 um grid, fall speed chosen
    /// so the scanned delays sweep the overlap from 1 to below 0.01.
    pub fn rb87_defaults(stats: Statistics) -> Self {
        let grid = GridSpec::new(1024, -2.0e-6, 2.0e-6).expect("static grid");
        // photon recoil at 780 nm; kernel mass is m/hbar in SI-derived units
        let k_recoil = std::f64::consts::TAU / 780.0e-9;
        let model = PulseModel::new(std::f64::consts::FRAC_PI_4, k_recoil, 0.0, 0.0, RB87_MASS / HBAR)
            .expect("static model");
        let delays = (0..21).map(|i| i as f64 * 0.5e-6).collect();
        Self {
            species: AtomSpecies::rb87(),
            sigma0: 1.0e-7,
            v_mean: 0.05,
            g_accel: 9.81,
            delays,
            model,
            stats,
            shots: 100_000,
            seed: 1,
            efficiency: 1.0,
            finals: FinalsPolicy::Default,
            grid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.sigma0.is_finite() || self.sigma0 <= 0.0 {
            return Err(Error::InvalidParameter(format!("sigma0 = {}", self.sigma0)));
        }
        if self.v_mean < 0.0 || self.g_accel < 0.0 {
            return Err(Error::InvalidParameter(
                "v_mean and g_accel must be nonnegative".into(),
            ));
        }
        if self.delays.iter().any(|d| *d < 0.0) {
            return Err(Error::InvalidParameter("delays must be nonnegative".into()));
        }
        if self.shots < 1 {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::InvalidParameter(format!(
                "efficiency = {} outside [0, 1]",
                self.efficiency
            )));
        }
        Ok(())
    }
}

/// Release-delay kinematics: the later atom lags by
/// `dx = v_mean * delay + g * delay^2 / 2` in position and by
/// `dk = m g delay / hbar` in wavenumber.
pub fn delay_to_states(
    cfg: &DelayScanConfig,
    delay: f64,
) -> Result<(CMWaveFunction, CMWaveFunction)> {
    let dx = cfg.v_mean * delay + 0.5 * cfg.g_accel * delay * delay;
    let dk = cfg.species.mass * cfg.g_accel * delay / HBAR;
    let phi = CMWaveFunction::gaussian(cfg.grid, 0.5 * dx, cfg.sigma0, 0.5 * dk)?;
    let psi = CMWaveFunction::gaussian(cfg.grid, -0.5 * dx, cfg.sigma0, -0.5 * dk)?;
    Ok((phi, psi))
}

/// Row status of a scan point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Ok,
    /// Routed through the equal-state superposition path.
    EqualState,
    /// Fermion pair with near-unit overlap; no probability is defined.
    PauliViolation,
}

impl std::fmt::Display for PointStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointStatus::Ok => write!(f, "ok"),
            PointStatus::EqualState => write!(f, "equal-state"),
            PointStatus::PauliViolation => write!(f, "pauli-violation"),
        }
    }
}

/// One delay-scan record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRecord {
    pub index: usize,
    /// s
    pub delay: f64,
    pub overlap_sq: f64,
    pub p_analytic: Option<f64>,
    pub detected: Option<u64>,
    pub shots: u64,
    pub regime: Option<Regime>,
    pub status: PointStatus,
}

/// Run the delay scan: analytic absorption probability per point, then a
/// seeded binomial draw of detected emissions.
///
/// The random stream of each point is derived from `(seed, index)`, so
/// results do not depend on evaluation order.
pub fn run_delay_scan(cfg: &DelayScanConfig) -> Result<Vec<CountRecord>> {
    cfg.validate()?;
    let mut records = Vec::with_capacity(cfg.delays.len());
    for (index, &delay) in cfg.delays.iter().enumerate() {
        let (phi, psi) = delay_to_states(cfg, delay)?;
        let x = overlap_sq(&phi, &psi)?;
        let (p_analytic, regime, status) = if x > 1.0 - tol::DISTINGUISHABILITY_EPSILON {
            match cfg.stats {
                Statistics::Boson => {
                    let p = equal_state_probability(&cfg.model, &phi, Statistics::Boson)?;
                    (Some(p), Some(Regime::Full), PointStatus::EqualState)
                }
                Statistics::Fermion => (None, None, PointStatus::PauliViolation),
            }
        } else {
            let problem =
                TwoParticleProblem::with_finals_policy(cfg.model, phi, psi, cfg.finals, cfg.stats)?;
            let p = total_absorption_probability(&problem)?;
            let regime = probability_decomposition(&problem)?.regime;
            (Some(p), Some(regime), PointStatus::Ok)
        };
        let detected = match p_analytic {
            Some(p) => {
                let rate = p * cfg.efficiency;
                let dist = Binomial::new(cfg.shots, rate).map_err(|e| {
                    Error::InvalidParameter(format!("binomial rate {rate}: {e}"))
                })?;
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(index as u64);
                Some(dist.sample(&mut rng))
            }
            None => None,
        };
        records.push(CountRecord {
            index,
            delay,
            overlap_sq: x,
            p_analytic,
            detected,
            shots: cfg.shots,
            regime,
            status,
        });
    }
    Ok(records)
}

/// One row of the qualitative temperature scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalScanPoint {
    /// K
    pub temperature: f64,
    /// m
    pub lambda_t: f64,
    /// Proxy overlap `exp(-pi d^2 / lambda_T^2)`.
    pub overlap_sq: f64,
    pub ratio: Option<f64>,
    pub status: PointStatus,
}

// natural-unit stand-in grid for the proxy ratio evaluation
fn proxy_grid() -> (GridSpec, f64) {
    (GridSpec::new(1024, -50.0, 50.0).expect("static grid"), 2.0)
}

// displacement realizing a target overlap^2 for width sigma
fn separation_for_overlap(x: f64, sigma: f64) -> f64 {
    2.0 * sigma * (-x.ln()).sqrt()
}

/// Temperature scan of the two-atom overlap proxy.
///
/// The overlap is tied to the thermal wavelength through the one-particle
/// thermal coherence function: `overlap^2 = exp(-pi d^2 / lambda_T^2)` at
/// mean spacing `d`, i.e. a Gaussian of width `sigma_T = lambda_T / (2 sqrt(pi))`.
/// This is a two-atom proxy for the multi-atom trap measurement, qualitative
/// by construction; each row evaluates the full probability ratio at that
/// overlap in the crossed-suppressed regime.
pub fn qualitative_temperature_scan(
    temperatures: &[f64],
    species: &AtomSpecies,
    density_spacing: f64,
    model: &PulseModel,
    stats: Statistics,
) -> Result<Vec<ThermalScanPoint>> {
    if !density_spacing.is_finite() || density_spacing <= 0.0 {
        return Err(Error::InvalidParameter(format!("density_spacing = {density_spacing}")));
    }
    let (grid, sigma) = proxy_grid();
    let mut points = Vec::with_capacity(temperatures.len());
    for &temperature in temperatures {
        let lambda_t = thermal_wavelength(temperature, species)?;
        let x_proxy =
            (-std::f64::consts::PI * density_spacing * density_spacing / (lambda_t * lambda_t))
                .exp();
        if stats == Statistics::Fermion && x_proxy > 1.0 - tol::PAULI_EPSILON {
            points.push(ThermalScanPoint {
                temperature,
                lambda_t,
                overlap_sq: x_proxy,
                ratio: None,
                status: PointStatus::PauliViolation,
            });
            continue;
        }
        // keep the realized overlap inside the grid's dynamic range and the
        // orthogonalization guard
        let x_realized = x_proxy.clamp(1e-14, 1.0 - 2.0 * tol::DISTINGUISHABILITY_EPSILON);
        let d = separation_for_overlap(x_realized, sigma);
        let phi = CMWaveFunction::gaussian(grid, -0.5 * d, sigma, 0.0)?;
        let psi = CMWaveFunction::gaussian(grid, 0.5 * d, sigma, 0.0)?;
        let problem =
            TwoParticleProblem::with_crossed_suppressed_finals(*model, phi, psi, stats)?;
        points.push(ThermalScanPoint {
            temperature,
            lambda_t,
            overlap_sq: x_proxy,
            ratio: Some(ratio(&problem)?),
            status: PointStatus::Ok,
        });
    }
    Ok(points)
}
