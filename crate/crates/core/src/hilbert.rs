//! Discretized single-particle Hilbert space.
//!
//! Center-of-mass wavefunctions live on a uniform periodic 1-D grid with
//! `n_points` a power of two, so that free propagation can be applied exactly
//! in the discrete Fourier basis. Amplitudes carry dimension length^(-1/2):
//! `sum |amp|^2 * dx` is the (dimensionless) norm squared. Natural units,
//! hbar = 1.

use std::sync::{Mutex, OnceLock};

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::tol;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

/// Uniform 1-D grid: `n_points` samples on `[x_min, x_max)`, spacing
/// `dx = (x_max - x_min) / n_points`.
///
/// All wavefunctions that are compared or combined must share an identical
/// `GridSpec` (bitwise-equal bounds and point count).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n_points: usize,
    x_min: f64,
    x_max: f64,
}

impl GridSpec {
    /// Create a grid. `n_points` must be a power of two and the domain
    /// nonempty.
    pub fn new(n_points: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "n_points = {n_points} must be a power of two >= 2"
            )));
        }
        if !(x_max - x_min).is_finite() || x_max <= x_min {
            return Err(Error::InvalidParameter(format!(
                "empty grid domain [{x_min}, {x_max})"
            )));
        }
        Ok(Self { n_points, x_min, x_max })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Grid spacing.
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    /// Domain length.
    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    /// Coordinate of sample `j`.
    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    /// Wavenumber of DFT bin `j` (standard fftfreq layout).
    pub fn k(&self, j: usize) -> f64 {
        let n = self.n_points;
        let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
        std::f64::consts::TAU * m / self.length()
    }
}

/// Complex center-of-mass amplitudes on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct CMWaveFunction {
    grid: GridSpec,
    amp: Vec<C64>,
}

impl CMWaveFunction {
    /// Wrap raw amplitudes; the caller is responsible for their norm.
    pub fn from_amplitudes(grid: GridSpec, amp: Vec<C64>) -> Result<Self> {
        if amp.len() != grid.n_points() {
            return Err(Error::DimensionMismatch { left: amp.len(), right: grid.n_points() });
        }
        Ok(Self { grid, amp })
    }

    /// Normalized Gaussian packet
    /// `amp(x) = (2 pi sigma^2)^(-1/4) exp(-(x-center)^2 / (4 sigma^2)) exp(i k0 x)`,
    /// i.e. position variance `sigma^2`, mean momentum `k0`.
    ///
    /// Fails with `GridTooCoarse` if `sigma < 4 dx` and with `PacketTruncated`
    /// if the boundary amplitude exceeds 1e-8 of the peak.
    pub fn gaussian(grid: GridSpec, center: f64, sigma: f64, k0: f64) -> Result<Self> {
        let wf = Self::gaussian_periodic(grid, center, sigma, k0)?;
        let ratio = wf.boundary_ratio();
        if ratio > tol::TRUNCATION_LIMIT {
            return Err(Error::PacketTruncated { boundary_ratio: ratio, limit: tol::TRUNCATION_LIMIT });
        }
        Ok(wf)
    }

    /// Gaussian sampled on the periodic grid and renormalized numerically,
    /// with no truncation guard. Intended for dense-oracle instances where
    /// packets may legitimately touch the boundary; physics paths should use
    /// [`CMWaveFunction::gaussian`].
    pub fn gaussian_periodic(grid: GridSpec, center: f64, sigma: f64, k0: f64) -> Result<Self> {
        let min_sigma = tol::MIN_SIGMA_STEPS * grid.dx();
        if sigma < min_sigma {
            return Err(Error::GridTooCoarse { sigma, min_sigma });
        }
        let norm_const = (std::f64::consts::TAU * sigma * sigma).powf(-0.25);
        let amp = (0..grid.n_points())
            .map(|j| {
                let x = grid.x(j);
                let envelope = norm_const * (-(x - center).powi(2) / (4.0 * sigma * sigma)).exp();
                envelope * C64::cis(k0 * x)
            })
            .collect();
        let mut wf = Self { grid, amp };
        wf.renormalize()?;
        Ok(wf)
    }

    /// Normalized grid delta at sample `j` (amplitude `1/sqrt(dx)`).
    pub fn basis_state(grid: GridSpec, j: usize) -> Result<Self> {
        if j >= grid.n_points() {
            return Err(Error::DimensionMismatch { left: j, right: grid.n_points() });
        }
        let mut amp = vec![C64::ZERO; grid.n_points()];
        amp[j] = C64::new(1.0 / grid.dx().sqrt(), 0.0);
        Ok(Self { grid, amp })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    /// `sum_j |amp_j|^2 dx`.
    pub fn norm_sq(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sq() - 1.0).abs() <= tol::ALGEBRAIC
    }

    /// Rescale to unit norm. `ZeroAmplitude` if the state carries no weight.
    pub fn renormalize(&mut self) -> Result<()> {
        let n2 = self.norm_sq();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::ZeroAmplitude);
        }
        let inv = 1.0 / n2.sqrt();
        for a in &mut self.amp {
            *a *= inv;
        }
        Ok(())
    }

    /// Largest |amp| at either domain edge relative to the global peak;
    /// zero for the zero state.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.amp.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let edge = self.amp[0].norm().max(self.amp[self.amp.len() - 1].norm());
        edge / peak
    }

    /// Position expectation value.
    pub fn centroid(&self) -> f64 {
        let dx = self.grid.dx();
        self.amp
            .iter()
            .enumerate()
            .map(|(j, a)| self.grid.x(j) * a.norm_sqr())
            .sum::<f64>()
            * dx
            / self.norm_sq()
    }

    /// Position variance about the centroid.
    pub fn variance(&self) -> f64 {
        let mean = self.centroid();
        let dx = self.grid.dx();
        self.amp
            .iter()
            .enumerate()
            .map(|(j, a)| (self.grid.x(j) - mean).powi(2) * a.norm_sqr())
            .sum::<f64>()
            * dx
            / self.norm_sq()
    }

    /// Multiply by the plane-wave phase `exp(i k x)`: a momentum boost by `k`.
    /// Pointwise modulus, and hence the norm, are unchanged.
    pub fn momentum_kick(&self, k: f64) -> Self {
        let amp = self
            .amp
            .iter()
            .enumerate()
            .map(|(j, a)| a * C64::cis(k * self.grid.x(j)))
            .collect();
        Self { grid: self.grid, amp }
    }

    /// Free evolution for time `t` and mass `mass` via the spectral kernel
    /// `exp(-i k^2 t / (2 mass))`.
    ///
    /// Exactly unitary on the periodic grid; errors with `WrapAround` if the
    /// result has boundary amplitude above 1e-6 of its peak, which signals
    /// that periodic leakage makes the open-space interpretation unreliable.
    pub fn free_propagate(&self, t: f64, mass: f64) -> Result<Self> {
        if t == 0.0 {
            return Ok(self.clone());
        }
        let out = self.free_propagate_periodic(t, mass);
        let ratio = out.boundary_ratio();
        if ratio > tol::WRAP_LEAK_LIMIT {
            return Err(Error::WrapAround { boundary_ratio: ratio, limit: tol::WRAP_LEAK_LIMIT });
        }
        Ok(out)
    }

    /// Same spectral kernel without the leakage guard; the periodic result is
    /// exact on the grid regardless of wrap-around.
    pub fn free_propagate_periodic(&self, t: f64, mass: f64) -> Self {
        if t == 0.0 {
            return self.clone();
        }
        let mut out = self.clone();
        dispersion_phase(&mut out.amp, &self.grid, t, mass);
        out
    }

    /// `ca * a + cb * b` pointwise.
    pub fn linear_combination(a: &Self, ca: C64, b: &Self, cb: C64) -> Result<Self> {
        if a.grid != b.grid {
            return Err(Error::GridMismatch);
        }
        let amp = a.amp.iter().zip(&b.amp).map(|(x, y)| ca * x + cb * y).collect();
        Ok(Self { grid: a.grid, amp })
    }

    pub(crate) fn scaled(&self, c: C64) -> Self {
        let amp = self.amp.iter().map(|a| c * a).collect();
        Self { grid: self.grid, amp }
    }
}

/// Grid inner product `<a|b> = sum_j conj(a_j) b_j dx`.
pub fn inner(a: &CMWaveFunction, b: &CMWaveFunction) -> Result<C64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let dot: C64 = a.amp.iter().zip(&b.amp).map(|(x, y)| x.conj() * y).sum();
    Ok(dot * a.grid.dx())
}

/// `|<a|b>|^2`, the mutual fidelity of two normalized states.
pub fn overlap_sq(a: &CMWaveFunction, b: &CMWaveFunction) -> Result<f64> {
    Ok(inner(a, b)?.norm_sqr())
}

fn dispersion_phase(amp: &mut [C64], grid: &GridSpec, t: f64, mass: f64) {
    let n = amp.len();
    let (fwd, inv) = {
        let mut p = planner().lock().unwrap();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    };
    fwd.process(amp);
    for (j, a) in amp.iter_mut().enumerate() {
        let k = grid.k(j);
        *a *= C64::cis(-k * k * t / (2.0 * mass));
    }
    inv.process(amp);
    let scale = 1.0 / n as f64;
    for a in amp.iter_mut() {
        *a *= scale;
    }
}

/// Two-level internal state label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InternalLabel {
    Ground,
    Excited,
}

/// A single atom: CM wavefunction plus internal label.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomState {
    pub cm: CMWaveFunction,
    pub internal: InternalLabel,
}

impl AtomState {
    pub fn ground(cm: CMWaveFunction) -> Self {
        Self { cm, internal: InternalLabel::Ground }
    }

    pub fn excited(cm: CMWaveFunction) -> Self {
        Self { cm, internal: InternalLabel::Excited }
    }
}
