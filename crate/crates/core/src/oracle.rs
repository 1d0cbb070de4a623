//! Brute-force cross-validation in the explicit two-particle tensor space.
//!
//! The single-particle evolution is materialized as a dense matrix on the
//! doubled (internal x CM) basis and applied factor-wise to explicit
//! two-particle vectors; projecting onto the final states must reproduce the
//! analytic amplitudes of [`crate::exchange`] to 1e-10. Everything here works
//! on the periodic grid, so wide or boundary-touching packets are legitimate
//! instances.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{default_final, Bounds, PulseModel};
use crate::exchange::{
    equal_state_amplitude_explicit, normalization_factor, probability_decomposition_with,
    transition_amplitude_with, Statistics, TwoParticleProblem,
};
use crate::hilbert::{AtomState, CMWaveFunction, GridSpec, InternalLabel};
use crate::tol;

fn check_size(grid: &GridSpec) -> Result<()> {
    if grid.n_points() > tol::ORACLE_MAX_POINTS {
        return Err(Error::TooLarge { n_points: grid.n_points(), max: tol::ORACLE_MAX_POINTS });
    }
    Ok(())
}

/// One atom's basis has `2 * n_points` entries: internal label (slow index)
/// times grid sample (fast index). Amplitudes are scaled by `sqrt(dx)` so the
/// Euclidean norm matches the grid norm.
fn factor_vector(cm: &CMWaveFunction, label: InternalLabel) -> Vec<C64> {
    let n = cm.grid().n_points();
    let scale = cm.grid().dx().sqrt();
    let mut v = vec![C64::ZERO; 2 * n];
    let offset = match label {
        InternalLabel::Ground => 0,
        InternalLabel::Excited => n,
    };
    for (j, a) in cm.amplitudes().iter().enumerate() {
        v[offset + j] = a * scale;
    }
    v
}

/// Explicit two-particle state vector (particle-1 index slow).
#[derive(Debug, Clone)]
pub struct DenseState {
    dim: usize,
    data: Vec<C64>,
}

impl DenseState {
    fn product(a: &[C64], b: &[C64]) -> Self {
        let dim = a.len();
        let mut data = vec![C64::ZERO; dim * dim];
        for (i, &ai) in a.iter().enumerate() {
            if ai == C64::ZERO {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                data[i * dim + j] = ai * bj;
            }
        }
        Self { dim, data }
    }

    fn add_scaled(&mut self, other: &Self, c: C64) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += c * y;
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Normalized (anti)symmetrized two-particle vector
/// `N (phi x psi +/- psi x phi) |gg>`; raises `PauliViolation` for a fermion
/// pair with near-unit overlap.
pub fn build_symmetrized(
    phi: &CMWaveFunction,
    psi: &CMWaveFunction,
    stats: Statistics,
) -> Result<DenseState> {
    if phi.grid() != psi.grid() {
        return Err(Error::GridMismatch);
    }
    check_size(&phi.grid())?;
    let x = crate::hilbert::overlap_sq(phi, psi)?.min(1.0);
    let n_i = normalization_factor(x, stats)?;
    let fg = factor_vector(phi, InternalLabel::Ground);
    let sg = factor_vector(psi, InternalLabel::Ground);
    let mut state = DenseState::product(&fg, &sg);
    let swapped = DenseState::product(&sg, &fg);
    state.add_scaled(&swapped, C64::new(stats.sign(), 0.0));
    for a in &mut state.data {
        *a *= n_i;
    }
    Ok(state)
}

/// The symmetrized initial vector of a problem.
pub fn build_initial(problem: &TwoParticleProblem) -> Result<DenseState> {
    build_symmetrized(problem.phi(), problem.psi(), problem.statistics())
}

/// Final mixture-branch vector `(|ex_e> |gr_g> +/- |gr_g> |ex_e>) / sqrt(2)`.
pub fn build_final_branch(
    excited: &CMWaveFunction,
    ground: &CMWaveFunction,
    stats: Statistics,
) -> Result<DenseState> {
    if excited.grid() != ground.grid() {
        return Err(Error::GridMismatch);
    }
    check_size(&excited.grid())?;
    let ex = factor_vector(excited, InternalLabel::Excited);
    let gr = factor_vector(ground, InternalLabel::Ground);
    let mut state = DenseState::product(&ex, &gr);
    let swapped = DenseState::product(&gr, &ex);
    state.add_scaled(&swapped, C64::new(stats.sign(), 0.0));
    let scale = 0.5f64.sqrt();
    for a in &mut state.data {
        *a *= scale;
    }
    Ok(state)
}

/// Equal-state superposition final `(|pt_e> |p_g> + |p_g> |pt_e>) / sqrt(2)`.
pub fn build_final_equal(
    phi_tilde: &CMWaveFunction,
    phi: &CMWaveFunction,
) -> Result<DenseState> {
    build_final_branch(phi_tilde, phi, Statistics::Boson)
}

/// Dense single-particle evolution matrix on the doubled basis, row-major.
#[derive(Debug, Clone)]
pub struct DenseUnitary {
    dim: usize,
    data: Vec<C64>,
}

impl DenseUnitary {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    /// `max |U^dag U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                let mut g = C64::ZERO;
                for r in 0..d {
                    g += self.data[r * d + a].conj() * self.data[r * d + b];
                }
                if a == b {
                    g -= C64::ONE;
                }
                worst = worst.max(g.norm());
            }
        }
        worst
    }

    /// Apply `U (x) U` to a two-particle vector.
    pub fn apply_two_particle(&self, state: &DenseState) -> Result<DenseState> {
        if state.dim != self.dim {
            return Err(Error::DimensionMismatch { left: state.dim, right: self.dim });
        }
        let d = self.dim;
        // (I x U): each particle-1 block is a matrix-vector product
        let mut mid = vec![C64::ZERO; d * d];
        for i1 in 0..d {
            let block = &state.data[i1 * d..(i1 + 1) * d];
            let out = &mut mid[i1 * d..(i1 + 1) * d];
            for (r, o) in out.iter_mut().enumerate() {
                let row = &self.data[r * d..(r + 1) * d];
                *o = row.iter().zip(block).map(|(u, v)| u * v).sum();
            }
        }
        // (U x I): matrix product along the particle-1 index
        let mut data = vec![C64::ZERO; d * d];
        for r in 0..d {
            let row = &self.data[r * d..(r + 1) * d];
            let out = &mut data[r * d..(r + 1) * d];
            for (k, &u) in row.iter().enumerate() {
                if u == C64::ZERO {
                    continue;
                }
                let block = &mid[k * d..(k + 1) * d];
                for (o, v) in out.iter_mut().zip(block) {
                    *o += u * v;
                }
            }
        }
        Ok(DenseState { dim: d, data })
    }
}

/// Materialize the pulse evolution by applying it to every basis vector.
pub fn build_dense_unitary(model: &PulseModel, grid: GridSpec) -> Result<DenseUnitary> {
    check_size(&grid)?;
    let n = grid.n_points();
    let dim = 2 * n;
    let scale = grid.dx().sqrt();
    let mut data = vec![C64::ZERO; dim * dim];
    for col in 0..dim {
        let (label, j) = if col < n {
            (InternalLabel::Ground, col)
        } else {
            (InternalLabel::Excited, col - n)
        };
        let basis = CMWaveFunction::basis_state(grid, j)?;
        let channels =
            model.apply_with(&AtomState { cm: basis, internal: label }, Bounds::Periodic)?;
        for (row_j, a) in channels.g.amplitudes().iter().enumerate() {
            data[row_j * dim + col] = a * scale;
        }
        for (row_j, a) in channels.e.amplitudes().iter().enumerate() {
            data[(n + row_j) * dim + col] = a * scale;
        }
    }
    Ok(DenseUnitary { dim, data })
}

/// Inner product `<final | applied>` in the full tensor space.
pub fn project_amplitude(fin: &DenseState, applied: &DenseState) -> Result<C64> {
    if fin.dim != applied.dim {
        return Err(Error::DimensionMismatch { left: fin.dim, right: applied.dim });
    }
    Ok(fin.data.iter().zip(&applied.data).map(|(f, a)| f.conj() * a).sum())
}

/// Residuals of the dense-vs-analytic comparison for one problem.
///
/// The swapped-branch amplitude is compared against the analytic value times
/// the statistics sign, because exchanging the state labels flips the sign of
/// the fermionic initial vector (a pure convention, invisible in any
/// probability).
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceCheck {
    pub residual_phi_branch: f64,
    pub residual_psi_branch: f64,
    /// Only evaluated for bosons (the equal-state path is Pauli-forbidden
    /// otherwise).
    pub residual_equal_state: Option<f64>,
    /// Residual of the probability-decomposition identity on this instance.
    pub identity_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compare the analytic transition amplitudes with dense tensor-product
/// projections on both mixture branches, plus the equal-state superposition
/// branch for bosons.
pub fn verify_equivalence(problem: &TwoParticleProblem) -> Result<EquivalenceCheck> {
    let grid = problem.phi().grid();
    check_size(&grid)?;
    let unitary = build_dense_unitary(problem.model(), grid)?;
    let evolved = unitary.apply_two_particle(&build_initial(problem)?)?;

    let stats = problem.statistics();
    let final_phi = build_final_branch(problem.phi_tilde(), problem.psi(), stats)?;
    let dense_phi = project_amplitude(&final_phi, &evolved)?;
    let analytic_phi = transition_amplitude_with(problem, Bounds::Periodic)?.total;
    let residual_phi_branch = (dense_phi - analytic_phi).norm();

    let final_psi = build_final_branch(problem.psi_tilde(), problem.phi(), stats)?;
    let dense_psi = project_amplitude(&final_psi, &evolved)?;
    let analytic_psi =
        stats.sign() * transition_amplitude_with(&problem.swapped(), Bounds::Periodic)?.total;
    let residual_psi_branch = (dense_psi - analytic_psi).norm();

    let residual_equal_state = if stats == Statistics::Boson {
        let initial = build_symmetrized(problem.phi(), problem.phi(), Statistics::Boson)?;
        let evolved_eq = unitary.apply_two_particle(&initial)?;
        let final_eq = build_final_equal(problem.phi_tilde(), problem.phi())?;
        let dense_eq = project_amplitude(&final_eq, &evolved_eq)?;
        let analytic_eq = equal_state_amplitude_explicit(
            problem.model(),
            problem.phi(),
            problem.phi_tilde(),
            Bounds::Periodic,
        )?;
        Some((dense_eq - analytic_eq).norm())
    } else {
        None
    };

    let identity_residual = probability_decomposition_with(problem, Bounds::Periodic)?
        .identity_residual(stats);

    let tolerance = tol::ORACLE_AGREEMENT;
    let pass = residual_phi_branch <= tolerance
        && residual_psi_branch <= tolerance
        && residual_equal_state.is_none_or(|r| r <= tolerance)
        && identity_residual < tol::ALGEBRAIC;
    Ok(EquivalenceCheck {
        residual_phi_branch,
        residual_psi_branch,
        residual_equal_state,
        identity_residual,
        tolerance,
        pass,
    })
}

/// Parameters of one randomized oracle instance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InstanceParams {
    pub center_phi: f64,
    pub center_psi: f64,
    pub sigma: f64,
    pub theta: f64,
    pub k_recoil: f64,
    pub t_pre: f64,
    pub t_post: f64,
}

impl InstanceParams {
    /// Draw one instance: centers uniform on the middle half of the domain,
    /// width uniform in `[4 dx, 16 dx]`, `theta` in `[0.1, 1.4]`, recoil in
    /// `[0, 4/sigma]`, free flights in `[0, 1]`.
    pub fn sample<R: Rng>(grid: &GridSpec, rng: &mut R) -> Self {
        let quarter = grid.length() / 4.0;
        let lo = grid.x_min() + quarter;
        let hi = grid.x_max() - quarter;
        let dx = grid.dx();
        let sigma = rng.random_range(4.0 * dx..16.0 * dx);
        Self {
            center_phi: rng.random_range(lo..hi),
            center_psi: rng.random_range(lo..hi),
            sigma,
            theta: rng.random_range(0.1..1.4),
            k_recoil: rng.random_range(0.0..4.0 / sigma),
            t_pre: rng.random_range(0.0..1.0),
            t_post: rng.random_range(0.0..1.0),
        }
    }

    /// Realize the instance as a problem with the pulse's own finals
    /// (constructed on the periodic grid).
    pub fn build(&self, grid: GridSpec, stats: Statistics) -> Result<TwoParticleProblem> {
        let model = PulseModel::new(self.theta, self.k_recoil, self.t_pre, self.t_post, 1.0)?;
        let phi = CMWaveFunction::gaussian_periodic(grid, self.center_phi, self.sigma, 0.0)?;
        let psi = CMWaveFunction::gaussian_periodic(grid, self.center_psi, self.sigma, 0.0)?;
        let phi_tilde = default_final(&model, &phi, Bounds::Periodic)?;
        let psi_tilde = default_final(&model, &psi, Bounds::Periodic)?;
        TwoParticleProblem::new(model, phi, psi, phi_tilde, psi_tilde, stats)
    }
}

/// Report row for one randomized instance.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub index: usize,
    pub statistics: Statistics,
    pub params: InstanceParams,
    pub overlap_sq: f64,
    pub check: EquivalenceCheck,
}

/// Summary of a randomized equivalence run.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub seed: u64,
    pub n_points: usize,
    pub instances_per_statistics: usize,
    pub tolerance: f64,
    pub instances: Vec<InstanceReport>,
    pub all_pass: bool,
}

impl std::fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "oracle equivalence: seed = {}, n_points = {}, {} instances per statistics, tolerance {:.1e}",
            self.seed, self.n_points, self.instances_per_statistics, self.tolerance
        )?;
        for row in &self.instances {
            let eq = row
                .check
                .residual_equal_state
                .map_or(String::from("-"), |r| format!("{r:.3e}"));
            writeln!(
                f,
                "  [{:>3}] {:<7} centers ({:+.2}, {:+.2})  sigma {:.2}  theta {:.3}  k {:.3}  t ({:.2}, {:.2})  x = {:.4}  residuals: phi {:.3e}  psi {:.3e}  eq {}  {}",
                row.index,
                row.statistics.to_string(),
                row.params.center_phi,
                row.params.center_psi,
                row.params.sigma,
                row.params.theta,
                row.params.k_recoil,
                row.params.t_pre,
                row.params.t_post,
                row.overlap_sq,
                row.check.residual_phi_branch,
                row.check.residual_psi_branch,
                eq,
                if row.check.pass { "PASS" } else { "FAIL" }
            )?;
        }
        writeln!(f, "overall: {}", if self.all_pass { "PASS" } else { "FAIL" })
    }
}

/// Run `instances_per_statistics` randomized comparisons for each statistics.
/// Fermion instances are resampled until `overlap^2 <= 0.99`.
pub fn run_equivalence_suite(
    grid: GridSpec,
    seed: u64,
    instances_per_statistics: usize,
) -> Result<EquivalenceReport> {
    check_size(&grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::new();
    let mut all_pass = true;
    let mut index = 0;
    for stats in [Statistics::Boson, Statistics::Fermion] {
        let mut produced = 0;
        while produced < instances_per_statistics {
            let params = InstanceParams::sample(&grid, &mut rng);
            let problem = match params.build(grid, stats) {
                Ok(p) => p,
                // fermion draw too close to unit overlap: resample
                Err(Error::PauliViolation { .. }) => continue,
                Err(e) => return Err(e),
            };
            if stats == Statistics::Fermion && problem.overlap_sq() > 0.99 {
                continue;
            }
            let check = verify_equivalence(&problem)?;
            all_pass &= check.pass;
            instances.push(InstanceReport {
                index,
                statistics: stats,
                params,
                overlap_sq: problem.overlap_sq(),
                check,
            });
            produced += 1;
            index += 1;
        }
    }
    Ok(EquivalenceReport {
        seed,
        n_points: grid.n_points(),
        instances_per_statistics,
        tolerance: tol::ORACLE_AGREEMENT,
        instances,
        all_pass,
    })
}
