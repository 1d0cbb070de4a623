//! Command-line front end: overlap scans, oracle verification, the
//! delay-controlled experiment model, thermal scans, and single-instance
//! amplitude dumps.
//!
//! Exit codes: 0 success, 1 verification failure, 2 config error, 3
//! physics-domain error.

mod config;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use twoatom::evolution::PulseModel;
use twoatom::exchange::{
    equal_state_probability, factorized_probability, probability_decomposition, FinalsPolicy,
    Regime, Statistics, TwoParticleProblem,
};
use twoatom::experiment::{
    qualitative_temperature_scan, run_delay_scan, AtomSpecies, DelayScanConfig, PointStatus,
};
use twoatom::hilbert::{overlap_sq, CMWaveFunction, GridSpec};
use twoatom::oracle::run_equivalence_suite;
use twoatom::tol;

use config::{
    AmplitudeConfig, ExperimentConfig, KernelConfig, KeyValues, OracleCheckConfig,
    RatioScanConfig, ThermalConfig,
};

#[derive(Parser)]
#[command(
    name = "twoatom",
    version,
    about = "Absorption of two identical atoms: symmetrized vs factorized states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the symmetrized/factorized probability ratio against the overlap
    RatioScan(CommonArgs),
    /// Cross-validate analytic amplitudes against the dense tensor-product oracle
    OracleCheck(CommonArgs),
    /// Delay-controlled two-atom runs with Monte Carlo emission counting
    Experiment(CommonArgs),
    /// Thermal-wavelength overlap proxy scan over temperature
    Thermal(CommonArgs),
    /// Dump a single absorption analysis as JSON
    Amplitude(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key=value config file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Random seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum CliError {
    Config(String),
    Physics(twoatom::Error),
    Verification(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Physics(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config: {msg}"),
            CliError::Physics(e) => write!(f, "{e}"),
            CliError::Verification(msg) => write!(f, "verification: {msg}"),
        }
    }
}

impl From<twoatom::Error> for CliError {
    fn from(e: twoatom::Error) -> Self {
        CliError::Physics(e)
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::RatioScan(args) => cmd_ratio_scan(&args),
        Command::OracleCheck(args) => cmd_oracle_check(&args),
        Command::Experiment(args) => cmd_experiment(&args),
        Command::Thermal(args) => cmd_thermal(&args),
        Command::Amplitude(args) => cmd_amplitude(&args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}

fn load_keys(args: &CommonArgs) -> Result<KeyValues, CliError> {
    match &args.config {
        Some(path) => KeyValues::load(path).map_err(CliError::Config),
        None => Ok(KeyValues::empty()),
    }
}

fn build_grid(kernel: &KernelConfig) -> Result<GridSpec, CliError> {
    GridSpec::new(kernel.n_points, kernel.x_min, kernel.x_max)
        .map_err(|e| CliError::Config(e.to_string()))
}

fn build_model(kernel: &KernelConfig) -> Result<PulseModel, CliError> {
    PulseModel::new(kernel.theta, kernel.k_recoil, kernel.t_pre, kernel.t_post, kernel.mass)
        .map_err(|e| CliError::Config(e.to_string()))
}

fn separation_for(x: f64, sigma: f64) -> f64 {
    2.0 * sigma * (-x.max(1e-13).ln()).sqrt()
}

#[derive(Serialize)]
struct RatioRow {
    overlap_sq: f64,
    statistics: Statistics,
    p_two: Option<f64>,
    p_fac: Option<f64>,
    ratio: Option<f64>,
    ratio_law: Option<f64>,
    regime: Option<Regime>,
    status: String,
}

impl RatioRow {
    fn csv(&self) -> Vec<String> {
        vec![
            output::float(self.overlap_sq),
            self.statistics.to_string(),
            output::opt_float(self.p_two),
            output::opt_float(self.p_fac),
            output::opt_float(self.ratio),
            output::opt_float(self.ratio_law),
            self.regime.map(|r| r.to_string()).unwrap_or_default(),
            self.status.clone(),
        ]
    }
}

fn ratio_scan_row(
    cfg: &RatioScanConfig,
    grid: GridSpec,
    model: PulseModel,
    stats: Statistics,
    x_target: f64,
) -> Result<RatioRow, CliError> {
    let d = separation_for(x_target, cfg.sigma);
    let phi = CMWaveFunction::gaussian(grid, -d / 2.0, cfg.sigma, 0.0)?;
    let psi = CMWaveFunction::gaussian(grid, d / 2.0, cfg.sigma, 0.0)?;
    let x = overlap_sq(&phi, &psi)?;
    let law = 1.0 / (1.0 + stats.sign() * x);

    if x > 1.0 - tol::DISTINGUISHABILITY_EPSILON {
        return Ok(match stats {
            Statistics::Boson => {
                let p_eq = equal_state_probability(&model, &phi, Statistics::Boson)?;
                if p_eq == 0.0 {
                    RatioRow {
                        overlap_sq: x,
                        statistics: stats,
                        p_two: Some(0.0),
                        p_fac: Some(0.0),
                        ratio: None,
                        ratio_law: Some(law),
                        regime: None,
                        status: "degenerate-baseline".into(),
                    }
                } else {
                    let equal =
                        TwoParticleProblem::with_default_finals(model, phi.clone(), phi, stats)?;
                    let p_fac = factorized_probability(&equal)?;
                    RatioRow {
                        overlap_sq: x,
                        statistics: stats,
                        p_two: Some(p_eq),
                        p_fac: Some(p_fac),
                        ratio: Some(p_eq / p_fac),
                        ratio_law: Some(law),
                        regime: Some(Regime::Full),
                        status: "equal-state".into(),
                    }
                }
            }
            Statistics::Fermion => RatioRow {
                overlap_sq: x,
                statistics: stats,
                p_two: None,
                p_fac: None,
                ratio: None,
                ratio_law: None,
                regime: None,
                status: "pauli-violation".into(),
            },
        });
    }

    let problem = TwoParticleProblem::with_finals_policy(model, phi, psi, cfg.finals, stats)?;
    let result = probability_decomposition(&problem)?;
    let status = if result.ratio.is_some() { "ok" } else { "degenerate-baseline" };
    Ok(RatioRow {
        overlap_sq: x,
        statistics: stats,
        p_two: Some(result.p_two),
        p_fac: Some(result.p_fac),
        ratio: result.ratio,
        ratio_law: Some(law),
        regime: Some(result.regime),
        status: status.into(),
    })
}

fn cmd_ratio_scan(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = RatioScanConfig::from_keys(load_keys(args)?).map_err(CliError::Config)?;
    let grid = build_grid(&cfg.kernel)?;
    let model = build_model(&cfg.kernel)?;
    let mut rows = Vec::new();
    for stats in cfg.stats.list() {
        for &x_target in &cfg.overlaps {
            rows.push(ratio_scan_row(&cfg, grid, model, stats, x_target)?);
        }
    }
    let content = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let header =
                ["overlap_sq", "statistics", "p_two", "p_fac", "ratio", "ratio_law", "regime", "status"];
            output::csv(&header, &rows.iter().map(RatioRow::csv).collect::<Vec<_>>())
        }
        Format::Json => to_json(&rows)?,
    };
    output::emit(args.out.as_deref(), &content).map_err(CliError::Config)
}

fn cmd_oracle_check(args: &CommonArgs) -> Result<(), CliError> {
    let mut cfg = OracleCheckConfig::from_keys(load_keys(args)?).map_err(CliError::Config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let grid = GridSpec::new(cfg.n_points, cfg.x_min, cfg.x_max)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let report = run_equivalence_suite(grid, cfg.seed, cfg.instances)?;
    let content = match args.format {
        Some(Format::Json) => to_json(&report)?,
        Some(Format::Csv) => {
            let header = [
                "index",
                "statistics",
                "overlap_sq",
                "residual_phi_branch",
                "residual_psi_branch",
                "residual_equal_state",
                "identity_residual",
                "pass",
            ];
            let rows: Vec<Vec<String>> = report
                .instances
                .iter()
                .map(|row| {
                    vec![
                        row.index.to_string(),
                        row.statistics.to_string(),
                        output::float(row.overlap_sq),
                        output::float(row.check.residual_phi_branch),
                        output::float(row.check.residual_psi_branch),
                        output::opt_float(row.check.residual_equal_state),
                        output::float(row.check.identity_residual),
                        row.check.pass.to_string(),
                    ]
                })
                .collect();
            output::csv(&header, &rows)
        }
        None => report.to_string(),
    };
    output::emit(args.out.as_deref(), &content).map_err(CliError::Config)?;
    if report.all_pass {
        Ok(())
    } else {
        Err(CliError::Verification("oracle equivalence failed".into()))
    }
}

#[derive(Serialize)]
struct ExperimentRow {
    delay: f64,
    overlap_sq: f64,
    p_analytic: Option<f64>,
    detected: Option<u64>,
    shots: u64,
    regime: Option<Regime>,
    status: PointStatus,
}

fn cmd_experiment(args: &CommonArgs) -> Result<(), CliError> {
    let mut cfg = ExperimentConfig::from_keys(load_keys(args)?).map_err(CliError::Config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let grid = build_grid(&cfg.kernel)?;
    let model = build_model(&cfg.kernel)?;
    let species = AtomSpecies::new(cfg.species_name.clone(), cfg.species_mass)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let scan = DelayScanConfig {
        species,
        sigma0: cfg.sigma0,
        v_mean: cfg.v_mean,
        g_accel: cfg.g_accel,
        delays: cfg.delays.clone(),
        model,
        stats: cfg.stats,
        shots: cfg.shots,
        seed: cfg.seed,
        efficiency: cfg.efficiency,
        finals: cfg.finals,
        grid,
    };
    scan.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let records = run_delay_scan(&scan)?;
    let rows: Vec<ExperimentRow> = records
        .into_iter()
        .map(|r| ExperimentRow {
            delay: r.delay,
            overlap_sq: r.overlap_sq,
            p_analytic: r.p_analytic,
            detected: r.detected,
            shots: r.shots,
            regime: r.regime,
            status: r.status,
        })
        .collect();
    let content = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let header =
                ["delay", "overlap_sq", "p_analytic", "detected", "shots", "regime", "status"];
            let csv_rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        output::float(r.delay),
                        output::float(r.overlap_sq),
                        output::opt_float(r.p_analytic),
                        output::opt_int(r.detected),
                        r.shots.to_string(),
                        r.regime.map(|x| x.to_string()).unwrap_or_default(),
                        r.status.to_string(),
                    ]
                })
                .collect();
            output::csv(&header, &csv_rows)
        }
        Format::Json => to_json(&rows)?,
    };
    output::emit(args.out.as_deref(), &content).map_err(CliError::Config)
}

#[derive(Serialize)]
struct ThermalRow {
    temperature: f64,
    lambda_t: f64,
    overlap_sq_proxy: f64,
    ratio_boson: Option<f64>,
    ratio_fermion: Option<f64>,
    status: String,
}

fn cmd_thermal(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = ThermalConfig::from_keys(load_keys(args)?).map_err(CliError::Config)?;
    let species = AtomSpecies::new(cfg.species_name.clone(), cfg.species_mass)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let model = PulseModel::instantaneous(cfg.theta, cfg.k_recoil)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let boson = qualitative_temperature_scan(
        &cfg.temperatures,
        &species,
        cfg.spacing,
        &model,
        Statistics::Boson,
    )?;
    let fermion = qualitative_temperature_scan(
        &cfg.temperatures,
        &species,
        cfg.spacing,
        &model,
        Statistics::Fermion,
    )?;
    let rows: Vec<ThermalRow> = boson
        .iter()
        .zip(&fermion)
        .map(|(b, f)| ThermalRow {
            temperature: b.temperature,
            lambda_t: b.lambda_t,
            overlap_sq_proxy: b.overlap_sq,
            ratio_boson: b.ratio,
            ratio_fermion: f.ratio,
            status: if f.status == PointStatus::PauliViolation {
                "fermion-pauli-violation".into()
            } else {
                "ok".into()
            },
        })
        .collect();
    let content = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let header =
                ["temperature", "lambda_t", "overlap_sq_proxy", "ratio_boson", "ratio_fermion", "status"];
            let csv_rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        output::float(r.temperature),
                        output::float(r.lambda_t),
                        output::float(r.overlap_sq_proxy),
                        output::opt_float(r.ratio_boson),
                        output::opt_float(r.ratio_fermion),
                        r.status.clone(),
                    ]
                })
                .collect();
            output::csv(&header, &csv_rows)
        }
        Format::Json => to_json(&rows)?,
    };
    output::emit(args.out.as_deref(), &content).map_err(CliError::Config)
}

#[derive(Serialize)]
struct AmplitudeDump {
    statistics: Statistics,
    finals: FinalsPolicy,
    result: twoatom::exchange::AbsorptionResult,
}

fn cmd_amplitude(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = AmplitudeConfig::from_keys(load_keys(args)?).map_err(CliError::Config)?;
    let grid = build_grid(&cfg.kernel)?;
    let model = build_model(&cfg.kernel)?;
    let phi = CMWaveFunction::gaussian(grid, cfg.center_phi, cfg.sigma, cfg.k0_phi)?;
    let psi = CMWaveFunction::gaussian(grid, cfg.center_psi, cfg.sigma, cfg.k0_psi)?;
    let problem = TwoParticleProblem::with_finals_policy(model, phi, psi, cfg.finals, cfg.stats)?;
    let result = probability_decomposition(&problem)?;
    let dump = AmplitudeDump { statistics: cfg.stats, finals: cfg.finals, result };
    let content = to_json(&dump)?;
    output::emit(args.out.as_deref(), &content).map_err(CliError::Config)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Config(format!("serialization: {e}")))
}
