//! Flat key=value config files, with strict unknown-key rejection.
//!
//! Lines are `key = value`; `#` starts a comment. Every command documents its
//! keys in `configs/*.conf`; any key a command does not consume is a config
//! error.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use twoatom::exchange::{FinalsPolicy, Statistics};

pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(format!("line {}: empty key", lineno + 1));
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(format!("line {}: duplicate key '{key}'", lineno + 1));
            }
        }
        Ok(Self { entries })
    }

    fn take_raw(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    pub fn take<T: FromStr>(&mut self, key: &str, default: T) -> Result<T, String>
    where
        T::Err: std::fmt::Display,
    {
        match self.take_raw(key) {
            Some(raw) => raw.parse::<T>().map_err(|e| format!("key '{key}': {e}")),
            None => Ok(default),
        }
    }

    /// Comma-separated list of floats, if the key is present.
    pub fn take_list(&mut self, key: &str) -> Result<Option<Vec<f64>>, String> {
        match self.take_raw(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| format!("key '{key}': {e}")))
                .collect::<Result<Vec<f64>, String>>()
                .map(Some),
        }
    }

    /// Every key must have been consumed by now.
    pub fn finish(self) -> Result<(), String> {
        if let Some(key) = self.entries.keys().next() {
            return Err(format!("unknown key '{key}'"));
        }
        Ok(())
    }
}

/// Grid plus pulse parameters shared by several commands.
pub struct KernelConfig {
    pub n_points: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub theta: f64,
    pub k_recoil: f64,
    pub t_pre: f64,
    pub t_post: f64,
    pub mass: f64,
}

impl KernelConfig {
    pub fn from_keys(
        kv: &mut KeyValues,
        defaults: KernelConfig,
    ) -> Result<Self, String> {
        Ok(Self {
            n_points: kv.take("n_points", defaults.n_points)?,
            x_min: kv.take("x_min", defaults.x_min)?,
            x_max: kv.take("x_max", defaults.x_max)?,
            theta: kv.take("theta", defaults.theta)?,
            k_recoil: kv.take("k_recoil", defaults.k_recoil)?,
            t_pre: kv.take("t_pre", defaults.t_pre)?,
            t_post: kv.take("t_post", defaults.t_post)?,
            mass: kv.take("mass", defaults.mass)?,
        })
    }

    pub fn natural_units() -> Self {
        Self {
            n_points: 1024,
            x_min: -50.0,
            x_max: 50.0,
            theta: std::f64::consts::FRAC_PI_6,
            k_recoil: 1.0,
            t_pre: 0.0,
            t_post: 0.0,
            mass: 1.0,
        }
    }
}

pub enum StatsSelection {
    One(Statistics),
    Both,
}

impl StatsSelection {
    pub fn parse(raw: &str) -> Result<Self, String> {
        match raw.trim().to_ascii_lowercase().as_str() {
            "both" => Ok(StatsSelection::Both),
            other => Statistics::from_str(other)
                .map(StatsSelection::One)
                .map_err(|e| e.to_string()),
        }
    }

    pub fn list(&self) -> Vec<Statistics> {
        match self {
            StatsSelection::One(s) => vec![*s],
            StatsSelection::Both => vec![Statistics::Boson, Statistics::Fermion],
        }
    }
}

pub struct RatioScanConfig {
    pub stats: StatsSelection,
    pub overlaps: Vec<f64>,
    pub sigma: f64,
    pub kernel: KernelConfig,
    pub finals: FinalsPolicy,
}

impl RatioScanConfig {
    pub fn from_keys(mut kv: KeyValues) -> Result<Self, String> {
        let stats = StatsSelection::parse(&kv.take("statistics", String::from("both"))?)?;
        let overlaps = match kv.take_list("overlaps")? {
            Some(list) => {
                if list.iter().any(|x| !(0.0..=1.0).contains(x)) {
                    return Err("overlaps must lie in [0, 1]".into());
                }
                list
            }
            None => {
                let min = kv.take("overlap_min", 0.0)?;
                let max = kv.take("overlap_max", 0.9)?;
                let points: usize = kv.take("overlap_points", 50)?;
                if !(0.0..=1.0).contains(&min) || !(0.0..=1.0).contains(&max) || max < min {
                    return Err("overlap bounds must satisfy 0 <= min <= max <= 1".into());
                }
                if points < 1 {
                    return Err("overlap_points must be at least 1".into());
                }
                linspace(min, max, points)
            }
        };
        let sigma = kv.take("sigma", 2.0)?;
        let kernel = KernelConfig::from_keys(&mut kv, KernelConfig::natural_units())?;
        let finals = kv
            .take("finals", String::from("suppressed"))?
            .parse::<FinalsPolicy>()
            .map_err(|e| e.to_string())?;
        kv.finish()?;
        Ok(Self { stats, overlaps, sigma, kernel, finals })
    }
}

pub struct OracleCheckConfig {
    pub n_points: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub instances: usize,
    pub seed: u64,
}

impl OracleCheckConfig {
    pub fn from_keys(mut kv: KeyValues) -> Result<Self, String> {
        let cfg = Self {
            n_points: kv.take("n_points", 64)?,
            x_min: kv.take("x_min", -50.0)?,
            x_max: kv.take("x_max", 50.0)?,
            instances: kv.take("instances", 100)?,
            seed: kv.take("seed", 20250811u64)?,
        };
        kv.finish()?;
        if cfg.n_points > twoatom::tol::ORACLE_MAX_POINTS {
            return Err(format!(
                "TooLarge: n_points = {} exceeds the dense-oracle limit {}",
                cfg.n_points,
                twoatom::tol::ORACLE_MAX_POINTS
            ));
        }
        if cfg.instances < 1 {
            return Err("instances must be at least 1".into());
        }
        Ok(cfg)
    }
}

pub struct ExperimentConfig {
    pub stats: Statistics,
    pub sigma0: f64,
    pub v_mean: f64,
    pub g_accel: f64,
    pub delays: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
    pub efficiency: f64,
    pub finals: FinalsPolicy,
    pub species_name: String,
    pub species_mass: f64,
    pub kernel: KernelConfig,
}

impl ExperimentConfig {
    pub fn from_keys(mut kv: KeyValues) -> Result<Self, String> {
        let stats = kv
            .take("statistics", String::from("boson"))?
            .parse::<Statistics>()
            .map_err(|e| e.to_string())?;
        let delays = match kv.take_list("delays")? {
            Some(list) => list,
            None => {
                let min = kv.take("delay_min", 0.0)?;
                let max = kv.take("delay_max", 1.0e-5)?;
                let points: usize = kv.take("delay_points", 21)?;
                if points < 1 {
                    return Err("delay_points must be at least 1".into());
                }
                linspace(min, max, points)
            }
        };
        let si_defaults = KernelConfig {
            n_points: 1024,
            x_min: -2.0e-6,
            x_max: 2.0e-6,
            theta: std::f64::consts::FRAC_PI_4,
            k_recoil: std::f64::consts::TAU / 780.0e-9,
            t_pre: 0.0,
            t_post: 0.0,
            mass: twoatom::experiment::RB87_MASS / twoatom::experiment::HBAR,
        };
        let cfg = Self {
            stats,
            sigma0: kv.take("sigma0", 1.0e-7)?,
            v_mean: kv.take("v_mean", 0.05)?,
            g_accel: kv.take("g_accel", 9.81)?,
            delays,
            shots: kv.take("shots", 100_000u64)?,
            seed: kv.take("seed", 1u64)?,
            efficiency: kv.take("efficiency", 1.0)?,
            finals: kv
                .take("finals", String::from("default"))?
                .parse::<FinalsPolicy>()
                .map_err(|e| e.to_string())?,
            species_name: kv.take("species_name", String::from("Rb-87"))?,
            species_mass: kv.take("species_mass", twoatom::experiment::RB87_MASS)?,
            kernel: KernelConfig::from_keys(&mut kv, si_defaults)?,
        };
        kv.finish()?;
        Ok(cfg)
    }
}

pub struct ThermalConfig {
    pub temperatures: Vec<f64>,
    pub spacing: f64,
    pub species_name: String,
    pub species_mass: f64,
    pub theta: f64,
    pub k_recoil: f64,
}

impl ThermalConfig {
    pub fn from_keys(mut kv: KeyValues) -> Result<Self, String> {
        let temperatures = match kv.take_list("temperatures")? {
            Some(list) => list,
            None => {
                let t_min: f64 = kv.take("t_min", 1.0e-9)?;
                let t_max: f64 = kv.take("t_max", 8.192e-6)?;
                let points: usize = kv.take("t_points", 14)?;
                if !t_min.is_finite() || t_min <= 0.0 || t_max < t_min {
                    return Err("temperature bounds must satisfy 0 < t_min <= t_max".into());
                }
                if points < 1 {
                    return Err("t_points must be at least 1".into());
                }
                geomspace(t_min, t_max, points)
            }
        };
        if temperatures.iter().any(|t| *t <= 0.0) {
            return Err("temperatures must be positive".into());
        }
        let cfg = Self {
            temperatures,
            spacing: kv.take("spacing", 5.0e-7)?,
            species_name: kv.take("species_name", String::from("Rb-87"))?,
            species_mass: kv.take("species_mass", twoatom::experiment::RB87_MASS)?,
            theta: kv.take("theta", std::f64::consts::FRAC_PI_4)?,
            k_recoil: kv.take("k_recoil", 0.5)?,
        };
        kv.finish()?;
        Ok(cfg)
    }
}

pub struct AmplitudeConfig {
    pub stats: Statistics,
    pub center_phi: f64,
    pub center_psi: f64,
    pub k0_phi: f64,
    pub k0_psi: f64,
    pub sigma: f64,
    pub kernel: KernelConfig,
    pub finals: FinalsPolicy,
}

impl AmplitudeConfig {
    pub fn from_keys(mut kv: KeyValues) -> Result<Self, String> {
        let cfg = Self {
            stats: kv
                .take("statistics", String::from("boson"))?
                .parse::<Statistics>()
                .map_err(|e| e.to_string())?,
            center_phi: kv.take("center_phi", -1.0)?,
            center_psi: kv.take("center_psi", 1.0)?,
            k0_phi: kv.take("k0_phi", 0.0)?,
            k0_psi: kv.take("k0_psi", 0.0)?,
            sigma: kv.take("sigma", 1.0)?,
            kernel: KernelConfig::from_keys(&mut kv, KernelConfig::natural_units())?,
            finals: kv
                .take("finals", String::from("default"))?
                .parse::<FinalsPolicy>()
                .map_err(|e| e.to_string())?,
        };
        kv.finish()?;
        Ok(cfg)
    }
}

pub fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    (0..points)
        .map(|i| min + (max - min) * i as f64 / (points - 1) as f64)
        .collect()
}

pub fn geomspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let log_ratio = (max / min).ln();
    (0..points)
        .map(|i| min * (log_ratio * i as f64 / (points - 1) as f64).exp())
        .collect()
}
