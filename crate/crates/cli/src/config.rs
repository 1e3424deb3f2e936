//! Experiment configuration: TOML files with defaults equal to the shipped
//! presets. Every config hashes to a short id that gets stamped into outputs
//! so CSVs stay traceable to the exact parameters that produced them.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A problem with the requested configuration, as opposed to a failure while
/// running it. The process exits with status 2 for these.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn load_or_default<T: DeserializeOwned + Default>(
    path: Option<&Path>,
) -> Result<T, ConfigError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", p.display())))?;
            toml::from_str(&text)
                .map_err(|e| ConfigError(format!("cannot parse {}: {e}", p.display())))
        }
    }
}

/// First 16 hex chars of the SHA-256 of the effective config's TOML form.
pub fn config_hash<T: Serialize>(cfg: &T) -> String {
    let text = toml::to_string(cfg).expect("config serializes");
    let digest = Sha256::digest(text.as_bytes());
    let mut hex = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

pub trait CommandConfig {
    fn set_seed(&mut self, seed: u64);
    fn set_log_every(&mut self, _log_every: usize) {}
    fn validate(&self) -> Result<(), ConfigError>;
}

const MAX_PARTICLES: usize = 10_000;
const MAX_ITERS: usize = 10_000_000;

fn ensure(ok: bool, msg: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError(msg.to_string()))
    }
}

/// Stochastic descent of many particles onto a fixed random target, averaged
/// over repeated runs; the reference value comes from the same runs continued
/// ten times longer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig1Config {
    pub particles: usize,
    pub runs: usize,
    pub iters: usize,
    pub reference_iters: usize,
    pub noise_radius: f64,
    pub log_every: usize,
    pub seed: u64,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Fig1Config {
            particles: 100,
            runs: 10,
            iters: 10_000,
            reference_iters: 100_000,
            noise_radius: 0.05,
            log_every: 10,
            seed: 0,
        }
    }
}

impl CommandConfig for Fig1Config {
    fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
    }

    fn set_log_every(&mut self, log_every: usize) {
        self.log_every = log_every;
    }

    fn validate(&self) -> Result<(), ConfigError> {
        ensure(
            (1..=MAX_PARTICLES).contains(&self.particles),
            "particles must be in 1..=10000",
        )?;
        ensure((1..=1000).contains(&self.runs), "runs must be in 1..=1000")?;
        ensure((1..=MAX_ITERS).contains(&self.iters), "iters must be in 1..=10000000")?;
        ensure(
            self.reference_iters >= self.iters && self.reference_iters <= MAX_ITERS,
            "reference_iters must be in iters..=10000000",
        )?;
        ensure(
            self.noise_radius.is_finite() && self.noise_radius > 0.0,
            "noise_radius must be positive",
        )?;
        ensure(self.log_every >= 1, "log_every must be at least 1")
    }
}

/// How well n equally weighted particles can approximate a uniform interval,
/// solved two ways per n (greedy atom insertion and polished descent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig2Config {
    pub ns: Vec<usize>,
    pub iters: usize,
    pub pgd_runs: usize,
    pub grid_points: usize,
    pub noise_radius: f64,
    pub lo: f64,
    pub hi: f64,
    pub seed: u64,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Fig2Config {
            ns: vec![4, 8, 16, 32, 64, 128, 256],
            iters: 30_000,
            pgd_runs: 3,
            grid_points: 4096,
            noise_radius: 0.05,
            lo: -1.0,
            hi: 1.0,
            seed: 0,
        }
    }
}

impl CommandConfig for Fig2Config {
    fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
    }

    fn validate(&self) -> Result<(), ConfigError> {
        ensure(!self.ns.is_empty(), "ns must not be empty")?;
        ensure(
            self.ns.windows(2).all(|p| p[0] < p[1]),
            "ns must be strictly increasing",
        )?;
        ensure(
            self.ns.iter().all(|&n| (1..=MAX_PARTICLES).contains(&n)),
            "every n must be in 1..=10000",
        )?;
        ensure((1..=MAX_ITERS).contains(&self.iters), "iters must be in 1..=10000000")?;
        ensure((1..=1000).contains(&self.pgd_runs), "pgd_runs must be in 1..=1000")?;
        ensure(
            (2..=1 << 20).contains(&self.grid_points),
            "grid_points must be in 2..=1048576",
        )?;
        ensure(
            self.noise_radius.is_finite() && self.noise_radius > 0.0,
            "noise_radius must be positive",
        )?;
        ensure(
            self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi,
            "need lo < hi, both finite",
        )
    }
}

/// Recovering a hidden orthonormal basis from the third moments it induces:
/// repeated descents on the sphere, each against a fresh random basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TensorConfig {
    pub dim: usize,
    pub particles: usize,
    pub runs: usize,
    pub iters: usize,
    pub gamma: f64,
    pub value_tol: f64,
    pub recovery_tol: f64,
    pub seed: u64,
}

impl Default for TensorConfig {
    fn default() -> Self {
        TensorConfig {
            dim: 4,
            particles: 4,
            runs: 20,
            iters: 2000,
            gamma: 0.1,
            value_tol: 0.01,
            recovery_tol: 0.05,
            seed: 0,
        }
    }
}

impl CommandConfig for TensorConfig {
    fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
    }

    fn validate(&self) -> Result<(), ConfigError> {
        ensure((1..=64).contains(&self.dim), "dim must be in 1..=64")?;
        ensure(
            (1..=self.dim).contains(&self.particles),
            "particles must be in 1..=dim",
        )?;
        ensure((1..=1000).contains(&self.runs), "runs must be in 1..=1000")?;
        ensure((1..=MAX_ITERS).contains(&self.iters), "iters must be in 1..=10000000")?;
        ensure(
            self.gamma.is_finite() && self.gamma > 0.0 && self.gamma < 1.0,
            "gamma must be in (0, 1)",
        )?;
        ensure(
            self.value_tol.is_finite() && self.value_tol > 0.0,
            "value_tol must be positive",
        )?;
        ensure(
            self.recovery_tol.is_finite() && self.recovery_tol > 0.0,
            "recovery_tol must be positive",
        )
    }
}

/// Gradient descent of neuron angles against a uniform arc of data on the
/// circle, cross-checked by Monte Carlo evaluation of the loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CircleNetConfig {
    pub particles: usize,
    pub iters: usize,
    pub arc_lo: f64,
    pub arc_hi: f64,
    pub mc_samples: usize,
    pub log_every: usize,
    pub seed: u64,
}

impl Default for CircleNetConfig {
    fn default() -> Self {
        CircleNetConfig {
            particles: 16,
            iters: 10_000,
            arc_lo: 0.0,
            arc_hi: std::f64::consts::PI,
            mc_samples: 1_000_000,
            log_every: 10,
            seed: 0,
        }
    }
}

impl CommandConfig for CircleNetConfig {
    fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
    }

    fn set_log_every(&mut self, log_every: usize) {
        self.log_every = log_every;
    }

    fn validate(&self) -> Result<(), ConfigError> {
        use std::f64::consts::{PI, TAU};
        ensure(
            (1..=MAX_PARTICLES).contains(&self.particles),
            "particles must be in 1..=10000",
        )?;
        ensure((1..=MAX_ITERS).contains(&self.iters), "iters must be in 1..=10000000")?;
        ensure(
            self.arc_lo.is_finite() && self.arc_hi.is_finite(),
            "arc bounds must be finite",
        )?;
        ensure(
            self.arc_lo >= 0.0 && self.arc_hi <= TAU && self.arc_lo < self.arc_hi,
            "need 0 <= arc_lo < arc_hi <= 2*pi",
        )?;
        ensure(
            self.arc_hi - self.arc_lo <= PI + 1e-12,
            "arc width must not exceed pi",
        )?;
        ensure(
            (2..=100_000_000).contains(&self.mc_samples),
            "mc_samples must be in 2..=100000000",
        )?;
        ensure(self.log_every >= 1, "log_every must be at least 1")
    }
}

/// Seed for the library's built-in property suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 42 }
    }
}

impl CommandConfig for VerifyConfig {
    fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
    }

    fn validate(&self) -> Result<(), ConfigError> {
        Ok(())
    }
}
