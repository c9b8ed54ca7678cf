//! Experiment configuration files (JSON or TOML).

use std::path::Path;

use num_complex::Complex64;
use petlab::dynsys::{Constant, Observable, SampleScheme};
use petlab::polyfam::HPolicy;
use serde::{Deserialize, Serialize};

pub const DEFAULT_BITS: u32 = 256;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub precision_bits: Option<u32>,
    pub experiment: Experiment,
}

/// Polynomial as integer coefficients, constant term first.
pub type Coeffs = Vec<i64>;

/// Affine map `x -> Sx + b`; `matrix` defaults to the identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    #[serde(default)]
    pub matrix: Option<Vec<Vec<i64>>>,
    pub translation: Vec<Constant>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    /// `x -> x + a_i` on `Z/N`.
    Cyclic { modulus: u64, shifts: Vec<u64> },
    Torus { maps: Vec<MapConfig> },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeminormMethod {
    Recursive,
    BruteForce,
    #[default]
    Both,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    Pet {
        /// Tuples of polynomials.
        family: Vec<Vec<Coeffs>>,
        #[serde(default = "default_policy")]
        policy: HPolicy,
        #[serde(default = "default_max_steps")]
        max_steps: usize,
    },
    Kbound {
        d: usize,
        l: usize,
        m: u64,
        #[serde(default = "default_kbound_budget")]
        budget: u64,
    },
    Avg {
        system: SystemConfig,
        polys: Vec<Coeffs>,
        observables: Vec<Observable>,
        /// `[M, N)` windows; defaults to `N_j = 1000·2^j`.
        #[serde(default)]
        windows: Option<Vec<(u64, u64)>>,
        #[serde(default = "default_window_count")]
        window_count: usize,
        /// Random samples are seeded from the run seed.
        #[serde(default = "default_samples")]
        samples: SamplesConfig,
    },
    Seminorm {
        modulus: u64,
        shift: u64,
        f: Vec<Complex64>,
        k: u32,
        #[serde(default)]
        method: SeminormMethod,
    },
    Dual {
        modulus: u64,
        shift: u64,
        f: Vec<Complex64>,
        k: u32,
    },
    Weyl {
        /// Real coefficients, constant term first, e.g. `["0", "0", "sqrt2"]`.
        poly: Vec<Constant>,
        windows: Vec<(u64, u64)>,
    },
    Equidist {
        /// One polynomial per coordinate.
        polys: Vec<Vec<Constant>>,
        n: u64,
        cutoff: i64,
        tol: f64,
    },
    Recur {
        maps: Vec<MapConfig>,
        polys: Vec<Coeffs>,
        /// Box `A` as `[lo, hi)` per coordinate.
        set: Vec<(Constant, Constant)>,
        epsilon: Constant,
        n_max: u64,
        #[serde(default = "default_r")]
        r: u64,
    },
    Holder {
        weights: Vec<f64>,
        partitions: Vec<Vec<usize>>,
        f: Vec<f64>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplesConfig {
    Grid { res: u32 },
    Random { count: usize },
}

impl SamplesConfig {
    pub fn scheme(&self, seed: u64) -> SampleScheme {
        match *self {
            Self::Grid { res } => SampleScheme::Grid { res },
            Self::Random { count } => SampleScheme::Random { seed, count },
        }
    }
}

fn default_policy() -> HPolicy {
    HPolicy::SmallestValid
}

fn default_max_steps() -> usize {
    1_000
}

fn default_kbound_budget() -> u64 {
    100_000
}

fn default_window_count() -> usize {
    5
}

fn default_samples() -> SamplesConfig {
    SamplesConfig::Random { count: 8 }
}

fn default_r() -> u64 {
    1
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Pet { .. } => "pet",
            Self::Kbound { .. } => "kbound",
            Self::Avg { .. } => "avg",
            Self::Seminorm { .. } => "seminorm",
            Self::Dual { .. } => "dual",
            Self::Weyl { .. } => "weyl",
            Self::Equidist { .. } => "equidist",
            Self::Recur { .. } => "recur",
            Self::Holder { .. } => "holder",
        }
    }
}

/// Reads a config; `.toml` files are TOML, everything else JSON.
pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    let is_toml = path.extension().is_some_and(|e| e == "toml");
    if is_toml {
        toml::from_str(&text).map_err(|e| ConfigError::Schema(e.to_string()))
    } else {
        serde_json::from_str(&text).map_err(|e| ConfigError::Schema(e.to_string()))
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io(String),
    Schema(String),
}
