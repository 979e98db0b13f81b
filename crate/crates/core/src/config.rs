//! Run defaults and the versioned parameter sets used by the checks.
//!
//! Defaults can be overridden from a flat `key = value` file:
//!
//! ```text
//! dt = 5e-4
//! grid_ny = 201
//! residual_tol = 1e-11
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flows::DEFAULT_DT;
use crate::grid::{GridError, GridSpec};
use crate::hj::ResidualTolerances;

/// Version stamped into every CSV and JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config schema_version {found} is not supported (expected {SCHEMA_VERSION})")]
    Version { found: u32 },
    #[error("invalid grid in config: {0}")]
    Grid(#[from] GridError),
    #[error("invalid config value for `{key}`: {reason}")]
    Value { key: &'static str, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    pub dt: f64,
    pub grid_x_min: f64,
    pub grid_x_max: f64,
    pub grid_nx: usize,
    pub grid_y_min: f64,
    pub grid_y_max: f64,
    pub grid_ny: usize,
    pub residual_tol: f64,
    pub fd_residual_tol: f64,
    pub gradient_tol: f64,
    pub level_tol: f64,
    pub invariance_tol: f64,
    pub invariance_duration: f64,
    pub return_tol: f64,
    pub period_budget: f64,
    pub spread_tol: f64,
    pub workers: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        let g = GridSpec::STANDARD;
        let tol = ResidualTolerances::default();
        Self {
            schema_version: SCHEMA_VERSION,
            dt: DEFAULT_DT,
            grid_x_min: g.x_min,
            grid_x_max: g.x_max,
            grid_nx: g.nx,
            grid_y_min: g.y_min,
            grid_y_max: g.y_max,
            grid_ny: g.ny,
            residual_tol: tol.analytic,
            fd_residual_tol: tol.finite_difference,
            gradient_tol: tol.gradient,
            level_tol: 1e-12,
            invariance_tol: 1e-6,
            invariance_duration: 5.0,
            return_tol: 1e-6,
            period_budget: 1000.0,
            spread_tol: 1e-4,
            workers: None,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Version { found: self.schema_version });
        }
        self.grid()?;
        let positive = [
            ("dt", self.dt),
            ("residual_tol", self.residual_tol),
            ("fd_residual_tol", self.fd_residual_tol),
            ("gradient_tol", self.gradient_tol),
            ("level_tol", self.level_tol),
            ("invariance_tol", self.invariance_tol),
            ("invariance_duration", self.invariance_duration),
            ("return_tol", self.return_tol),
            ("period_budget", self.period_budget),
            ("spread_tol", self.spread_tol),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::Value { key, reason: format!("{v} is not a positive finite number") });
            }
        }
        if self.workers == Some(0) {
            return Err(ConfigError::Value { key: "workers", reason: "must be at least 1".into() });
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec, GridError> {
        GridSpec::new(self.grid_x_min, self.grid_x_max, self.grid_nx, self.grid_y_min, self.grid_y_max, self.grid_ny)
    }

    pub fn residual_tolerances(&self) -> ResidualTolerances {
        ResidualTolerances {
            analytic: self.residual_tol,
            finite_difference: self.fd_residual_tol,
            gradient: self.gradient_tol,
        }
    }
}

/// Fixed parameter sets for property checks. Changing any of them requires
/// bumping [`test_sets::VERSION`].
pub mod test_sets {
    pub const VERSION: u32 = 1;

    /// Finite tangency points of the catalog sweep (∞ is added separately).
    pub const CATALOG_A: [f64; 3] = [-2.0, 0.0, 3.0];

    /// `(a, b)` for the horocycle and geodesic-circle oracles.
    pub const ORACLE_AB: [(f64, f64); 9] =
        [(-2.0, 0.5), (-2.0, 1.0), (-2.0, 2.0), (0.0, 0.5), (0.0, 1.0), (0.0, 2.0), (2.0, 0.5), (2.0, 1.0), (2.0, 2.0)];

    /// Abscissas of the vertical geodesics.
    pub const VERTICAL_B: [f64; 3] = [-2.0, 0.0, 2.0];

    /// Start points for graph-invariance checks.
    pub const INVARIANCE_STARTS: [(f64, f64); 10] = [
        (0.0, 1.0),
        (1.0, 1.0),
        (-1.0, 2.0),
        (2.5, 0.5),
        (-3.0, 3.0),
        (0.5, 4.0),
        (-0.5, 0.3),
        (4.0, 2.0),
        (-4.0, 6.0),
        (1.5, 8.0),
    ];

    /// `(x, y, angle)` for period detection: the start velocity points at
    /// `angle` with the hyperbolic speed of the requested energy.
    pub const PERIOD_STARTS: [(f64, f64, f64); 6] =
        [(0.0, 1.0, 0.0), (1.0, 2.0, 1.0), (-2.0, 0.5, 2.0), (3.0, 3.0, 3.0), (-1.0, 1.5, 4.0), (0.5, 0.8, 5.0)];

    /// Seed for the random round-trip sweeps.
    pub const RNG_SEED: u64 = 0x686f_726f;
}
