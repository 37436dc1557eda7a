use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use conic_defense::probability::SearchOptions;
use conic_defense::{make_params, EngagementGrid, GameParams, RestartMode, SimConfig, Strategies};
use serde::Deserialize;

/// Everything one run needs. Loaded from a flat TOML file, then patched by
/// command-line flags.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub r_t: f64,
    pub rho_t: f64,
    pub rho_a: f64,
    pub nu: f64,
    pub phi: f64,
    pub n_trials: usize,
    pub n_attackers: usize,
    pub seed: u64,
    pub dt: f64,
    pub epsilon: f64,
    pub capture_radius: f64,
    pub tau_grid: usize,
    pub theta_samples: usize,
    pub defender: String,
    pub attacker: String,
    pub restart: String,
    pub workers: Option<usize>,
    pub field_radii: usize,
    pub field_angles: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            r_t: 6.0,
            rho_t: 8.0,
            rho_a: 1.0,
            nu: 0.85,
            phi: PI / 3.0,
            n_trials: 100,
            n_attackers: 200,
            seed: 2024,
            dt: 1e-3,
            epsilon: 0.01,
            capture_radius: 0.05,
            tau_grid: 200,
            theta_samples: 181,
            defender: "optimal".into(),
            attacker: "optimal".into(),
            restart: "instant".into(),
            workers: None,
            field_radii: 141,
            field_angles: 61,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn params(&self) -> Result<GameParams> {
        make_params(self.r_t, self.rho_t, self.rho_a, self.nu, self.phi)
            .map_err(|e| anyhow::anyhow!("invalid config field `{}`: {e}", e.field()))
    }

    pub fn strategies(&self) -> Result<Strategies> {
        Ok(Strategies::new(self.defender.parse()?, self.attacker.parse()?))
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                bail!("invalid config field `{field}`: {v} must be positive")
            }
        };
        positive("dt", self.dt)?;
        positive("epsilon", self.epsilon)?;
        positive("capture_radius", self.capture_radius)?;
        if self.tau_grid < 2 {
            bail!("invalid config field `tau_grid`: need at least 2 points");
        }
        if self.theta_samples < 2 {
            bail!("invalid config field `theta_samples`: need at least 2 points");
        }
        let restart: RestartMode = self
            .restart
            .parse()
            .map_err(|e| anyhow::anyhow!("invalid config field `restart`: {e}"))?;
        Ok(SimConfig {
            dt: self.dt,
            epsilon: self.epsilon,
            capture_radius: self.capture_radius,
            restart,
            grid: EngagementGrid {
                tau_points: self.tau_grid,
                theta_points: self.theta_samples,
                ..EngagementGrid::default()
            },
            search: SearchOptions::default(),
            workers: self.workers,
        })
    }

    /// Checks every field up front so no run starts on a bad manifest.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.strategies()?;
        self.sim_config()?;
        if self.n_attackers == 0 {
            bail!("invalid config field `n_attackers`: must be at least 1");
        }
        if self.field_radii < 2 || self.field_angles < 2 {
            bail!("invalid config field `field_radii`/`field_angles`: need at least 2 points each");
        }
        Ok(())
    }
}
