//! JSON run configuration and command-line overrides.

use std::fs;
use std::path::Path;

use juggle_core::sim::{NoiseSpec, SimConfig};

use crate::error::{CliError, CliResult};

/// Reads a configuration file; absent fields keep their defaults.
pub fn load_config(path: &Path) -> CliResult<SimConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text).map_err(|e| CliError::format(path, e))
}

pub fn parse_config(text: &str) -> Result<SimConfig, serde_json::Error> {
    serde_json::from_str(text)
}

/// Values given on the command line win over the configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub beta_star: Option<f64>,
    pub delta_star: Option<f64>,
    pub delta_alpha_star: Option<f64>,
    pub p: Option<f64>,
    pub h_bar_z_star: Option<f64>,
    pub seed: Option<u64>,
    pub n_steps: Option<usize>,
    /// Enables the default noise spec when the config has none.
    pub noise: bool,
    pub render_samples_per_flight: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut SimConfig) {
        let spec = &mut cfg.spec;
        if let Some(b) = self.beta_star {
            spec.beta_star = b;
        }
        if let Some(d) = self.delta_alpha_star {
            spec.delta_alpha_star = d;
        }
        match (self.delta_star, self.p) {
            (Some(d), None) => {
                spec.delta_star = Some(d);
                spec.p = None;
            }
            (None, Some(p)) => {
                spec.delta_star = None;
                spec.p = Some(p);
            }
            (Some(d), Some(p)) => {
                spec.delta_star = Some(d);
                spec.p = Some(p);
            }
            (None, None) => {}
        }
        if let Some(h) = self.h_bar_z_star {
            cfg.h_bar_z_star = h;
        }
        if let Some(s) = self.seed {
            cfg.seed = Some(s);
        }
        if let Some(n) = self.n_steps {
            cfg.n_steps = n;
        }
        if self.noise && cfg.noise.is_none() {
            cfg.noise = Some(NoiseSpec::default());
        }
        if let Some(n) = self.render_samples_per_flight {
            cfg.render_samples_per_flight = n;
        }
    }
}
