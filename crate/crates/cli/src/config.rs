//! Run configuration: a sectioned document (TOML, or JSON as an alternate)
//! whose effective value is echoed into every output header, so any output
//! can be reproduced bit-identically from its own header.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use spinvalve_core::modes::SystemParams;
use spinvalve_core::simulator::{EvolveConfig, WavepacketSpec};
use spinvalve_core::{Branch, Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub alpha: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub g: f64,
    pub epsilon: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        SystemSection {
            alpha: PI / 20.0,
            gamma: 0.002,
            lambda: 0.025,
            g: 0.9,
            epsilon: PI / 4.0 - PI / 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SpinSection {
    pub a: f64,
    pub b: f64,
}

impl Default for SpinSection {
    fn default() -> Self {
        SpinSection {
            a: PI / 4.0,
            b: PI / 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    /// Quasimomentum scan for `smatrix` (open interval endpoints included as given).
    pub phi_min: f64,
    pub phi_max: f64,
    pub phi_steps: usize,
    /// Grid for `map` over `(0, g_max] x (0, lambda_max]`.
    pub g_max: f64,
    pub g_cells: usize,
    pub lambda_max: f64,
    pub lambda_cells: usize,
    /// Site range for `texture` outputs.
    pub site_min: i64,
    pub site_max: i64,
    /// Optional quoted eigenenergy for the localized-texture plot; when set,
    /// the decay is taken from it instead of from `Omega(g, lambda)`.
    pub texture_omega: Option<f64>,
}

impl Default for ScanSection {
    fn default() -> Self {
        ScanSection {
            phi_min: 0.005,
            phi_max: PI - 0.005,
            phi_steps: 400,
            g_max: 2.0,
            g_cells: 60,
            lambda_max: 2.0,
            lambda_cells: 60,
            site_min: -40,
            site_max: 40,
            texture_omega: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    /// Absolute packet amplitude; when absent, `s0_fraction` of the
    /// condensate peak is used.
    pub s0: Option<f64>,
    pub s0_fraction: f64,
    pub s_p: f64,
    pub n0: i64,
    pub window: (i64, i64),
    pub dt: f64,
    pub t_final: f64,
    pub record_every: f64,
    pub n_cut: Option<i64>,
    /// Incident branch 1..=4.
    pub branch: u8,
    /// Carrier energy; required for `simulate` unless a preset supplies it.
    pub omega: Option<f64>,
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection {
            s0: None,
            s0_fraction: 0.01,
            s_p: 0.002,
            n0: -150,
            window: (-400, 400),
            dt: 0.005,
            t_final: 600.0,
            record_every: 2.0,
            n_cut: None,
            branch: 1,
            omega: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    /// `csv` or `json`.
    pub format: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: "out".to_string(),
            format: "csv".to_string(),
        }
    }
}

/// The full sectioned configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    pub spin: SpinSection,
    pub scan: ScanSection,
    pub sim: SimSection,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::validation(format!("cannot read config {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e == "json")
            || text.trim_start().starts_with('{');
        let config: RunConfig = if is_json {
            serde_json::from_str(&text)
                .map_err(|e| Error::validation(format!("bad JSON config {}: {e}", path.display())))?
        } else {
            toml::from_str(&text)
                .map_err(|e| Error::validation(format!("bad TOML config {}: {e}", path.display())))?
        };
        config.params().validate()?;
        Ok(config)
    }

    pub fn params(&self) -> SystemParams {
        SystemParams {
            alpha: self.system.alpha,
            gamma: self.system.gamma,
            lambda: self.system.lambda,
            g: self.system.g,
            epsilon: self.system.epsilon,
            a: self.spin.a,
            b: self.spin.b,
        }
    }

    pub fn packet(&self) -> Result<WavepacketSpec> {
        let params = self.params();
        let s0 = self
            .sim
            .s0
            .unwrap_or_else(|| self.sim.s0_fraction * (params.g / params.gamma).sqrt());
        let omega = self.sim.omega.ok_or_else(|| {
            Error::validation("sim.omega is required (or use a preset)".to_string())
        })?;
        Ok(WavepacketSpec {
            s0,
            s_p: self.sim.s_p,
            n0: self.sim.n0,
            branch: Branch::from_index(self.sim.branch)?,
            omega,
        })
    }

    pub fn evolve_config(&self) -> EvolveConfig {
        EvolveConfig {
            dt: self.sim.dt,
            t_final: self.sim.t_final,
            record_every: self.sim.record_every,
            n_cut: self.sim.n_cut,
            ..EvolveConfig::default()
        }
    }

    /// Single-line JSON echo for output headers; feeding it back as a JSON
    /// config reproduces the run.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
