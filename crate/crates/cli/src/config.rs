//! The TOML run configuration: `[model]`, `[sampler]`, `[ensemble]` and
//! `[critical]` tables. Unknown keys are rejected.

use std::path::Path;

use eigencond::critical::{CriticalMethod, ProbeDistribution, StochasticOptions};
use eigencond::models::ModelSpec;
use eigencond::sampler::SamplerConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub sampler: SamplerSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub critical: CriticalSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tails {
    Both,
    Lower,
    Upper,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerSection {
    pub n_live: usize,
    pub path_length: f64,
    pub step_theta: f64,
    pub ns_moves: usize,
    pub max_iterations: usize,
    /// Stop a tail once E* (in the units of the operator it samples) falls
    /// to this value.
    pub target_energy: Option<f64>,
    /// Same as `target_energy` but per site; takes precedence.
    pub target_eps: Option<f64>,
    pub seed: u64,
    pub retry_cap: usize,
    /// Independent chains per tail.
    pub chains: usize,
    pub bin_width: f64,
    pub tails: Tails,
}

impl Default for SamplerSection {
    fn default() -> Self {
        let d = SamplerConfig::default();
        Self {
            n_live: d.n_live,
            path_length: d.path_length,
            step_theta: d.step_theta,
            ns_moves: d.ns_moves,
            max_iterations: d.max_iterations,
            target_energy: None,
            target_eps: None,
            seed: d.seed,
            retry_cap: d.retry_cap,
            chains: 1,
            bin_width: 0.01,
            tails: Tails::Both,
        }
    }
}

impl SamplerSection {
    pub fn sampler_config(&self, sites: usize) -> SamplerConfig {
        SamplerConfig {
            n_live: self.n_live,
            path_length: self.path_length,
            step_theta: self.step_theta,
            ns_moves: self.ns_moves,
            max_iterations: self.max_iterations,
            target_energy: self.target_eps.map(|e| e * sites as f64).or(self.target_energy),
            seed: self.seed,
            retry_cap: self.retry_cap,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleSection {
    /// System sizes; defaults to the model's `V`.
    pub sizes: Vec<usize>,
    /// Points per side of the logarithmic β grid.
    pub points: usize,
    /// Explicit β grid replacing the default one.
    pub betas: Option<Vec<f64>>,
    pub scaling: bool,
    pub eta_max: f64,
    pub near_degeneracy: bool,
    /// Force the free-fermion quadrature even when a spectrum is cheap.
    pub free_fermion: bool,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self {
            sizes: Vec::new(),
            points: 400,
            betas: None,
            scaling: false,
            eta_max: 10.0,
            near_degeneracy: false,
            free_fermion: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriticalSection {
    pub method: Option<CriticalMethod>,
    /// System sizes; defaults to the model's `V`.
    pub sizes: Vec<usize>,
    /// Model seeds for a random-matrix distribution run.
    pub seeds: Vec<u64>,
    pub probes: usize,
    pub solver_tol: f64,
    pub max_iterations: Option<usize>,
    pub seed: u64,
    pub distribution: ProbeDistribution,
    pub bootstrap_resamples: usize,
    /// Grow the probe count until the relative stderr is below this.
    pub target_rel_stderr: Option<f64>,
    pub max_probes: usize,
}

impl Default for CriticalSection {
    fn default() -> Self {
        let d = StochasticOptions::default();
        Self {
            method: None,
            sizes: Vec::new(),
            seeds: Vec::new(),
            probes: d.probes,
            solver_tol: d.solver_tol,
            max_iterations: d.max_iterations,
            seed: d.seed,
            distribution: d.distribution,
            bootstrap_resamples: d.bootstrap_resamples,
            target_rel_stderr: None,
            max_probes: 1 << 14,
        }
    }
}

impl CriticalSection {
    pub fn stochastic_options(&self) -> StochasticOptions {
        StochasticOptions {
            probes: self.probes,
            solver_tol: self.solver_tol,
            max_iterations: self.max_iterations,
            seed: self.seed,
            distribution: self.distribution,
            bootstrap_resamples: self.bootstrap_resamples,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn model(&self) -> CliResult<&ModelSpec> {
        let m = self
            .model
            .as_ref()
            .ok_or_else(|| CliError::Config("missing table `[model]`".into()))?;
        m.validate()?;
        Ok(m)
    }
}

/// `sizes` if given, otherwise the model's own size.
pub fn sizes_or(sizes: &[usize], spec: &ModelSpec) -> Vec<usize> {
    if sizes.is_empty() {
        vec![spec.sites]
    } else {
        sizes.to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config_parses() {
        let c = Config::parse(
            r#"
            [model]
            family = "tfim1d"
            V = 8
            params = { h_x = 5.0 }

            [sampler]
            ns_moves = 4
            target_eps = 0.5
            chains = 2

            [critical]
            method = "stochastic-trace"
            sizes = [8, 10]

            [ensemble]
            scaling = true
            "#,
        )
        .unwrap();
        assert_eq!(c.model().unwrap().sites, 8);
        assert_eq!(c.sampler.sampler_config(8).target_energy, Some(4.0));
        assert_eq!(c.critical.method, Some(CriticalMethod::StochasticTrace));
        assert!(c.ensemble.scaling);
    }

    #[test]
    fn unknown_and_missing_keys_are_reported() {
        let e = Config::parse("[model]\nV = 8\n").unwrap_err().to_string();
        assert!(e.contains("family"), "{e}");
        let e = Config::parse("[sampler]\nnlive = 3\n").unwrap_err().to_string();
        assert!(e.contains("nlive"), "{e}");
        assert!(e.contains("line 2"), "{e}");
    }
}
