//! Scenario configuration.
//!
//! The file is flat `key = value` text; dotted prefixes name sections, e.g.
//! `degree.theta_min = 0.13`. It is parsed as TOML, so values follow TOML
//! syntax and unknown keys are rejected by name.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agents::{CostPmf, PreferenceSpec};
use crate::degree_model::{DegreeModelSpec, DegreePmf};
use crate::error::{Error, Result};
use crate::extensions::{CrossCommunitySpec, StrategicSpec};
use crate::graph::DEFAULT_GC_THRESHOLD;
use crate::households::HouseholdGameSpec;
use crate::percolation::PercolationParams;
use crate::spread::AudienceSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Worker-count hint; results do not depend on it.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_gamma")]
    pub gc_threshold: f64,
    #[serde(default)]
    pub degree: DegreeSection,
    #[serde(default)]
    pub preferences: PreferencesSection,
    #[serde(default)]
    pub population: PopulationSection,
    #[serde(default)]
    pub audience: AudienceSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub percolation: PercolationSection,
    #[serde(default)]
    pub household: HouseholdSection,
    #[serde(default)]
    pub cross: CrossSection,
    #[serde(default)]
    pub spreading: SpreadingSection,
}

fn default_replications() -> usize {
    20
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_gamma() -> f64 {
    DEFAULT_GC_THRESHOLD
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeFamily {
    BinomialLink,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DegreeSection {
    pub family: DegreeFamily,
    pub max_degree: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Whitespace-separated `t p_0 ... p_D` rows; relative paths resolve
    /// against the config file.
    pub table: Option<PathBuf>,
}

impl Default for DegreeSection {
    fn default() -> Self {
        DegreeSection {
            family: DegreeFamily::BinomialLink,
            max_degree: 6,
            theta_min: 0.13,
            theta_max: 0.35,
            table: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PreferencesSection {
    pub a_in: f64,
    pub a_out: f64,
    pub kappa: f64,
    pub pi_l: f64,
    pub pi_h: f64,
    pub reward: f64,
    pub beta: f64,
    /// `[[cost, probability], ...]`.
    pub costs: Vec<(f64, f64)>,
}

impl Default for PreferencesSection {
    fn default() -> Self {
        let p = PreferenceSpec::default();
        PreferencesSection {
            a_in: p.a_in,
            a_out: p.a_out,
            kappa: p.kappa,
            pi_l: p.pi_l,
            pi_h: p.pi_h,
            reward: p.reward,
            beta: p.beta,
            costs: p.costs.atoms().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PopulationSection {
    pub f: f64,
}

impl Default for PopulationSection {
    fn default() -> Self {
        PopulationSection { f: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AudienceSection {
    pub k_obs: f64,
    pub k_rew: f64,
    pub alpha: f64,
    /// Observer/rewarder draws per replication.
    pub draws: usize,
}

impl Default for AudienceSection {
    fn default() -> Self {
        let a = AudienceSpec::default();
        AudienceSection {
            k_obs: a.k_obs,
            k_rew: a.k_rew,
            alpha: a.alpha,
            draws: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    PiH,
    F,
}

impl SweepParam {
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::PiH => "pi_h",
            SweepParam::F => "f",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    /// Sample networks for every row; otherwise only closed forms are filled.
    pub monte_carlo: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            param: SweepParam::PiH,
            from: 0.8,
            to: 3.0,
            steps: 45,
            monte_carlo: true,
        }
    }
}

impl SweepSection {
    /// `steps` evenly spaced values from `from` to `to` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PercolationSection {
    pub q: Vec<f64>,
    pub silent: Vec<f64>,
}

impl Default for PercolationSection {
    fn default() -> Self {
        PercolationSection {
            q: vec![0.0, 0.1, 0.2, 0.3, 0.4],
            silent: vec![0.0, 0.1, 0.2, 0.3, 0.4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HouseholdSection {
    pub pi: Vec<f64>,
    pub xi_bar: f64,
    /// Defaults to `v1 − v2`.
    pub delta_v: Option<f64>,
}

impl Default for HouseholdSection {
    fn default() -> Self {
        HouseholdSection {
            pi: vec![0.9, 1.0, 1.1],
            xi_bar: 0.02,
            delta_v: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrossSection {
    /// Defaults to `n`.
    pub n_a: Option<usize>,
    /// Defaults to `n`.
    pub n_b: Option<usize>,
    /// Degree PMFs as probability vectors indexed by degree.
    pub pmf_a: Vec<f64>,
    pub pmf_b: Vec<f64>,
    pub out_pmf: Vec<f64>,
    pub draws: usize,
}

impl Default for CrossSection {
    fn default() -> Self {
        CrossSection {
            n_a: None,
            n_b: None,
            pmf_a: vec![1.0],
            pmf_b: vec![0.0, 0.0, 0.0, 1.0],
            out_pmf: vec![0.0, 1.0],
            draws: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpreadingSection {
    pub r_tilde: f64,
    pub gossip_costs: Vec<(f64, f64)>,
    pub reward_costs: Vec<(f64, f64)>,
    /// The sampled network is Binomial(`max_degree`, `theta`).
    pub max_degree: usize,
    pub theta: f64,
    /// Single-deviation checks run only up to this many agents.
    pub verify_max_n: usize,
}

impl Default for SpreadingSection {
    fn default() -> Self {
        SpreadingSection {
            r_tilde: 1.0,
            gossip_costs: vec![(0.0, 0.3), (0.5, 0.6), (2.0, 0.1)],
            reward_costs: vec![(0.0, 0.5), (0.5, 0.5)],
            max_degree: 6,
            theta: 0.5,
            verify_max_n: 500,
        }
    }
}

impl ScenarioConfig {
    /// Built-in defaults for a population of `n` agents.
    pub fn with_n(n: usize) -> Self {
        toml::from_str(&format!("n = {n}")).expect("defaults parse")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Validation(format!("config: {}", e.message())))
    }

    /// Reads and validates a config; relative table paths resolve against the
    /// config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text)?;
        if let (Some(table), Some(dir)) = (&config.degree.table, path.parent()) {
            if table.is_relative() {
                config.degree.table = Some(dir.join(table));
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 100 {
            return Err(Error::Validation(format!("n = {} must be at least 100", self.n)));
        }
        if self.replications == 0 {
            return Err(Error::Validation("replications must be at least 1".into()));
        }
        if self.sweep.steps < 2 {
            return Err(Error::Validation(format!(
                "sweep.steps = {} must be at least 2",
                self.sweep.steps
            )));
        }
        if !(self.gc_threshold > 0.0 && self.gc_threshold <= 1.0) {
            return Err(Error::Validation(format!(
                "gc_threshold = {} is outside (0, 1]",
                self.gc_threshold
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::Validation("threads must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.population.f) {
            return Err(Error::Validation(format!(
                "population.f = {} is outside [0, 1]",
                self.population.f
            )));
        }
        self.degree_spec()?;
        self.preference_spec()?.validate()?;
        self.audience_spec().validate()?;
        Ok(())
    }

    pub fn degree_spec(&self) -> Result<DegreeModelSpec> {
        let d = &self.degree;
        match d.family {
            DegreeFamily::BinomialLink => DegreeModelSpec::binomial_link(d.max_degree, d.theta_min, d.theta_max),
            DegreeFamily::Tabulated => {
                let table = d
                    .table
                    .as_ref()
                    .ok_or_else(|| Error::Validation("degree.table is required for the tabulated family".into()))?;
                DegreeModelSpec::load_table(table)
            }
        }
    }

    pub fn preference_spec(&self) -> Result<PreferenceSpec> {
        let p = &self.preferences;
        Ok(PreferenceSpec {
            a_in: p.a_in,
            a_out: p.a_out,
            kappa: p.kappa,
            pi_l: p.pi_l,
            pi_h: p.pi_h,
            reward: p.reward,
            beta: p.beta,
            costs: CostPmf::new(p.costs.clone())?,
        })
    }

    pub fn audience_spec(&self) -> AudienceSpec {
        AudienceSpec {
            k_obs: self.audience.k_obs,
            k_rew: self.audience.k_rew,
            alpha: self.audience.alpha,
        }
    }

    /// Every `(q, Q)` pair, `q` varying slowest.
    pub fn percolation_grid(&self) -> Result<Vec<PercolationParams>> {
        if self.percolation.q.is_empty() || self.percolation.silent.is_empty() {
            return Err(Error::Validation(
                "percolation.q and percolation.silent must be non-empty".into(),
            ));
        }
        self.percolation
            .q
            .iter()
            .flat_map(|&q| {
                self.percolation
                    .silent
                    .iter()
                    .map(move |&s| PercolationParams::new(q, s))
            })
            .collect()
    }

    pub fn household_spec(&self) -> Result<HouseholdGameSpec> {
        HouseholdGameSpec::new(
            self.household.pi.clone(),
            self.preference_spec()?,
            self.degree_spec()?,
            self.household.xi_bar,
            self.household.delta_v,
        )
    }

    pub fn cross_spec(&self) -> Result<CrossCommunitySpec> {
        let c = &self.cross;
        let spec = CrossCommunitySpec {
            pmf_a: DegreePmf::new(c.pmf_a.clone())?,
            n_a: c.n_a.unwrap_or(self.n),
            pmf_b: DegreePmf::new(c.pmf_b.clone())?,
            n_b: c.n_b.unwrap_or(self.n),
            out_pmf: DegreePmf::new(c.out_pmf.clone())?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn strategic_spec(&self) -> Result<StrategicSpec> {
        let s = &self.spreading;
        let spec = StrategicSpec {
            r_tilde: s.r_tilde,
            gossip_costs: CostPmf::new(s.gossip_costs.clone())?,
            reward_costs: CostPmf::new(s.reward_costs.clone())?,
        };
        spec.validate()?;
        Ok(spec)
    }
}
