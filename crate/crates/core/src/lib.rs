//! Simulation laboratory for a two-stage community game on configuration-model
//! random graphs.
//!
//! Agents split time between their community and outside interactions. The
//! time spent inside shapes their friendship degree distribution, and the
//! sign of `Σ_d d(d−2) λ_d` decides whether a giant component carries news of
//! public-good contributions to someone who will reward them. The crate
//! samples those graphs, solves the equilibrium, and runs the comparative
//! statics, percolation, household-coordination and multi-community
//! experiments built on it.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod degree_model;
pub mod error;
pub mod extensions;
pub mod graph;
pub mod households;
pub mod percolation;
pub mod rng;
pub mod runner;
pub mod solve;
pub mod spread;

pub use agents::{solve_equilibrium, CostPmf, EquilibriumReport, PreferenceSpec};
pub use degree_model::{DegreeModelSpec, DegreePmf};
pub use error::{Error, Result};
pub use extensions::{CrossCommunitySpec, SpreadingTag, StrategicSpec};
pub use graph::{ComponentCensus, DegreeSequence, Graph};
pub use households::{CaseTag, EquilibriumCase, HouseholdGame, HouseholdGameSpec, Threshold};
pub use percolation::{PercolationParams, Regime};
pub use runner::{Command, ScenarioConfig};
pub use spread::{AudienceSpec, RewardEstimate};
