//! Parameter sweeps and the per-command experiments behind the CLI.
//!
//! Replication `r` of row (or cell) `s` draws from stream
//! `(master_seed, s, r)`, and results are collected in index order, so every
//! table is independent of the worker count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ScenarioConfig, SweepParam};
use super::table::{cell, opt_cell, Table};
use crate::agents::{mean_and_se, sample_equilibrium_network, solve_equilibrium, EquilibriumReport};
use crate::degree_model::DegreePmf;
use crate::error::Result;
use crate::extensions::{
    best_single_deviation_gain, classify_spreading_equilibria, cross_membership_reward, draw_costs, spreading_profile,
    SpreadingTag,
};
use crate::graph::{sample_configuration, sample_iid_degrees, Graph};
use crate::households::{
    classify_equilibrium, p_sc, t_crit, t_max, t_uncrit, EquilibriumCase, HouseholdGame, Threshold,
};
use crate::percolation::{active_subgraph, chi, PercolationParams, Regime};
use crate::rng::{stream, StreamRng};
use crate::spread::{reward_trials, RewardEstimate};

/// Monte Carlo summary of sampled networks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub gc_mean: f64,
    pub gc_se: f64,
    /// Share of replications whose largest component reaches `γ`.
    pub giant_share: f64,
    pub reward: RewardEstimate,
}

struct Replication {
    gc: f64,
    successes: usize,
    draws: usize,
}

/// Largest-component share and reward draws for one sampled network.
fn measure<R: Rng + ?Sized>(g: &Graph, config: &ScenarioConfig, rng: &mut R) -> Result<Replication> {
    let n = g.node_count();
    let gc = g.components().gc_fraction();
    let focal = rng.random_range(0..n);
    let (m_obs, m_rew) = config.audience_spec().sizes(n);
    let census = g.remove_agent(focal)?.components();
    let draws = config.audience.draws;
    let est = reward_trials(&census, focal, m_obs, m_rew, draws, rng)?;
    Ok(Replication {
        gc,
        successes: (est.p_hat * draws as f64).round() as usize,
        draws,
    })
}

fn replicate(
    config: &ScenarioConfig,
    scenario: u64,
    sample: impl Fn(&mut StreamRng) -> Result<Replication> + Sync,
) -> Result<NetworkStats> {
    let reps = (0..config.replications as u64)
        .into_par_iter()
        .map(|r| sample(&mut stream(config.master_seed, scenario, r)))
        .collect::<Result<Vec<Replication>>>()?;
    let gcs: Vec<f64> = reps.iter().map(|r| r.gc).collect();
    let (gc_mean, gc_se) = mean_and_se(&gcs);
    let giant = gcs.iter().filter(|&&g| g >= config.gc_threshold).count();
    Ok(NetworkStats {
        gc_mean,
        gc_se,
        giant_share: giant as f64 / reps.len() as f64,
        reward: RewardEstimate::from_counts(
            reps.iter().map(|r| r.successes).sum(),
            reps.iter().map(|r| r.draws).sum(),
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub report: EquilibriumReport,
    pub stats: Option<NetworkStats>,
}

pub const SWEEP_COLUMNS: [&str; 14] = [
    "t_hat_h",
    "t_out_h",
    "t_hat_l",
    "t_out_l",
    "connectivity",
    "regime",
    "gc_mean",
    "gc_se",
    "reward_p_hat",
    "reward_se",
    "u_h",
    "u_l",
    "v",
    "gini",
];

fn equilibrium_row(config: &ScenarioConfig, scenario: u64, value: f64, pi_h: f64, f: f64) -> Result<SweepRow> {
    let prefs = config.preference_spec()?.with_pi_h(pi_h);
    let degree = config.degree_spec()?;
    let report = solve_equilibrium(&prefs, &degree, f)?;
    let stats = if config.sweep.monte_carlo {
        Some(replicate(config, scenario, |rng| {
            let g = sample_equilibrium_network(&report, &degree, config.n, rng)?;
            measure(&g, config, rng)
        })?)
    } else {
        None
    };
    Ok(SweepRow { value, report, stats })
}

/// One row per swept value, in sweep order.
pub fn sweep(config: &ScenarioConfig, param: SweepParam) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let base_pi = config.preferences.pi_h;
    let base_f = config.population.f;
    config
        .sweep
        .values()
        .into_par_iter()
        .enumerate()
        .map(|(s, x)| match param {
            SweepParam::PiH => equilibrium_row(config, s as u64, x, x, base_f),
            SweepParam::F => equilibrium_row(config, s as u64, x, base_pi, x),
        })
        .collect()
}

pub fn sweep_pi_h(config: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    sweep(config, SweepParam::PiH)
}

pub fn sweep_f(config: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    sweep(config, SweepParam::F)
}

/// The configured `(π_H, f)` point as a single row.
pub fn simulate(config: &ScenarioConfig) -> Result<SweepRow> {
    config.validate()?;
    equilibrium_row(
        config,
        0,
        config.preferences.pi_h,
        config.preferences.pi_h,
        config.population.f,
    )
}

pub fn sweep_table(rows: &[SweepRow], value_column: &str) -> Table {
    let mut header = vec![value_column];
    header.extend(SWEEP_COLUMNS);
    let mut table = Table::new(&header);
    for row in rows {
        let r = &row.report;
        let s = row.stats.as_ref();
        table.push(vec![
            cell(row.value),
            cell(r.high.t_hat),
            cell(r.high.t_out_hat),
            cell(r.low.t_hat),
            cell(r.low.t_out_hat),
            cell(r.connectivity),
            r.regime.to_string(),
            opt_cell(s.map(|s| s.gc_mean)),
            opt_cell(s.map(|s| s.gc_se)),
            opt_cell(s.map(|s| s.reward.p_hat)),
            opt_cell(s.map(|s| s.reward.std_err)),
            cell(r.u_h),
            cell(r.u_l),
            cell(r.v),
            cell(r.gini),
        ]);
    }
    table
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationRow {
    pub params: PercolationParams,
    pub chi: f64,
    pub regime: Regime,
    pub stats: NetworkStats,
}

/// Every `(q, Q)` cell on networks drawn at the configured equilibrium.
pub fn sweep_percolation(config: &ScenarioConfig) -> Result<Vec<PercolationRow>> {
    config.validate()?;
    let degree = config.degree_spec()?;
    let report = solve_equilibrium(&config.preference_spec()?, &degree, config.population.f)?;
    config
        .percolation_grid()?
        .into_par_iter()
        .enumerate()
        .map(|(c, params)| {
            let chi = chi(&report.lambda, &params)?;
            let stats = replicate(config, c as u64, |rng| {
                let g = sample_equilibrium_network(&report, &degree, config.n, rng)?;
                measure(&active_subgraph(&g, &params, rng), config, rng)
            })?;
            Ok(PercolationRow {
                params,
                chi,
                regime: Regime::from_statistic(chi),
                stats,
            })
        })
        .collect()
}

pub fn percolation_table(rows: &[PercolationRow]) -> Table {
    let mut table = Table::new(&[
        "q",
        "silent",
        "psi",
        "chi",
        "regime",
        "gc_mean",
        "gc_se",
        "giant_share",
        "reward_p_hat",
        "reward_se",
    ]);
    for row in rows {
        table.push(vec![
            cell(row.params.q()),
            cell(row.params.silent()),
            cell(row.params.psi()),
            cell(row.chi),
            row.regime.to_string(),
            cell(row.stats.gc_mean),
            cell(row.stats.gc_se),
            cell(row.stats.giant_share),
            cell(row.stats.reward.p_hat),
            cell(row.stats.reward.std_err),
        ]);
    }
    table
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseholdReport {
    pub case: EquilibriumCase,
    pub k_plus: f64,
    pub k_minus: f64,
    pub mean_shocked_degree: f64,
    pub delta_v: f64,
    pub p_sc_myopic: f64,
    pub p_sc_witness: f64,
}

fn threshold_cells(t: Threshold) -> [String; 2] {
    match t {
        Threshold::At(x) => [cell(x), "at".into()],
        Threshold::Below => [String::new(), "below".into()],
        Threshold::Above => [String::new(), "above".into()],
    }
}

pub fn household(config: &ScenarioConfig) -> Result<(HouseholdReport, Table)> {
    config.validate()?;
    let game = config.household_spec()?;
    let case = classify_equilibrium(&game)?;
    let mut table = Table::new(&[
        "household",
        "pi",
        "t_hat",
        "t_max",
        "t_crit",
        "t_crit_side",
        "t_uncrit",
        "t_uncrit_side",
        "witness",
    ]);
    for h in 0..game.households() {
        let [crit, crit_side] = threshold_cells(t_crit(&game, h, &case.t_hat)?);
        let [uncrit, uncrit_side] = threshold_cells(t_uncrit(&game, h, &case.t_hat)?);
        table.push(vec![
            h.to_string(),
            cell(game.pi()[h]),
            cell(game.t_hat(h)),
            cell(t_max(&game, h)?),
            crit,
            crit_side,
            uncrit,
            uncrit_side,
            cell(case.witness[h]),
        ]);
    }
    let report = HouseholdReport {
        k_plus: game.k_plus(),
        k_minus: game.k_minus(),
        mean_shocked_degree: game.mean_shocked_degree(),
        delta_v: game.delta_v(),
        p_sc_myopic: p_sc(&game, &case.t_hat)?,
        p_sc_witness: p_sc(&game, &case.witness)?,
        case,
    };
    Ok((report, table))
}

/// One cross-membership estimate per replication, each on a fresh network.
pub fn cross_community(config: &ScenarioConfig) -> Result<(Vec<RewardEstimate>, Table)> {
    config.validate()?;
    let spec = config.cross_spec()?;
    let (m_obs, m_rew) = config.audience_spec().sizes(spec.n_a);
    let estimates = (0..config.replications as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(config.master_seed, 0, r);
            cross_membership_reward(&spec, m_obs, m_rew, config.cross.draws, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["replication", "n_a", "n_b", "m_obs", "m_rew", "p_hat", "std_err"]);
    for (r, est) in estimates.iter().enumerate() {
        table.push(vec![
            r.to_string(),
            spec.n_a.to_string(),
            spec.n_b.to_string(),
            m_obs.to_string(),
            m_rew.to_string(),
            cell(est.p_hat),
            cell(est.std_err),
        ]);
    }
    Ok((estimates, table))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadingRow {
    pub replication: usize,
    pub edges: usize,
    pub equilibria: Vec<SpreadingTag>,
    pub permissive_gc_fraction: f64,
    pub free_gc_fraction: f64,
    /// Largest single-deviation gain per returned profile, when checked.
    pub deviation_gain_a: Option<f64>,
    pub deviation_gain_b: Option<f64>,
}

pub fn classify_spreading(config: &ScenarioConfig) -> Result<Vec<SpreadingRow>> {
    config.validate()?;
    let spec = config.strategic_spec()?;
    let s = &config.spreading;
    let pmf = DegreePmf::binomial(s.max_degree, s.theta)?;
    (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(config.master_seed, 0, r as u64);
            let g = sample_configuration(&sample_iid_degrees(&pmf, config.n, &mut rng)?, &mut rng);
            let costs = draw_costs(&g, &spec, &mut rng);
            let c = classify_spreading_equilibria(&g, &costs, spec.r_tilde, config.gc_threshold)?;
            let gain = |tag: SpreadingTag| {
                (config.n <= s.verify_max_n && c.equilibria.contains(&tag)).then(|| {
                    let profile = spreading_profile(&costs, spec.r_tilde, tag);
                    best_single_deviation_gain(&g, &costs, spec.r_tilde, &profile, config.gc_threshold)
                })
            };
            Ok(SpreadingRow {
                replication: r,
                edges: g.edge_count(),
                deviation_gain_a: gain(SpreadingTag::A),
                deviation_gain_b: gain(SpreadingTag::B),
                equilibria: c.equilibria,
                permissive_gc_fraction: c.permissive_gc_fraction,
                free_gc_fraction: c.free_gc_fraction,
            })
        })
        .collect()
}

pub fn spreading_table(rows: &[SpreadingRow]) -> Table {
    let mut table = Table::new(&[
        "replication",
        "edges",
        "equilibria",
        "permissive_gc",
        "free_gc",
        "deviation_gain_a",
        "deviation_gain_b",
    ]);
    for row in rows {
        let tags: Vec<&str> = row
            .equilibria
            .iter()
            .map(|t| match t {
                SpreadingTag::A => "a",
                SpreadingTag::B => "b",
            })
            .collect();
        table.push(vec![
            row.replication.to_string(),
            row.edges.to_string(),
            tags.join("+"),
            cell(row.permissive_gc_fraction),
            cell(row.free_gc_fraction),
            opt_cell(row.deviation_gain_a),
            opt_cell(row.deviation_gain_b),
        ]);
    }
    table
}
