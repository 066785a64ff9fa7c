//! Several communities side by side, agents belonging to two communities at
//! once, and strategic gossip with endogenous reward provision.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{sample_equilibrium_network, solve_equilibrium, CostPmf, EquilibriumReport, PreferenceSpec};
use crate::degree_model::{DegreeModelSpec, DegreePmf};
use crate::error::{Error, Result};
use crate::graph::{sample_bipartite, sample_configuration, sample_iid_degrees, Graph};
use crate::rng::stream;
use crate::spread::{reward_probability_mc, reward_reaches, sample_audience, AudienceSpec, RewardEstimate};

/// One community playing the baseline game on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunitySpec {
    pub prefs: PreferenceSpec,
    pub degree: DegreeModelSpec,
    pub f: f64,
    pub n: usize,
    pub audience: AudienceSpec,
    /// Observer/rewarder draws for the reward estimate.
    pub reward_draws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityReport {
    pub community: usize,
    pub equilibrium: EquilibriumReport,
    pub gc_fraction: f64,
    pub reward: RewardEstimate,
}

/// Solves one community and measures its realized network.
pub fn simulate_community<R: Rng + ?Sized>(index: usize, spec: &CommunitySpec, rng: &mut R) -> Result<CommunityReport> {
    spec.audience.validate()?;
    if spec.n < 2 {
        return Err(Error::Validation(format!("community {index} needs at least 2 agents")));
    }
    let equilibrium = solve_equilibrium(&spec.prefs, &spec.degree, spec.f)?;
    let g = sample_equilibrium_network(&equilibrium, &spec.degree, spec.n, rng)?;
    let gc_fraction = g.components().gc_fraction();
    let focal = rng.random_range(0..spec.n);
    let (m_obs, m_rew) = spec.audience.sizes(spec.n);
    let reward = reward_probability_mc(&g, focal, m_obs, m_rew, spec.reward_draws, rng)?;
    Ok(CommunityReport {
        community: index,
        equilibrium,
        gc_fraction,
        reward,
    })
}

/// Community `m` draws only from stream `(master_seed, m, 0)`, so its report
/// does not depend on any other community's parameters.
pub fn independent_communities(specs: &[CommunitySpec], master_seed: u64) -> Result<Vec<CommunityReport>> {
    specs
        .par_iter()
        .enumerate()
        .map(|(m, spec)| simulate_community(m, spec, &mut stream(master_seed, m as u64, 0)))
        .collect()
}

/// Two communities `A` and `B` plus links between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCommunitySpec {
    pub pmf_a: DegreePmf,
    pub n_a: usize,
    pub pmf_b: DegreePmf,
    pub n_b: usize,
    /// Between-community degrees, drawn for every agent on both sides.
    pub out_pmf: DegreePmf,
}

impl CrossCommunitySpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_a < 2 || self.n_b == 0 {
            return Err(Error::Validation(format!(
                "cross-community sizes ({}, {}) need n_a >= 2 and n_b >= 1",
                self.n_a, self.n_b
            )));
        }
        Ok(())
    }
}

/// The union `G_A ∪ G_AB ∪ G_B`; `A` occupies nodes `0..n_a`.
pub fn sample_cross_network<R: Rng + ?Sized>(spec: &CrossCommunitySpec, rng: &mut R) -> Result<Graph> {
    spec.validate()?;
    let g_a = sample_configuration(&sample_iid_degrees(&spec.pmf_a, spec.n_a, rng)?, rng);
    let g_b = sample_configuration(&sample_iid_degrees(&spec.pmf_b, spec.n_b, rng)?, rng);
    let out_a: Vec<usize> = (0..spec.n_a).map(|_| spec.out_pmf.quantile(rng.random())).collect();
    let out_b: Vec<usize> = (0..spec.n_b).map(|_| spec.out_pmf.quantile(rng.random())).collect();
    let g_ab = sample_bipartite(&out_a, &out_b, rng);
    g_a.disjoint_union(&g_b).overlay(&g_ab)
}

/// Reward probability for a random member of `A` whose observers and
/// rewarders are all in `A`, with news free to travel through `B`.
pub fn cross_membership_reward<R: Rng + ?Sized>(
    spec: &CrossCommunitySpec,
    m_obs: usize,
    m_rew: usize,
    replications: usize,
    rng: &mut R,
) -> Result<RewardEstimate> {
    let g = sample_cross_network(spec, rng)?;
    let pool = spec.n_a - 1;
    if m_obs > pool || m_rew > pool {
        return Err(Error::Domain(format!(
            "cannot draw {m_obs} observers and {m_rew} rewarders from {pool} other members of A"
        )));
    }
    let successes = (0..replications)
        .filter(|_| {
            let focal = rng.random_range(0..spec.n_a);
            let census = g.remove_agent(focal).map(|h| h.components());
            let obs = sample_audience(spec.n_a, focal, m_obs, rng);
            let rew = sample_audience(spec.n_a, focal, m_rew, rng);
            census.is_ok_and(|c| reward_reaches(&c, &obs, &rew))
        })
        .count();
    Ok(RewardEstimate::from_counts(successes, replications))
}

/// Costs of gossiping and of rewarding, both non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategicSpec {
    pub r_tilde: f64,
    pub gossip_costs: CostPmf,
    pub reward_costs: CostPmf,
}

impl StrategicSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_tilde > 0.0 && self.r_tilde.is_finite()) {
            return Err(Error::Validation(format!(
                "r_tilde = {} must be positive",
                self.r_tilde
            )));
        }
        for (name, pmf) in [("gossip", &self.gossip_costs), ("reward", &self.reward_costs)] {
            if pmf.atoms().iter().any(|(c, p)| *c < 0.0 && *p > 0.0) {
                return Err(Error::Validation(format!("{name} costs must be non-negative")));
            }
        }
        if !(self.gossip_costs.mass(|c| c == 0.0) > 0.0) {
            return Err(Error::Validation("gossip costs need an atom at zero".into()));
        }
        Ok(())
    }
}

/// Costs realized before play.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizedCosts {
    /// Per edge `(u, v)`: `u`'s cost of telling `v`, then `v`'s cost of
    /// telling `u`.
    pub gossip: Vec<(f64, f64)>,
    /// Per agent cost of rewarding.
    pub reward: Vec<f64>,
}

pub fn draw_costs<R: Rng + ?Sized>(g: &Graph, spec: &StrategicSpec, rng: &mut R) -> RealizedCosts {
    let gossip = g
        .edges()
        .iter()
        .map(|_| (spec.gossip_costs.sample(rng), spec.gossip_costs.sample(rng)))
        .collect();
    let reward = (0..g.node_count()).map(|_| spec.reward_costs.sample(rng)).collect();
    RealizedCosts { gossip, reward }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadingTag {
    /// Act whenever the cost is at most the reward.
    A,
    /// Act only when the cost is zero.
    B,
}

/// Actions of every agent: reward provision and, per edge, whether each
/// endpoint passes news along it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadingProfile {
    pub tag: SpreadingTag,
    pub reward: Vec<bool>,
    pub gossip: Vec<(bool, bool)>,
}

pub fn spreading_profile(costs: &RealizedCosts, r_tilde: f64, tag: SpreadingTag) -> SpreadingProfile {
    let act = |c: f64| match tag {
        SpreadingTag::A => c <= r_tilde,
        SpreadingTag::B => c == 0.0,
    };
    SpreadingProfile {
        tag,
        reward: costs.reward.iter().map(|&c| act(c)).collect(),
        gossip: costs.gossip.iter().map(|&(a, b)| (act(a), act(b))).collect(),
    }
}

/// Links along which both endpoints pass news.
pub fn active_network(g: &Graph, gossip: &[(bool, bool)]) -> Graph {
    g.filter_edges(|e, _| gossip[e].0 && gossip[e].1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadingClassification {
    /// Sorted; `[A]`, `[B]` or `[A, B]`.
    pub equilibria: Vec<SpreadingTag>,
    /// Largest-component share of the links with both costs at most `R̃`.
    pub permissive_gc_fraction: f64,
    /// Largest-component share of the links with both costs zero.
    pub free_gc_fraction: f64,
}

pub fn classify_spreading_equilibria(
    g: &Graph,
    costs: &RealizedCosts,
    r_tilde: f64,
    gamma: f64,
) -> Result<SpreadingClassification> {
    if costs.gossip.len() != g.edge_count() || costs.reward.len() != g.node_count() {
        return Err(Error::Validation("realized costs do not match the graph".into()));
    }
    let permissive = active_network(g, &spreading_profile(costs, r_tilde, SpreadingTag::A).gossip)
        .components()
        .gc_fraction();
    let free = active_network(g, &spreading_profile(costs, r_tilde, SpreadingTag::B).gossip)
        .components()
        .gc_fraction();
    let equilibria = if free >= gamma {
        vec![SpreadingTag::A]
    } else if permissive < gamma {
        vec![SpreadingTag::B]
    } else {
        vec![SpreadingTag::A, SpreadingTag::B]
    };
    Ok(SpreadingClassification {
        equilibria,
        permissive_gc_fraction: permissive,
        free_gc_fraction: free,
    })
}

/// Largest gain any single agent can obtain by flipping one of its own
/// actions. Rewards arrive with probability one exactly when the active
/// network has a giant component.
pub fn best_single_deviation_gain(
    g: &Graph,
    costs: &RealizedCosts,
    r_tilde: f64,
    profile: &SpreadingProfile,
    gamma: f64,
) -> f64 {
    let n = g.node_count();
    let p_of = |gossip: &[(bool, bool)]| f64::from(u8::from(active_network(g, gossip).components().has_giant(gamma)));
    let p = p_of(&profile.gossip);

    // (actions taken, total cost) per agent
    let mut taken = vec![0usize; n];
    let mut spent = vec![0.0f64; n];
    let mut record = |i: usize, on: bool, c: f64| {
        if on {
            taken[i] += 1;
            spent[i] += c;
        }
    };
    for i in 0..n {
        record(i, profile.reward[i], costs.reward[i]);
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        record(u, profile.gossip[e].0, costs.gossip[e].0);
        record(v, profile.gossip[e].1, costs.gossip[e].1);
    }
    let payoff = |p: f64, count: usize, cost: f64| p * r_tilde * count as f64 - cost;
    let flip_gain = |i: usize, on: bool, c: f64, p_new: f64| {
        let (count, cost) = if on {
            (taken[i] - 1, spent[i] - c)
        } else {
            (taken[i] + 1, spent[i] + c)
        };
        payoff(p_new, count, cost) - payoff(p, taken[i], spent[i])
    };

    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        best = best.max(flip_gain(i, profile.reward[i], costs.reward[i], p));
    }
    let mut gossip = profile.gossip.clone();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let (a, b) = profile.gossip[e];
        // flipping one side toggles the link only when the other side consents
        let p_u = if b {
            gossip[e] = (!a, b);
            let q = p_of(&gossip);
            gossip[e] = (a, b);
            q
        } else {
            p
        };
        let p_v = if a {
            gossip[e] = (a, !b);
            let q = p_of(&gossip);
            gossip[e] = (a, b);
            q
        } else {
            p
        };
        best = best.max(flip_gain(u, a, costs.gossip[e].0, p_u));
        best = best.max(flip_gain(v, b, costs.gossip[e].1, p_v));
    }
    best
}
