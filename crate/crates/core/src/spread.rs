//! Observer/rewarder audiences and the probability that a contribution is
//! rewarded.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ComponentCensus, Graph};
use crate::percolation::Regime;

/// Audience sizes scale as `k · n^alpha` for each role.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AudienceSpec {
    pub k_obs: f64,
    pub k_rew: f64,
    pub alpha: f64,
}

impl Default for AudienceSpec {
    fn default() -> Self {
        AudienceSpec {
            k_obs: 3.0,
            k_rew: 3.0,
            alpha: 0.1,
        }
    }
}

impl AudienceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0 / 6.0) {
            return Err(Error::Validation(format!(
                "alpha = {} must lie in (0, 1/6)",
                self.alpha
            )));
        }
        if !(self.k_obs > 0.0 && self.k_rew > 0.0) {
            return Err(Error::Validation("audience constants must be positive".into()));
        }
        Ok(())
    }

    /// `(m_obs, m_rew) = (⌈k_obs n^α⌉, ⌈k_rew n^α⌉)`, each capped at `n − 1`.
    pub fn sizes(&self, n: usize) -> (usize, usize) {
        let cap = n.saturating_sub(1);
        let size = |k: f64| ((k * (n as f64).powf(self.alpha)).ceil() as usize).min(cap);
        (size(self.k_obs), size(self.k_rew))
    }
}

pub fn audience_sizes(n: usize, spec: &AudienceSpec) -> (usize, usize) {
    spec.sizes(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardEstimate {
    pub p_hat: f64,
    pub replications: usize,
    pub std_err: f64,
}

impl RewardEstimate {
    pub fn from_counts(successes: usize, replications: usize) -> Self {
        let p_hat = if replications == 0 {
            0.0
        } else {
            successes as f64 / replications as f64
        };
        let std_err = if replications == 0 {
            0.0
        } else {
            (p_hat * (1.0 - p_hat) / replications as f64).sqrt()
        };
        RewardEstimate {
            p_hat,
            replications,
            std_err,
        }
    }
}

/// Large-n limit of the reward probability.
pub fn predicted_reward(regime: Regime) -> f64 {
    match regime {
        Regime::Supercritical => 1.0,
        Regime::Subcritical => 0.0,
    }
}

/// Uniform sample of `m` distinct nodes from `0..n`, skipping `focal`.
pub fn sample_audience<R: Rng + ?Sized>(n: usize, focal: usize, m: usize, rng: &mut R) -> Vec<usize> {
    index::sample(rng, n - 1, m)
        .into_iter()
        .map(|j| if j >= focal { j + 1 } else { j })
        .collect()
}

/// True when some rewarder shares a component with some observer.
pub fn reward_reaches(census: &ComponentCensus, observers: &[usize], rewarders: &[usize]) -> bool {
    let seen: Vec<usize> = observers.iter().map(|&o| census.component_of[o]).collect();
    rewarders.iter().any(|&r| seen.contains(&census.component_of[r]))
}

/// Draws observer and rewarder sets independently from nodes other than the
/// focal agent and checks whether news reaches a rewarder, given a census
/// computed with the focal agent's links already removed.
pub fn reward_trials<R: Rng + ?Sized>(
    census: &ComponentCensus,
    focal: usize,
    m_obs: usize,
    m_rew: usize,
    replications: usize,
    rng: &mut R,
) -> Result<RewardEstimate> {
    let n = census.node_count();
    if focal >= n {
        return Err(Error::Domain(format!("focal node {focal} is outside 0..{n}")));
    }
    let pool = n - 1;
    if m_obs > pool || m_rew > pool {
        return Err(Error::Domain(format!(
            "cannot draw {m_obs} observers and {m_rew} rewarders from {pool} other agents"
        )));
    }
    let successes = (0..replications)
        .filter(|_| {
            let obs = sample_audience(n, focal, m_obs, rng);
            let rew = sample_audience(n, focal, m_rew, rng);
            reward_reaches(census, &obs, &rew)
        })
        .count();
    Ok(RewardEstimate::from_counts(successes, replications))
}

/// Monte Carlo estimate of `p_i(reward)` on a fixed graph.
pub fn reward_probability_mc<R: Rng + ?Sized>(
    g: &Graph,
    i: usize,
    m_obs: usize,
    m_rew: usize,
    replications: usize,
    rng: &mut R,
) -> Result<RewardEstimate> {
    let census = g.remove_agent(i)?.components();
    reward_trials(&census, i, m_obs, m_rew, replications, rng)
}
