//! Frictional information flow: binomial thinning of degree distributions,
//! the χ giant-component criterion, and sampled active subgraphs.
//!
//! `q` is the probability that one endpoint of a link refuses to pass
//! information on it, so a link survives with probability `ψ = (1 − q)²`.
//! `Q` is the probability that an agent is silent and passes nothing at all.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::degree_model::DegreePmf;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Whether the population sits above or below the giant-component threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Supercritical,
    Subcritical,
}

impl Regime {
    /// Strictly positive statistics are supercritical; zero is not.
    pub fn from_statistic(stat: f64) -> Regime {
        if stat > 0.0 {
            Regime::Supercritical
        } else {
            Regime::Subcritical
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Supercritical => "supercritical",
            Regime::Subcritical => "subcritical",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationParams {
    q: f64,
    silent: f64,
}

impl PercolationParams {
    pub fn new(q: f64, silent: f64) -> Result<Self> {
        for (name, v) in [("q", q), ("Q", silent)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::Validation(format!("{name} = {v} is outside [0, 1)")));
            }
        }
        Ok(PercolationParams { q, silent })
    }

    pub fn none() -> Self {
        PercolationParams { q: 0.0, silent: 0.0 }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Silent-agent probability `Q`.
    pub fn silent(&self) -> f64 {
        self.silent
    }

    /// Link survival probability `(1 − q)²`.
    pub fn psi(&self) -> f64 {
        (1.0 - self.q) * (1.0 - self.q)
    }
}

/// Binomial thinning: `λ̃_k = Σ_{d ≥ k} C(d, k) ψ^k (1 − ψ)^{d−k} λ_d`.
pub fn thin_pmf(pmf: &DegreePmf, psi: f64) -> Result<DegreePmf> {
    if !(0.0..=1.0).contains(&psi) {
        return Err(Error::Domain(format!("psi = {psi} is outside [0, 1]")));
    }
    let max = pmf.max_degree();
    let mut out = vec![0.0; max + 1];
    for (d, &lambda) in pmf.probs().iter().enumerate() {
        if lambda == 0.0 {
            continue;
        }
        let row = DegreePmf::binomial(d, psi)?;
        for (k, &b) in row.probs().iter().enumerate() {
            out[k] += b * lambda;
        }
    }
    out.iter_mut().for_each(|p| *p = p.clamp(0.0, 1.0));
    DegreePmf::new(out)
}

/// `χ = (1 − Q) Σ d(d−1) λ̃_d − Σ d λ̃_d` on the thinned distribution.
pub fn chi(pmf: &DegreePmf, params: &PercolationParams) -> Result<f64> {
    let thinned = thin_pmf(pmf, params.psi())?;
    let (first, falling) = thinned
        .probs()
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(m1, f2), (d, &p)| {
            let d = d as f64;
            (m1 + d * p, f2 + d * (d - 1.0) * p)
        });
    Ok((1.0 - params.silent()) * falling - first)
}

pub fn predicted_regime(pmf: &DegreePmf, params: &PercolationParams) -> Result<Regime> {
    Ok(Regime::from_statistic(chi(pmf, params)?))
}

/// Samples the network of links that actually carry information.
///
/// Silent agents lose every link; every other link survives with probability
/// ψ. The node set is unchanged.
pub fn active_subgraph<R: Rng + ?Sized>(g: &Graph, params: &PercolationParams, rng: &mut R) -> Graph {
    let silent: Vec<bool> = (0..g.node_count())
        .map(|_| params.silent() > 0.0 && rng.random::<f64>() < params.silent())
        .collect();
    let psi = params.psi();
    g.filter_edges(|_, (u, v)| {
        let kept = psi >= 1.0 || rng.random::<f64>() < psi;
        kept && !silent[u] && !silent[v]
    })
}
