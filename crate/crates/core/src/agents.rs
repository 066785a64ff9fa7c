//! Agent preferences, the two-stage equilibrium and its welfare aggregates.
//!
//! First-stage payoffs use
//! `I(t, π t_out) − c(t + t_out)` with
//! `I(a, b) = A_in ln(1 + a) + A_out ln(1 + b)` and `c(x) = −κ ln(1 − x)`.
//! The public-good benefit is linear, `B(s) = β s`, in the share of
//! contributors `s`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::degree_model::{mix_population, DegreeModelSpec, DegreePmf};
use crate::error::{Error, Result};
use crate::graph::{sample_configuration, sample_degrees, Graph};
use crate::percolation::Regime;
use crate::solve::golden_section_max;
use crate::spread::predicted_reward;

/// Finite-support distribution of contribution costs `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostPmf {
    atoms: Vec<(f64, f64)>,
}

impl CostPmf {
    /// `atoms` are `(cost, probability)` pairs.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Validation("cost pmf has no atoms".into()));
        }
        if atoms.iter().any(|(c, p)| !c.is_finite() || !(0.0..=1.0).contains(p)) {
            return Err(Error::Validation(
                "cost pmf atoms need finite costs and probabilities in [0, 1]".into(),
            ));
        }
        let total: f64 = atoms.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("cost pmf sums to {total}, not 1")));
        }
        Ok(CostPmf { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// `P(C satisfies pred)`.
    pub fn mass(&self, pred: impl Fn(f64) -> bool) -> f64 {
        self.atoms.iter().filter(|(c, _)| pred(*c)).map(|(_, p)| p).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for &(c, p) in &self.atoms {
            acc += p;
            if u < acc {
                return c;
            }
        }
        self.atoms
            .iter()
            .rev()
            .find(|(_, p)| *p > 0.0)
            .map(|(c, _)| *c)
            .unwrap_or(self.atoms[0].0)
    }
}

impl Default for CostPmf {
    fn default() -> Self {
        CostPmf {
            atoms: vec![(-0.5, 0.10), (0.4, 0.60), (0.8, 0.25), (1.5, 0.05)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceSpec {
    pub a_in: f64,
    pub a_out: f64,
    pub kappa: f64,
    pub pi_l: f64,
    pub pi_h: f64,
    pub reward: f64,
    pub beta: f64,
    pub costs: CostPmf,
}

impl Default for PreferenceSpec {
    fn default() -> Self {
        PreferenceSpec {
            a_in: 1.0,
            a_out: 1.0,
            kappa: 0.25,
            pi_l: 0.8,
            pi_h: 1.5,
            reward: 1.0,
            beta: 2.0,
            costs: CostPmf::default(),
        }
    }
}

impl PreferenceSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("a_in", self.a_in),
            ("a_out", self.a_out),
            ("kappa", self.kappa),
            ("pi_l", self.pi_l),
            ("reward", self.reward),
            ("beta", self.beta),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Validation(format!("{name} = {v} must be positive")));
        }
        if !(self.pi_h >= self.pi_l) || !self.pi_h.is_finite() {
            return Err(Error::Validation(format!(
                "pi_h = {} must be at least pi_l = {}",
                self.pi_h, self.pi_l
            )));
        }
        Ok(())
    }

    pub fn with_pi_h(&self, pi_h: f64) -> Self {
        PreferenceSpec { pi_h, ..self.clone() }
    }
}

/// `I(t, π t_out) − c(t + t_out)`.
pub fn first_stage_payoff(spec: &PreferenceSpec, pi: f64, t: f64, t_out: f64) -> Result<f64> {
    if !(t >= 0.0 && t_out >= 0.0) {
        return Err(Error::Domain(format!(
            "time shares ({t}, {t_out}) must be non-negative"
        )));
    }
    if t + t_out >= 1.0 {
        return Err(Error::Domain(format!("total time {} must stay below 1", t + t_out)));
    }
    Ok(payoff_unchecked(spec, pi, t, t_out))
}

fn payoff_unchecked(spec: &PreferenceSpec, pi: f64, t: f64, t_out: f64) -> f64 {
    spec.a_in * t.ln_1p() + spec.a_out * (pi * t_out).ln_1p() + spec.kappa * (-(t + t_out)).ln_1p()
}

/// Maximizer over `t_out` of the first-stage payoff for fixed `t`.
///
/// The first-order condition is linear in `t_out`, clamped at zero.
pub fn best_outside_time(spec: &PreferenceSpec, pi: f64, t: f64) -> f64 {
    let interior = (pi * spec.a_out * (1.0 - t) - spec.kappa) / (pi * (spec.a_out + spec.kappa));
    interior.max(0.0)
}

/// `w(t) = max_{t_out} first_stage_payoff(t, t_out)`; `−∞` at `t ≥ 1`.
pub fn stage_one_value(spec: &PreferenceSpec, pi: f64, t: f64) -> f64 {
    if t >= 1.0 {
        return f64::NEG_INFINITY;
    }
    payoff_unchecked(spec, pi, t, best_outside_time(spec, pi, t))
}

/// `(t̂, t̂_out)`: the unique maximizer of the first-stage payoff.
pub fn optimize_time(spec: &PreferenceSpec, pi: f64) -> (f64, f64) {
    let (t, _) = golden_section_max(|t| stage_one_value(spec, pi, t), 0.0, 1.0 - 1e-12, 1e-12);
    (t, best_outside_time(spec, pi, t))
}

/// Contribute (1) or not (0). Above the threshold contributions are rewarded,
/// so anyone with `C < R` contributes; below it only `C ≤ 0` does.
pub fn second_stage_rule(cost: f64, reward: f64, regime: Regime) -> u8 {
    let contributes = match regime {
        Regime::Supercritical => cost < reward,
        Regime::Subcritical => cost <= 0.0,
    };
    u8::from(contributes)
}

/// Average second-stage payoffs `(v1, v2)` above and below the threshold.
pub fn second_stage_values(spec: &PreferenceSpec) -> (f64, f64) {
    let r = spec.reward;
    let costs = &spec.costs;
    let v1 = spec.beta * costs.mass(|c| c < r)
        + costs
            .atoms()
            .iter()
            .filter(|(c, _)| *c < r)
            .map(|(c, p)| p * (r - c))
            .sum::<f64>();
    let v2 = spec.beta * costs.mass(|c| c <= 0.0)
        + costs
            .atoms()
            .iter()
            .filter(|(c, _)| *c <= 0.0)
            .map(|(c, p)| p * -c)
            .sum::<f64>();
    (v1, v2)
}

/// Gini coefficient of the two-group payoff distribution
/// `{I_H + v w.p. f, I_L + v w.p. 1 − f}`.
pub fn gini_between(f: f64, payoff_h: f64, payoff_l: f64, v: f64) -> Result<f64> {
    let gap = payoff_h - payoff_l;
    let mean = f * gap + payoff_l + v;
    if !(mean > 0.0) {
        return Err(Error::Domain(format!("mean payoff {mean} must be positive")));
    }
    Ok(f * (1.0 - f) * gap / mean)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeChoice {
    pub pi: f64,
    pub t_hat: f64,
    pub t_out_hat: f64,
    /// First-stage payoff at the optimum.
    pub payoff: f64,
}

impl TypeChoice {
    pub fn solve(spec: &PreferenceSpec, pi: f64) -> Self {
        let (t_hat, t_out_hat) = optimize_time(spec, pi);
        TypeChoice {
            pi,
            t_hat,
            t_out_hat,
            payoff: payoff_unchecked(spec, pi, t_hat, t_out_hat),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub f: f64,
    pub high: TypeChoice,
    pub low: TypeChoice,
    /// Population degree distribution λ.
    pub lambda: DegreePmf,
    pub connectivity: f64,
    pub regime: Regime,
    pub v1: f64,
    pub v2: f64,
    pub v: f64,
    pub u_h: f64,
    pub u_l: f64,
    pub gini: f64,
}

/// First-stage choices per type, the induced degree mixture, its regime, and
/// the resulting welfare and inequality.
pub fn solve_equilibrium(spec: &PreferenceSpec, degree_spec: &DegreeModelSpec, f: f64) -> Result<EquilibriumReport> {
    spec.validate()?;
    degree_spec.validate()?;
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::Validation(format!("high-skill share {f} is outside [0, 1]")));
    }
    let high = TypeChoice::solve(spec, spec.pi_h);
    let low = TypeChoice::solve(spec, spec.pi_l);
    let pmf_h = degree_spec.pmf_at(high.t_hat)?;
    let pmf_l = degree_spec.pmf_at(low.t_hat)?;
    let lambda = mix_population(&[(f, &pmf_h), (1.0 - f, &pmf_l)])?;
    // linear in the weights, so evaluate per type to avoid mixture rounding
    let connectivity = f * pmf_h.connectivity_z() + (1.0 - f) * pmf_l.connectivity_z();
    let regime = Regime::from_statistic(connectivity);
    let (v1, v2) = second_stage_values(spec);
    let v = match regime {
        Regime::Supercritical => v1,
        Regime::Subcritical => v2,
    };
    let gini = gini_between(f, high.payoff, low.payoff, v)?;
    Ok(EquilibriumReport {
        f,
        u_h: high.payoff + v,
        u_l: low.payoff + v,
        high,
        low,
        lambda,
        connectivity,
        regime,
        v1,
        v2,
        v,
        gini,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Skill {
    High,
    Low,
}

/// A finite population playing an equilibrium.
#[derive(Debug, Clone)]
pub struct Population {
    pub f: f64,
    pub skill: Vec<Skill>,
    pub cost: Vec<f64>,
    pub t: Vec<f64>,
    pub t_out: Vec<f64>,
    pub contributes: Vec<u8>,
}

impl Population {
    /// The first `round(f n)` agents are high-skilled; costs are drawn i.i.d.
    pub fn sample<R: Rng + ?Sized>(
        n: usize,
        spec: &PreferenceSpec,
        report: &EquilibriumReport,
        rng: &mut R,
    ) -> Population {
        let n_high = (report.f * n as f64).round() as usize;
        let skill: Vec<Skill> = (0..n)
            .map(|i| if i < n_high { Skill::High } else { Skill::Low })
            .collect();
        let choice = |s: Skill| match s {
            Skill::High => &report.high,
            Skill::Low => &report.low,
        };
        let cost: Vec<f64> = (0..n).map(|_| spec.costs.sample(rng)).collect();
        let contributes = cost
            .iter()
            .map(|&c| second_stage_rule(c, spec.reward, report.regime))
            .collect();
        Population {
            f: report.f,
            t: skill.iter().map(|&s| choice(s).t_hat).collect(),
            t_out: skill.iter().map(|&s| choice(s).t_out_hat).collect(),
            skill,
            cost,
            contributes,
        }
    }

    pub fn len(&self) -> usize {
        self.skill.len()
    }

    pub fn is_empty(&self) -> bool {
        self.skill.is_empty()
    }

    /// Per-agent second-stage payoff `β x_i + x_i (R p − C_i)`, whose mean is
    /// `B(share) + mean(x (R p − C))`.
    pub fn second_stage_payoffs(&self, spec: &PreferenceSpec, reward_probability: f64) -> Vec<f64> {
        self.cost
            .iter()
            .zip(&self.contributes)
            .map(|(&c, &x)| {
                let x = f64::from(x);
                spec.beta * x + x * (spec.reward * reward_probability - c)
            })
            .collect()
    }
}

/// Configuration-model network of `n` agents playing `report`: the first
/// `round(f n)` agents draw degrees at the high-skill time choice.
pub fn sample_equilibrium_network<R: Rng + ?Sized>(
    report: &EquilibriumReport,
    degree_spec: &DegreeModelSpec,
    n: usize,
    rng: &mut R,
) -> Result<Graph> {
    let high = degree_spec.pmf_at(report.high.t_hat)?;
    let low = degree_spec.pmf_at(report.low.t_hat)?;
    let n_high = (report.f * n as f64).round() as usize;
    let pmfs: Vec<&DegreePmf> = (0..n).map(|i| if i < n_high { &high } else { &low }).collect();
    Ok(sample_configuration(&sample_degrees(&pmfs, rng)?, rng))
}

/// Mean and standard error of the realized second-stage payoff in a sampled
/// population, with rewards given by the large-n limit of the regime.
pub fn simulate_second_stage<R: Rng + ?Sized>(
    spec: &PreferenceSpec,
    report: &EquilibriumReport,
    n: usize,
    rng: &mut R,
) -> (f64, f64) {
    let pop = Population::sample(n, spec, report, rng);
    let payoffs = pop.second_stage_payoffs(spec, predicted_reward(report.regime));
    mean_and_se(&payoffs)
}

pub(crate) fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
