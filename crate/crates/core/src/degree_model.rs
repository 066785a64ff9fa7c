//! Degree distributions `p(d | t)` and the connectivity function
//! `Z(t) = E[d² | t] − 2 E[d | t]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solve::bisect_increasing;

const SUM_TOL: f64 = 1e-12;

/// A probability mass function over degrees `0..=max_degree`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreePmf {
    probs: Vec<f64>,
}

impl DegreePmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Validation("degree pmf has no support".into()));
        }
        if let Some((d, p)) = probs.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Validation(format!(
                "probability {p} at degree {d} is outside [0, 1]"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::Validation(format!("degree pmf sums to {total}, not 1")));
        }
        Ok(DegreePmf { probs })
    }

    /// Binomial(`max_degree`, `theta`).
    pub fn binomial(max_degree: usize, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::Domain(format!("binomial parameter {theta} is outside [0, 1]")));
        }
        let mut probs = Vec::with_capacity(max_degree + 1);
        let mut coeff = 1.0;
        for d in 0..=max_degree {
            if d > 0 {
                coeff *= (max_degree + 1 - d) as f64 / d as f64;
            }
            probs.push(coeff * theta.powi(d as i32) * (1.0 - theta).powi((max_degree - d) as i32));
        }
        DegreePmf::new(probs)
    }

    pub fn point_mass(degree: usize, max_degree: usize) -> Result<Self> {
        if degree > max_degree {
            return Err(Error::Domain(format!(
                "degree {degree} exceeds max degree {max_degree}"
            )));
        }
        let mut probs = vec![0.0; max_degree + 1];
        probs[degree] = 1.0;
        DegreePmf::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn max_degree(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn prob(&self, d: usize) -> f64 {
        self.probs.get(d).copied().unwrap_or(0.0)
    }

    /// `(E[d], E[d²])`.
    pub fn moments(&self) -> (f64, f64) {
        self.probs.iter().enumerate().fold((0.0, 0.0), |(m1, m2), (d, &p)| {
            let d = d as f64;
            (m1 + d * p, m2 + d * d * p)
        })
    }

    /// `Σ_d d(d−2) p_d`; positive means a giant component in the large-n limit.
    pub fn connectivity_z(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(d, &p)| {
                let d = d as f64;
                d * (d - 2.0) * p
            })
            .sum()
    }

    /// `E[d | d ≥ 2]`. Returns `None` when no mass sits on degrees ≥ 2.
    pub fn mean_degree_at_least_two(&self) -> Option<f64> {
        let (mass, first) = self
            .probs
            .iter()
            .enumerate()
            .skip(2)
            .fold((0.0, 0.0), |(m, s), (d, &p)| (m + p, s + d as f64 * p));
        (mass > 0.0).then(|| first / mass)
    }

    /// Inverse-CDF draw from a uniform variate `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (d, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return d;
            }
        }
        // rounding left `acc` a hair under 1: take the last supported degree
        self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }
}

/// Free-function form of [`DegreePmf::moments`].
pub fn moments(pmf: &DegreePmf) -> (f64, f64) {
    pmf.moments()
}

/// Free-function form of [`DegreePmf::connectivity_z`].
pub fn connectivity_z(pmf: &DegreePmf) -> f64 {
    pmf.connectivity_z()
}

/// Population mixture `λ_d = Σ_h w_h p_h(d)`.
pub fn mix_population(entries: &[(f64, &DegreePmf)]) -> Result<DegreePmf> {
    let Some((_, first)) = entries.first() else {
        return Err(Error::Validation("mixture has no entries".into()));
    };
    let max_degree = first.max_degree();
    if let Some((_, pmf)) = entries.iter().find(|(_, p)| p.max_degree() != max_degree) {
        return Err(Error::Validation(format!(
            "mixture entries disagree on max degree ({} vs {max_degree})",
            pmf.max_degree()
        )));
    }
    if let Some((w, _)) = entries.iter().find(|(w, _)| !(*w >= 0.0)) {
        return Err(Error::Validation(format!("negative mixture weight {w}")));
    }
    let total: f64 = entries.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::Validation(format!("mixture weights sum to {total}, not 1")));
    }
    let mut probs = vec![0.0; max_degree + 1];
    for (w, pmf) in entries {
        for (acc, p) in probs.iter_mut().zip(pmf.probs()) {
            *acc += w * p;
        }
    }
    probs.iter_mut().for_each(|p| *p = p.clamp(0.0, 1.0));
    DegreePmf::new(probs)
}

/// Parametric family for `p(d | t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DegreeModelSpec {
    /// Binomial(`max_degree`, θ(t)) with θ(t) = θ_min + (θ_max − θ_min) t.
    BinomialLink {
        max_degree: usize,
        theta_min: f64,
        theta_max: f64,
    },
    /// Piecewise-linear interpolation between tabulated PMFs on a grid in t.
    Tabulated { grid: Vec<(f64, DegreePmf)> },
}

impl Default for DegreeModelSpec {
    fn default() -> Self {
        DegreeModelSpec::BinomialLink {
            max_degree: 6,
            theta_min: 0.13,
            theta_max: 0.35,
        }
    }
}

impl DegreeModelSpec {
    pub fn binomial_link(max_degree: usize, theta_min: f64, theta_max: f64) -> Result<Self> {
        let spec = DegreeModelSpec::BinomialLink {
            max_degree,
            theta_min,
            theta_max,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the structural invariants.
    ///
    /// Whether Z crosses zero strictly inside (0, 1) is reported by
    /// [`DegreeModelSpec::critical_t`] instead, as an infeasibility.
    pub fn validate(&self) -> Result<()> {
        match self {
            DegreeModelSpec::BinomialLink {
                max_degree,
                theta_min,
                theta_max,
            } => {
                if *max_degree <= 3 {
                    return Err(Error::Validation(format!("max degree must exceed 3, got {max_degree}")));
                }
                if !(0.0 < *theta_min && theta_min < theta_max && *theta_max < 1.0) {
                    return Err(Error::Validation(format!(
                        "need 0 < theta_min < theta_max < 1, got ({theta_min}, {theta_max})"
                    )));
                }
                let floor = 1.0 / (2.0 * (*max_degree as f64 - 1.0));
                if *theta_min < floor {
                    return Err(Error::Validation(format!(
                        "theta_min {theta_min} is below {floor}; Z would not be increasing in t"
                    )));
                }
                Ok(())
            }
            DegreeModelSpec::Tabulated { grid } => {
                let (Some(first), Some(last)) = (grid.first(), grid.last()) else {
                    return Err(Error::Validation("tabulated degree model is empty".into()));
                };
                if grid.len() < 2 || first.0 != 0.0 || last.0 != 1.0 {
                    return Err(Error::Validation("tabulated grid must run from t = 0 to t = 1".into()));
                }
                if grid.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::Validation(
                        "tabulated grid must be strictly increasing in t".into(),
                    ));
                }
                let d = first.1.max_degree();
                if d <= 3 {
                    return Err(Error::Validation(format!("max degree must exceed 3, got {d}")));
                }
                if grid.iter().any(|(_, p)| p.max_degree() != d) {
                    return Err(Error::Validation("tabulated rows disagree on max degree".into()));
                }
                if grid.iter().any(|(_, p)| p.prob(1) <= 0.0) {
                    return Err(Error::Validation(
                        "every tabulated pmf needs positive mass at degree one".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn max_degree(&self) -> usize {
        match self {
            DegreeModelSpec::BinomialLink { max_degree, .. } => *max_degree,
            DegreeModelSpec::Tabulated { grid } => grid[0].1.max_degree(),
        }
    }

    /// Link θ(t) for the binomial family.
    pub fn theta(&self, t: f64) -> Option<f64> {
        match self {
            DegreeModelSpec::BinomialLink {
                theta_min, theta_max, ..
            } => Some(theta_min + (theta_max - theta_min) * t),
            DegreeModelSpec::Tabulated { .. } => None,
        }
    }

    pub fn pmf_at(&self, t: f64) -> Result<DegreePmf> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("time share {t} is outside [0, 1]")));
        }
        self.validate()?;
        match self {
            DegreeModelSpec::BinomialLink { max_degree, .. } => {
                DegreePmf::binomial(*max_degree, self.theta(t).expect("binomial family"))
            }
            DegreeModelSpec::Tabulated { grid } => {
                let hi = grid.partition_point(|(gt, _)| *gt < t).max(1);
                let (t0, p0) = &grid[hi - 1];
                let (t1, p1) = &grid[hi];
                let w = (t - t0) / (t1 - t0);
                mix_population(&[(1.0 - w, p0), (w, p1)])
            }
        }
    }

    /// `Z(t) = connectivity_z(pmf_at(t))`.
    pub fn z(&self, t: f64) -> Result<f64> {
        Ok(self.pmf_at(t)?.connectivity_z())
    }

    /// The time share at which Z crosses zero, found by bisection.
    pub fn critical_t(&self) -> Result<f64> {
        let z0 = self.z(0.0)?;
        let z1 = self.z(1.0)?;
        if !(z0 < 0.0 && z1 > 0.0) {
            return Err(Error::Infeasible(format!(
                "Z does not cross zero inside (0, 1): Z(0) = {z0}, Z(1) = {z1}"
            )));
        }
        let z = |t: f64| self.z(t).expect("t stays inside [0, 1]");
        Ok(bisect_increasing(z, 0.0, 1.0, 0.0, 1e-12))
    }

    /// Parses a tabulated model: one line per grid point, `t d0 d1 ... dD`.
    pub fn tabulated_from_str(text: &str) -> Result<Self> {
        let mut grid = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let values = line
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Validation(format!("line {}: {e}", lineno + 1)))?;
            if values.len() < 2 {
                return Err(Error::Validation(format!(
                    "line {}: expected `t d0 ... dD`",
                    lineno + 1
                )));
            }
            let pmf = DegreePmf::new(values[1..].to_vec())
                .map_err(|e| Error::Validation(format!("line {}: {e}", lineno + 1)))?;
            grid.push((values[0], pmf));
        }
        let spec = DegreeModelSpec::Tabulated { grid };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load_table(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        DegreeModelSpec::tabulated_from_str(&text)
    }
}

/// Free-function form of [`DegreeModelSpec::pmf_at`].
pub fn pmf_at(spec: &DegreeModelSpec, t: f64) -> Result<DegreePmf> {
    spec.pmf_at(t)
}

/// Free-function form of [`DegreeModelSpec::critical_t`].
pub fn critical_t(spec: &DegreeModelSpec) -> Result<f64> {
    spec.critical_t()
}
