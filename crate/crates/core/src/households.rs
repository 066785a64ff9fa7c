//! The coordination game between households that anticipate a connectivity
//! shock.
//!
//! Post-shock connectivity is `(1/H) Σ_h Z(t_h) + k ξ` with `ξ` uniform on
//! `[−ξ̄, ξ̄]`; the slope is `k₊ = 2d̄ − 1` for gains and `k₋ = 2d̄ − 3` for
//! losses, where `d̄ = E[d | d ≥ 2]`. Being above the threshold is worth `Δv`.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{optimize_time, second_stage_values, stage_one_value, PreferenceSpec};
use crate::degree_model::{mix_population, DegreeModelSpec, DegreePmf};
use crate::error::{Error, Result};

/// Slack on the mean connectivity when testing the worst-case shock, so that
/// a profile solved to the threshold counts as meeting it.
const THRESHOLD_SLACK: f64 = 1e-12;

/// Everything the equilibrium analysis needs from a household economy.
///
/// `z` must be strictly increasing on `[0, 1]`, and `w(h, ·)` must be
/// maximized at `t_hat(h)` and decreasing above it.
pub trait HouseholdGame {
    fn households(&self) -> usize;
    fn z(&self, h: usize, t: f64) -> f64;
    fn t_hat(&self, h: usize) -> f64;
    /// First-stage value with the outside option already optimized.
    fn w(&self, h: usize, t: f64) -> f64;
    fn delta_v(&self) -> f64;
    fn xi_bar(&self) -> f64;
    fn k_plus(&self) -> f64;
    fn k_minus(&self) -> f64;
}

/// Households that share preferences and a degree model and differ in
/// productivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseholdGameSpec {
    pi: Vec<f64>,
    prefs: PreferenceSpec,
    degree_spec: DegreeModelSpec,
    xi_bar: f64,
    delta_v: f64,
    t_hat: Vec<f64>,
    mean_shocked_degree: f64,
}

impl HouseholdGameSpec {
    /// `delta_v` defaults to `v1 − v2`.
    pub fn new(
        pi: Vec<f64>,
        prefs: PreferenceSpec,
        degree_spec: DegreeModelSpec,
        xi_bar: f64,
        delta_v: Option<f64>,
    ) -> Result<Self> {
        if pi.is_empty() {
            return Err(Error::Validation("household game needs at least one household".into()));
        }
        if let Some(p) = pi.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
            return Err(Error::Validation(format!(
                "household productivity {p} must be positive"
            )));
        }
        prefs.validate()?;
        degree_spec.validate()?;
        let delta_v = delta_v.unwrap_or_else(|| {
            let (v1, v2) = second_stage_values(&prefs);
            v1 - v2
        });
        let t_hat: Vec<f64> = pi.iter().map(|&p| optimize_time(&prefs, p).0).collect();
        let pmfs = t_hat
            .iter()
            .map(|&t| degree_spec.pmf_at(t))
            .collect::<Result<Vec<DegreePmf>>>()?;
        let weight = 1.0 / pi.len() as f64;
        let mixture = mix_population(&pmfs.iter().map(|p| (weight, p)).collect::<Vec<_>>())?;
        let mean_shocked_degree = mixture.mean_degree_at_least_two().unwrap_or(0.0);
        let spec = HouseholdGameSpec {
            pi,
            prefs,
            degree_spec,
            xi_bar,
            delta_v,
            t_hat,
            mean_shocked_degree,
        };
        if !(mean_shocked_degree > 1.5) {
            return Err(Error::Validation(format!(
                "mean degree among agents with d >= 2 is {mean_shocked_degree}; shock slopes need it above 1.5"
            )));
        }
        validate_game(&spec)?;
        Ok(spec)
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn prefs(&self) -> &PreferenceSpec {
        &self.prefs
    }

    pub fn degree_spec(&self) -> &DegreeModelSpec {
        &self.degree_spec
    }

    /// `d̄ = E[d | d ≥ 2]` under the mixture at the myopic profile.
    pub fn mean_shocked_degree(&self) -> f64 {
        self.mean_shocked_degree
    }
}

impl HouseholdGame for HouseholdGameSpec {
    fn households(&self) -> usize {
        self.pi.len()
    }

    fn z(&self, _h: usize, t: f64) -> f64 {
        self.degree_spec.z(t.clamp(0.0, 1.0)).unwrap_or(f64::NAN)
    }

    fn t_hat(&self, h: usize) -> f64 {
        self.t_hat[h]
    }

    fn w(&self, h: usize, t: f64) -> f64 {
        stage_one_value(&self.prefs, self.pi[h], t)
    }

    fn delta_v(&self) -> f64 {
        self.delta_v
    }

    fn xi_bar(&self) -> f64 {
        self.xi_bar
    }

    fn k_plus(&self) -> f64 {
        2.0 * self.mean_shocked_degree - 1.0
    }

    fn k_minus(&self) -> f64 {
        2.0 * self.mean_shocked_degree - 3.0
    }
}

/// A closed-form household game: `Z(t) = a (t − c)` and
/// `w_h(t) = −b_h (t − t̂_h)²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearHouseholdGame {
    pub slope: f64,
    pub center: f64,
    pub t_hat: Vec<f64>,
    pub curvature: Vec<f64>,
    pub delta_v: f64,
    pub xi_bar: f64,
    pub k_plus: f64,
    pub k_minus: f64,
}

impl LinearHouseholdGame {
    /// Picks each curvature so that the willingness-to-sacrifice point is
    /// exactly `t_max[h]`.
    #[allow(clippy::too_many_arguments)]
    pub fn with_t_max(
        slope: f64,
        center: f64,
        t_hat: Vec<f64>,
        t_max: &[f64],
        delta_v: f64,
        xi_bar: f64,
        k_plus: f64,
        k_minus: f64,
    ) -> Result<Self> {
        if t_hat.len() != t_max.len() {
            return Err(Error::Validation("t_hat and t_max lengths differ".into()));
        }
        if t_hat.iter().zip(t_max).any(|(a, b)| !(b > a)) {
            return Err(Error::Validation("each t_max must exceed its t_hat".into()));
        }
        let curvature = t_hat
            .iter()
            .zip(t_max)
            .map(|(a, b)| delta_v / ((b - a) * (b - a)))
            .collect();
        let game = LinearHouseholdGame {
            slope,
            center,
            t_hat,
            curvature,
            delta_v,
            xi_bar,
            k_plus,
            k_minus,
        };
        validate_game(&game)?;
        Ok(game)
    }
}

impl HouseholdGame for LinearHouseholdGame {
    fn households(&self) -> usize {
        self.t_hat.len()
    }

    fn z(&self, _h: usize, t: f64) -> f64 {
        self.slope * (t - self.center)
    }

    fn t_hat(&self, h: usize) -> f64 {
        self.t_hat[h]
    }

    fn w(&self, h: usize, t: f64) -> f64 {
        let d = t - self.t_hat[h];
        -self.curvature[h] * d * d
    }

    fn delta_v(&self) -> f64 {
        self.delta_v
    }

    fn xi_bar(&self) -> f64 {
        self.xi_bar
    }

    fn k_plus(&self) -> f64 {
        self.k_plus
    }

    fn k_minus(&self) -> f64 {
        self.k_minus
    }
}

pub fn validate_game(game: &impl HouseholdGame) -> Result<()> {
    if game.households() == 0 {
        return Err(Error::Validation("household game needs at least one household".into()));
    }
    if !(game.delta_v() > 0.0) {
        return Err(Error::Validation(format!(
            "delta_v = {} must be positive",
            game.delta_v()
        )));
    }
    if !(game.xi_bar() > 0.0 && game.xi_bar().is_finite()) {
        return Err(Error::Validation(format!(
            "xi_bar = {} must be positive",
            game.xi_bar()
        )));
    }
    if !(game.k_minus() > 0.0 && game.k_plus() >= game.k_minus()) {
        return Err(Error::Validation(format!(
            "shock slopes need k_plus >= k_minus > 0, got ({}, {})",
            game.k_plus(),
            game.k_minus()
        )));
    }
    Ok(())
}

/// Where a threshold time falls relative to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    At(f64),
    /// Every `t ∈ [0, 1]` is already past the threshold.
    Below,
    /// No `t ∈ [0, 1]` reaches the threshold.
    Above,
}

impl Threshold {
    pub fn value(self) -> Option<f64> {
        match self {
            Threshold::At(t) => Some(t),
            _ => None,
        }
    }
}

fn check_profile(game: &impl HouseholdGame, t: &[f64]) -> Result<()> {
    if t.len() != game.households() {
        return Err(Error::Validation(format!(
            "profile has {} entries for {} households",
            t.len(),
            game.households()
        )));
    }
    if let Some(x) = t.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::Domain(format!("time share {x} is outside [0, 1]")));
    }
    Ok(())
}

fn check_household(game: &impl HouseholdGame, h: usize) -> Result<()> {
    if h >= game.households() {
        return Err(Error::Domain(format!(
            "household {h} is outside 0..{}",
            game.households()
        )));
    }
    Ok(())
}

pub fn z_of(game: &impl HouseholdGame, h: usize, t: f64) -> Result<f64> {
    check_household(game, h)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("time share {t} is outside [0, 1]")));
    }
    Ok(game.z(h, t))
}

/// `(1/H) Σ_h Z(t_h)`.
pub fn mean_connectivity(game: &impl HouseholdGame, t: &[f64]) -> Result<f64> {
    check_profile(game, t)?;
    Ok(t.iter().enumerate().map(|(h, &x)| game.z(h, x)).sum::<f64>() / t.len() as f64)
}

pub fn connectivity_post_shock(game: &impl HouseholdGame, t: &[f64], xi: f64) -> Result<f64> {
    if !(xi.abs() <= game.xi_bar()) {
        return Err(Error::Domain(format!("shock {xi} exceeds xi_bar = {}", game.xi_bar())));
    }
    let k = if xi > 0.0 { game.k_plus() } else { game.k_minus() };
    Ok(mean_connectivity(game, t)? + k * xi)
}

/// Probability over the uniform shock that post-shock connectivity is
/// strictly positive, given mean pre-shock connectivity `m`.
fn p_sc_at_mean(game: &impl HouseholdGame, m: f64) -> f64 {
    let xi_bar = game.xi_bar();
    if m >= game.k_minus() * xi_bar - THRESHOLD_SLACK {
        1.0
    } else if m >= 0.0 {
        0.5 + m / (2.0 * game.k_minus() * xi_bar)
    } else if m <= -game.k_plus() * xi_bar + THRESHOLD_SLACK {
        0.0
    } else {
        (0.5 + m / (2.0 * game.k_plus() * xi_bar)).max(0.0)
    }
}

pub fn p_sc(game: &impl HouseholdGame, t: &[f64]) -> Result<f64> {
    Ok(p_sc_at_mean(game, mean_connectivity(game, t)?))
}

/// `p_sc` after an unanticipated shift `eps` of mean connectivity.
pub fn p_sc_with_offset(game: &impl HouseholdGame, t: &[f64], eps: f64) -> Result<f64> {
    Ok(p_sc_at_mean(game, mean_connectivity(game, t)? + eps))
}

/// Solves `Z(t_h) = target − Σ_{h' ≠ h} Z(t_{h'})` on `[0, 1]`, returning the
/// bracket end with `Z ≥ need` when `upper` and `Z ≤ need` otherwise.
fn solve_own_z(game: &impl HouseholdGame, h: usize, t: &[f64], target: f64, upper: bool) -> Result<Threshold> {
    check_household(game, h)?;
    check_profile(game, t)?;
    let others: f64 = t
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != h)
        .map(|(j, &x)| game.z(j, x))
        .sum();
    let need = target - others;
    if game.z(h, 0.0) > need {
        return Ok(Threshold::Below);
    }
    if game.z(h, 1.0) < need {
        return Ok(Threshold::Above);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if game.z(h, mid) >= need {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Threshold::At(if upper { hi } else { lo }))
}

/// Least `t_h` that keeps connectivity positive under the worst shock, given
/// the other entries of `t`. The entry `t[h]` is ignored.
pub fn t_crit(game: &impl HouseholdGame, h: usize, t: &[f64]) -> Result<Threshold> {
    let h_count = game.households() as f64;
    solve_own_z(game, h, t, game.xi_bar() * h_count * game.k_minus(), true)
}

/// Greatest `t_h` that keeps connectivity non-positive under the best shock,
/// given the other entries of `t`. The entry `t[h]` is ignored.
pub fn t_uncrit(game: &impl HouseholdGame, h: usize, t: &[f64]) -> Result<Threshold> {
    let h_count = game.households() as f64;
    solve_own_z(game, h, t, -game.xi_bar() * h_count * game.k_plus(), false)
}

/// The `t ≥ t̂_h` at which `w_h(t̂_h) − w_h(t) = Δv`, capped at 1.
pub fn t_max(game: &impl HouseholdGame, h: usize) -> Result<f64> {
    check_household(game, h)?;
    let t_hat = game.t_hat(h);
    let floor = game.w(h, t_hat) - game.delta_v();
    if game.w(h, 1.0) >= floor {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (t_hat, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if game.w(h, mid) >= floor {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn meets_threshold(game: &impl HouseholdGame, t: &[f64]) -> Result<bool> {
    Ok(mean_connectivity(game, t)? >= game.k_minus() * game.xi_bar() - THRESHOLD_SLACK)
}

/// `t_crit` when it lies in `(t̂_h, t_max_h]`, `t̂_h` otherwise.
pub fn best_response(game: &impl HouseholdGame, h: usize, t: &[f64]) -> Result<f64> {
    check_household(game, h)?;
    let t_hat = game.t_hat(h);
    let mut at_hat = t.to_vec();
    at_hat[h] = t_hat;
    if meets_threshold(game, &at_hat)? {
        return Ok(t_hat);
    }
    match t_crit(game, h, t)? {
        Threshold::At(tc) if tc <= t_max(game, h)? => Ok(tc),
        _ => Ok(t_hat),
    }
}

/// Round-robin best responses from `start` until a sweep changes nothing.
pub fn iterate_best_responses(game: &impl HouseholdGame, start: &[f64], max_sweeps: usize) -> Result<Vec<f64>> {
    check_profile(game, start)?;
    let mut t = start.to_vec();
    for _ in 0..max_sweeps {
        let mut changed = false;
        for h in 0..t.len() {
            let next = best_response(game, h, &t)?;
            changed |= next != t[h];
            t[h] = next;
        }
        if !changed {
            break;
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// Myopic choices already survive the worst shock.
    AlwaysHigh,
    /// A single household can lift the economy; the low outcome unravels.
    ThresholdUnique,
    /// Both a coordinated threshold profile and the myopic profile are stable.
    Bistable,
    /// Even everyone at their maximal sacrifice falls short.
    AlwaysLow,
}

impl CaseTag {
    pub fn roman(self) -> &'static str {
        match self {
            CaseTag::AlwaysHigh => "i",
            CaseTag::ThresholdUnique => "ii",
            CaseTag::Bistable => "iii",
            CaseTag::AlwaysLow => "iv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCase {
    pub tag: CaseTag,
    /// The myopic profile for the always-high/always-low cases, a threshold
    /// profile otherwise.
    pub witness: Vec<f64>,
    /// The miscoordinated myopic profile in the bistable case.
    pub low_witness: Option<Vec<f64>>,
    /// Threshold profiles are not unique when several households could share
    /// the effort.
    pub multiple_profiles: bool,
    pub t_hat: Vec<f64>,
    pub t_max: Vec<f64>,
}

/// Four-way classification of equilibria, checked in the order
/// (i), (ii), (iv), with (iii) as the remainder.
///
/// The (ii) witness lifts the lowest-indexed household able to reach its
/// `t_crit` alone. The (iii) witness raises households in index order to
/// their `t_max` until the threshold is met.
pub fn classify_equilibrium(game: &impl HouseholdGame) -> Result<EquilibriumCase> {
    validate_game(game)?;
    let h_count = game.households();
    let t_hat: Vec<f64> = (0..h_count).map(|h| game.t_hat(h)).collect();
    let t_max_vec = (0..h_count).map(|h| t_max(game, h)).collect::<Result<Vec<f64>>>()?;
    let report = |tag: CaseTag, witness: Vec<f64>, low_witness: Option<Vec<f64>>| EquilibriumCase {
        tag,
        multiple_profiles: matches!(tag, CaseTag::ThresholdUnique | CaseTag::Bistable) && h_count > 1,
        witness,
        low_witness,
        t_hat: t_hat.clone(),
        t_max: t_max_vec.clone(),
    };

    if meets_threshold(game, &t_hat)? {
        return Ok(report(CaseTag::AlwaysHigh, t_hat.clone(), None));
    }
    for h in 0..h_count {
        if let Threshold::At(tc) = t_crit(game, h, &t_hat)? {
            if tc <= t_max_vec[h] {
                let mut witness = t_hat.clone();
                witness[h] = tc;
                return Ok(report(CaseTag::ThresholdUnique, witness, None));
            }
        }
    }
    if !meets_threshold(game, &t_max_vec)? {
        return Ok(report(CaseTag::AlwaysLow, t_hat.clone(), None));
    }
    let mut witness = t_hat.clone();
    for h in 0..h_count {
        witness[h] = t_max_vec[h];
        if meets_threshold(game, &witness)? {
            if let Threshold::At(tc) = t_crit(game, h, &witness)? {
                witness[h] = tc.max(t_hat[h]);
            }
            break;
        }
    }
    Ok(report(CaseTag::Bistable, witness, Some(t_hat.clone())))
}

/// Finite-population image of the shock: a share `|xi|` of the agents with
/// at least two friends each gain (`xi > 0`) or lose (`xi < 0`) one friend.
pub fn apply_degree_shock<R: Rng + ?Sized>(degrees: &[usize], xi: f64, rng: &mut R) -> Result<Vec<usize>> {
    if !(-1.0..=1.0).contains(&xi) {
        return Err(Error::Domain(format!("shock share {xi} is outside [-1, 1]")));
    }
    let eligible: Vec<usize> = (0..degrees.len()).filter(|&i| degrees[i] >= 2).collect();
    let count = (xi.abs() * eligible.len() as f64).round() as usize;
    let mut out = degrees.to_vec();
    for k in index::sample(rng, eligible.len(), count) {
        let i = eligible[k];
        if xi > 0.0 {
            out[i] += 1;
        } else {
            out[i] -= 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{connectivity_statistic, sample_iid_degrees};
    use crate::rng::stream;
    use proptest::prelude::*;

    /// `Z(t) = t − 0.5`, `H = 2`, `k = 1`, `ξ̄ = 0.1`.
    fn toy(t_hat: f64, t_max: f64) -> LinearHouseholdGame {
        LinearHouseholdGame::with_t_max(1.0, 0.5, vec![t_hat; 2], &[t_max; 2], 1.0, 0.1, 1.0, 1.0).unwrap()
    }

    #[test]
    fn z_of_default_family() {
        let g = HouseholdGameSpec::new(
            vec![1.0, 1.2],
            PreferenceSpec::default(),
            DegreeModelSpec::default(),
            0.01,
            None,
        )
        .unwrap();
        assert!((z_of(&g, 0, 1.0).unwrap() - 1.575).abs() < 1e-12);
        assert!((z_of(&g, 1, 0.0).unwrap() + 0.273).abs() < 1e-12);
        let crit = DegreeModelSpec::default().critical_t().unwrap();
        assert!(z_of(&g, 0, crit).unwrap().abs() < 1e-10);
        assert!(z_of(&g, 0, 1.2).is_err());
        assert!(z_of(&g, 2, 0.5).is_err());
        assert!((g.k_plus() - g.k_minus() - 2.0).abs() < 1e-12);
        let (v1, v2) = second_stage_values(&PreferenceSpec::default());
        assert_eq!(g.delta_v(), v1 - v2);
    }

    #[test]
    fn post_shock_examples() {
        let g = toy(0.45, 0.9);
        // Z = (0.12, 0.10)
        let t = [0.62, 0.60];
        assert!((connectivity_post_shock(&g, &t, 0.0).unwrap() - 0.11).abs() < 1e-12);
        assert!((connectivity_post_shock(&g, &t, -0.1).unwrap() - 0.01).abs() < 1e-12);
        assert!(connectivity_post_shock(&g, &t, 0.2).is_err());
        assert!((connectivity_post_shock(&g, &[0.5, 0.5], 0.1).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn p_sc_examples() {
        let g = toy(0.45, 0.9);
        assert_eq!(p_sc(&g, &[0.5, 0.5]).unwrap(), 0.5);
        assert_eq!(p_sc(&g, &[0.62, 0.60]).unwrap(), 1.0);
        assert_eq!(p_sc(&g, &[0.35, 0.45]).unwrap(), 0.0);
        // m = 0.05 covers half of the negative branch
        assert!((p_sc(&g, &[0.55, 0.55]).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn p_sc_matches_shock_quadrature() {
        let g = LinearHouseholdGame::with_t_max(1.3, 0.4, vec![0.3, 0.5], &[0.6, 0.8], 1.0, 0.05, 2.4, 0.4).unwrap();
        for t in [[0.4, 0.38], [0.41, 0.41], [0.39, 0.40], [0.42, 0.40]] {
            let n = 200_000;
            let hits = (0..n)
                .filter(|&i| {
                    let xi = -g.xi_bar + 2.0 * g.xi_bar * (i as f64 + 0.5) / n as f64;
                    connectivity_post_shock(&g, &t, xi).unwrap() > 0.0
                })
                .count();
            let quad = hits as f64 / n as f64;
            assert!((p_sc(&g, &t).unwrap() - quad).abs() < 1e-4, "{t:?}");
        }
    }

    #[test]
    fn t_crit_examples() {
        let g = toy(0.45, 0.9);
        let tc = t_crit(&g, 0, &[0.0, 0.6]).unwrap().value().unwrap();
        assert!((tc - 0.6).abs() < 1e-12);
        assert_eq!(p_sc(&g, &[tc, 0.6]).unwrap(), 1.0);
        let tu = t_uncrit(&g, 0, &[0.0, 0.6]).unwrap().value().unwrap();
        assert!((tu - 0.2).abs() < 1e-12);
        assert_eq!(p_sc(&g, &[tu, 0.6]).unwrap(), 0.0);

        let wide = LinearHouseholdGame::with_t_max(1.0, 0.5, vec![0.4; 2], &[0.9; 2], 1.0, 0.1, 1.0, 1.0).unwrap();
        let tc = t_crit(&wide, 0, &[0.0, 1.0]).unwrap().value().unwrap();
        assert!((tc - 0.2).abs() < 1e-12);
        let steep = LinearHouseholdGame {
            center: -0.5,
            ..wide.clone()
        };
        assert_eq!(t_crit(&steep, 0, &[0.0, 1.0]).unwrap(), Threshold::Below);
        // Σ others = 0 and ξ̄ H k = 0.2 > Z(1) = 0.1 when the centre sits at 0.9
        let flat = LinearHouseholdGame { center: 0.9, ..wide };
        assert_eq!(t_crit(&flat, 0, &[0.0, 0.9]).unwrap(), Threshold::Above);
    }

    #[test]
    fn t_crit_residual_on_default_family() {
        let g = HouseholdGameSpec::new(
            vec![1.0, 1.5, 2.0],
            PreferenceSpec::default(),
            DegreeModelSpec::default(),
            0.02,
            None,
        )
        .unwrap();
        let t = [0.3, 0.3, 0.3];
        let tc = t_crit(&g, 1, &t).unwrap().value().unwrap();
        let need = 0.02 * 3.0 * g.k_minus() - g.z(0, 0.3) - g.z(2, 0.3);
        assert!((g.z(1, tc) - need).abs() <= 1e-8);
        let tu = t_uncrit(&g, 1, &t).unwrap().value().unwrap();
        let need = -0.02 * 3.0 * g.k_plus() - g.z(0, 0.3) - g.z(2, 0.3);
        assert!((g.z(1, tu) - need).abs() <= 1e-8);
        assert!(tu < tc);
    }

    #[test]
    fn threshold_gap_closes_with_shock_width() {
        let gaps: Vec<f64> = [0.02, 0.005, 0.001]
            .iter()
            .map(|&xi_bar| {
                let g = HouseholdGameSpec::new(
                    vec![1.0, 1.4],
                    PreferenceSpec::default(),
                    DegreeModelSpec::default(),
                    xi_bar,
                    None,
                )
                .unwrap();
                let t = [0.32, 0.32];
                let tc = t_crit(&g, 0, &t).unwrap().value().unwrap();
                let tu = t_uncrit(&g, 0, &t).unwrap().value().unwrap();
                tc - tu
            })
            .collect();
        assert!(gaps.iter().all(|&g| g > 0.0));
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        assert!(gaps[2] < 0.01);
    }

    #[test]
    fn t_max_self_consistent() {
        let g = HouseholdGameSpec::new(
            vec![1.0],
            PreferenceSpec::default(),
            DegreeModelSpec::default(),
            0.02,
            None,
        )
        .unwrap();
        let tm = t_max(&g, 0).unwrap();
        assert!(tm > g.t_hat(0) && tm < 1.0);
        assert!((g.w(0, g.t_hat(0)) - g.w(0, tm) - g.delta_v()).abs() < 1e-6);

        let tiny = HouseholdGameSpec::new(
            vec![1.0],
            PreferenceSpec::default(),
            DegreeModelSpec::default(),
            0.02,
            Some(1e-12),
        )
        .unwrap();
        assert!((t_max(&tiny, 0).unwrap() - tiny.t_hat(0)).abs() < 1e-5);
    }

    #[test]
    fn t_max_decreasing_in_productivity() {
        let pis: Vec<f64> = (8..=30).map(|k| k as f64 / 10.0).collect();
        let g = HouseholdGameSpec::new(pis, PreferenceSpec::default(), DegreeModelSpec::default(), 0.02, None).unwrap();
        let tm: Vec<f64> = (0..g.households()).map(|h| t_max(&g, h).unwrap()).collect();
        assert!(tm.windows(2).all(|w| w[1] < w[0]), "{tm:?}");
    }

    #[test]
    fn best_response_examples() {
        let g = toy(0.45, 0.9);
        // the other household alone already clears the threshold
        assert_eq!(best_response(&g, 0, &[0.45, 1.0]).unwrap(), 0.45);
        let br = best_response(&g, 0, &[0.45, 0.45]).unwrap();
        assert!((br - 0.75).abs() < 1e-12);
        let short = toy(0.45, 0.7);
        assert_eq!(best_response(&short, 0, &[0.45, 0.45]).unwrap(), 0.45);
    }

    #[test]
    fn classifier_examples() {
        let high = classify_equilibrium(&toy(0.7, 0.9)).unwrap();
        assert_eq!(high.tag, CaseTag::AlwaysHigh);
        assert_eq!(high.witness, vec![0.7, 0.7]);

        let unique = classify_equilibrium(&toy(0.45, 0.9)).unwrap();
        assert_eq!(unique.tag, CaseTag::ThresholdUnique);
        assert!((unique.witness[0] - 0.75).abs() < 1e-12);
        assert_eq!(unique.witness[1], 0.45);
        assert_eq!(p_sc(&toy(0.45, 0.9), &unique.witness).unwrap(), 1.0);

        let low = classify_equilibrium(&toy(0.3, 0.45)).unwrap();
        assert_eq!(low.tag, CaseTag::AlwaysLow);
        assert_eq!(low.witness, vec![0.3, 0.3]);

        // neither alone (needs 0.9) but jointly (0.7 each) suffices
        let g = toy(0.45, 0.7);
        let both = classify_equilibrium(&g).unwrap();
        assert_eq!(both.tag, CaseTag::Bistable);
        assert_eq!(both.low_witness, Some(vec![0.45, 0.45]));
        assert_eq!(p_sc(&g, &both.witness).unwrap(), 1.0);
        assert!(both.witness.iter().zip(&both.t_max).all(|(t, m)| t <= m));
    }

    #[test]
    fn best_response_iteration_reproduces_witness() {
        for (t_hat, t_max) in [(0.7, 0.9), (0.45, 0.9), (0.3, 0.45)] {
            let g = toy(t_hat, t_max);
            let case = classify_equilibrium(&g).unwrap();
            let fixed = iterate_best_responses(&g, &case.t_hat, 10).unwrap();
            assert_eq!(fixed, case.witness, "{:?}", case.tag);
        }
    }

    #[test]
    fn threshold_witness_is_fragile() {
        let g = toy(0.45, 0.9);
        let case = classify_equilibrium(&g).unwrap();
        assert_eq!(p_sc(&g, &case.witness).unwrap(), 1.0);
        for eps in [-1e-3, -1e-6, -1e-9] {
            assert!(p_sc_with_offset(&g, &case.witness, eps).unwrap() < 1.0);
        }
    }

    #[test]
    fn shock_shifts_statistic_by_slope() {
        let pmf = DegreePmf::binomial(6, 0.3).unwrap();
        let mut rng = stream(12, 0, 0);
        let degrees = sample_iid_degrees(&pmf, 200_000, &mut rng).unwrap().degrees().to_vec();
        let base = connectivity_statistic(&degrees).unwrap();
        let d_bar = pmf.mean_degree_at_least_two().unwrap();
        let xi = 0.05;
        let up = connectivity_statistic(&apply_degree_shock(&degrees, xi, &mut rng).unwrap()).unwrap();
        let down = connectivity_statistic(&apply_degree_shock(&degrees, -xi, &mut rng).unwrap()).unwrap();
        // the shocked share is a share of the d >= 2 agents only
        let share = 1.0 - pmf.prob(0) - pmf.prob(1);
        assert!(((up - base) / (xi * share) - (2.0 * d_bar - 1.0)).abs() < 0.05);
        assert!(((base - down) / (xi * share) - (2.0 * d_bar - 3.0)).abs() < 0.05);
    }

    #[test]
    fn rejects_invalid_games() {
        assert!(LinearHouseholdGame::with_t_max(1.0, 0.5, vec![0.4], &[0.3], 1.0, 0.1, 1.0, 1.0).is_err());
        assert!(LinearHouseholdGame::with_t_max(1.0, 0.5, vec![0.4], &[0.6], 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(LinearHouseholdGame::with_t_max(1.0, 0.5, vec![0.4], &[0.6], 1.0, 0.1, 0.5, 1.0).is_err());
        let spec = |xi| {
            HouseholdGameSpec::new(
                vec![1.0],
                PreferenceSpec::default(),
                DegreeModelSpec::default(),
                xi,
                None,
            )
        };
        assert!(spec(-0.1).is_err());
        assert!(
            HouseholdGameSpec::new(vec![], PreferenceSpec::default(), DegreeModelSpec::default(), 0.1, None).is_err()
        );
    }

    proptest! {
        #[test]
        fn p_sc_monotone_between_thresholds(a in 0.0f64..1.0, b in 0.0f64..1.0, other in 0.0f64..1.0) {
            let g = toy(0.45, 0.9);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let p_lo = p_sc(&g, &[lo, other]).unwrap();
            let p_hi = p_sc(&g, &[hi, other]).unwrap();
            prop_assert!(p_hi >= p_lo);
            if p_lo > 0.0 && p_hi < 1.0 && hi > lo {
                prop_assert!(p_hi > p_lo);
            }
        }

        #[test]
        fn uncrit_never_exceeds_crit(other in 0.0f64..1.0, xi_bar in 0.001f64..0.2) {
            let g = LinearHouseholdGame { xi_bar, ..toy(0.45, 0.9) };
            if let (Threshold::At(tc), Threshold::At(tu)) = (t_crit(&g, 1, &[other, 0.0]).unwrap(), t_uncrit(&g, 1, &[other, 0.0]).unwrap()) {
                prop_assert!(tu <= tc);
                prop_assert_eq!(p_sc(&g, &[other, tc]).unwrap(), 1.0);
                prop_assert_eq!(p_sc(&g, &[other, tu]).unwrap(), 0.0);
            }
        }
    }
}
