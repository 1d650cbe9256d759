use serde::Serialize;

use super::bounds::{eta_bound, gamma_threshold};
use super::domination::{check_budget, check_size, undominated_candidates, CandidateSet};
use super::scenario::Scenario;
use crate::auction::{vcg_unchecked, VcgCore};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentSummary {
    pub agent: usize,
    pub value: f64,
    /// `max_j |γ_ij|`.
    pub gamma: f64,
    /// Bound computed from this agent's own row.
    pub eta_bound: Option<f64>,
    pub candidates: CandidateSet,
    pub eta_observed: f64,
    /// Every bid farther than `η bound + grid_step` from the value was
    /// dominated. `None` when no bound exists (`δ = 0`).
    pub bound_respected: Option<bool>,
    pub truthful_vcg_utility: f64,
    /// `(1-δ) u^VCG_{v_i}(v) - ε`.
    pub benchmark: f64,
    pub worst_utility: f64,
    pub worst_profile: Vec<f64>,
    pub margin: f64,
}

/// A corollary compares the VCG-branch outcome under candidate bids with
/// its truthful counterpart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryCheck {
    /// `MSW(v)` for welfare, truthful VCG revenue for revenue.
    pub reference: f64,
    /// `n η` for welfare, `2 n η` for revenue (observed `η`).
    pub allowed_loss: f64,
    pub worst: f64,
    pub worst_profile: Vec<f64>,
    /// `reference - worst`.
    pub gap: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredicateReport {
    pub n: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub tolerance: f64,
    /// `max_ij |γ_ij|`.
    pub gamma: f64,
    pub gamma_threshold: Option<f64>,
    pub hypothesis_holds: bool,
    pub eta_bound: Option<f64>,
    /// `max_i max_{b ∈ candidates_i} |b - v_i|`.
    pub eta_observed: f64,
    pub agents: Vec<AgentSummary>,
    /// Smallest per-agent margin.
    pub margin: f64,
    pub pass: bool,
    pub violating_profile: Option<Vec<f64>>,
    pub welfare: CorollaryCheck,
    pub revenue: CorollaryCheck,
    pub profiles_checked: u128,
    pub evaluations: u128,
}

/// Whether `γ` is below the threshold, taking the limits at the endpoints:
/// the threshold is 0 at `δ = 0` and unbounded at `δ = 1`.
fn hypothesis(scenario: &Scenario) -> (Option<f64>, bool) {
    let n = scenario.n();
    let gamma = scenario.gamma();
    match gamma_threshold(n, scenario.delta, scenario.epsilon) {
        Ok(t) => (Some(t), gamma < t),
        Err(_) => (None, scenario.delta == 1.0),
    }
}

struct Tracker {
    worst: f64,
    profile: Vec<f64>,
}

impl Tracker {
    fn new() -> Self {
        Tracker { worst: f64::INFINITY, profile: Vec::new() }
    }

    fn offer(&mut self, x: f64, bids: &[f64]) {
        if x < self.worst {
            self.worst = x;
            self.profile = bids.to_vec();
        }
    }
}

/// Checks the ER-VCG base-utility guarantee on every product of per-agent
/// candidate bids, plus the welfare and revenue corollaries on the
/// VCG-branch outcome.
pub fn verify_predicate(scenario: &Scenario) -> Result<PredicateReport> {
    scenario.validate()?;
    let n = scenario.n();
    let s = scenario;
    let gamma = s.gamma();
    let (gamma_threshold, hypothesis_holds) = hypothesis(s);
    if !hypothesis_holds {
        log::warn!(
            "gamma {gamma} is not below the threshold {:?}; the guarantee is not promised",
            gamma_threshold
        );
    }
    let global_eta = eta_bound(n, s.delta, gamma).ok();

    let per_agent = check_size(s);
    let mut evaluations: u128 = 0;
    for i in 0..n {
        evaluations = evaluations.saturating_add(per_agent.saturating_mul(s.own_bids(i).len() as u128));
    }
    check_budget(evaluations, s.budget)?;

    let candidates = (0..n)
        .map(|i| undominated_candidates(s, i))
        .collect::<Result<Vec<_>>>()?;
    let profiles_checked = candidates
        .iter()
        .fold(1u128, |acc, c| acc.saturating_mul(c.bids.len() as u128));
    evaluations = evaluations.saturating_add(profiles_checked);
    check_budget(evaluations, s.budget)?;

    let values = s.values_vec();
    let truthful = vcg_unchecked(&s.setting, &values, &values);
    let benchmarks: Vec<f64> = truthful
        .utilities
        .iter()
        .map(|u| (1.0 - s.delta) * u - s.epsilon)
        .collect();
    let eta_observed = candidates.iter().fold(0.0, |m: f64, c| m.max(c.max_deviation()));

    let mut trackers: Vec<Tracker> = (0..n).map(|_| Tracker::new()).collect();
    let mut welfare = Tracker::new();
    let mut revenue = Tracker::new();
    let mut violating_profile = None;
    let w = s.delta / n as f64;
    let mut digits = vec![0usize; n];
    let mut bids: Vec<f64> = candidates.iter().map(|c| c.bids[0]).collect();
    'profiles: loop {
        let core = VcgCore::compute(&s.setting, &bids);
        let mut violated = false;
        for l in 0..n {
            let u = (1.0 - s.delta) * core.utility(l, values[l]) + w * s.te.utility_at(values[l], bids[l]);
            trackers[l].offer(u, &bids);
            violated |= u - benchmarks[l] < -s.tolerance;
        }
        if violated && violating_profile.is_none() {
            violating_profile = Some(bids.clone());
        }
        let sw: f64 = (0..n).filter(|&l| core.outcome.serves(l)).map(|l| values[l]).sum();
        welfare.offer(sw, &bids);
        revenue.offer(core.payments.iter().sum(), &bids);

        // odometer, last agent fastest
        for l in (0..n).rev() {
            digits[l] += 1;
            if digits[l] < candidates[l].bids.len() {
                bids[l] = candidates[l].bids[digits[l]];
                continue 'profiles;
            }
            digits[l] = 0;
            bids[l] = candidates[l].bids[0];
        }
        break;
    }

    let nf = n as f64;
    let corollary = |reference: f64, allowed_loss: f64, t: Tracker| CorollaryCheck {
        reference,
        allowed_loss,
        worst: t.worst,
        gap: reference - t.worst,
        holds: t.worst >= reference - allowed_loss - s.tolerance,
        worst_profile: t.profile,
    };
    let welfare = corollary(truthful.social_welfare, nf * eta_observed, welfare);
    let revenue = corollary(truthful.revenue(), 2.0 * nf * eta_observed, revenue);

    let agents: Vec<AgentSummary> = candidates
        .into_iter()
        .zip(trackers)
        .enumerate()
        .map(|(i, (c, t))| {
            let eta_i = eta_bound(n, s.delta, s.agent_gamma(i)).ok();
            let bound_respected = global_eta.map(|e| c.max_deviation() <= e + s.grid_step);
            AgentSummary {
                agent: i,
                value: values[i],
                gamma: s.agent_gamma(i),
                eta_bound: eta_i,
                eta_observed: c.max_deviation(),
                candidates: c,
                bound_respected,
                truthful_vcg_utility: truthful.utilities[i],
                benchmark: benchmarks[i],
                margin: t.worst - benchmarks[i],
                worst_utility: t.worst,
                worst_profile: t.profile,
            }
        })
        .collect();
    let margin = agents.iter().fold(f64::INFINITY, |m, a| m.min(a.margin));
    Ok(PredicateReport {
        n,
        delta: s.delta,
        epsilon: s.epsilon,
        tolerance: s.tolerance,
        gamma,
        gamma_threshold,
        hypothesis_holds,
        eta_bound: global_eta,
        eta_observed,
        pass: margin >= -s.tolerance,
        margin,
        agents,
        violating_profile,
        welfare,
        revenue,
        profiles_checked,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::Setting;
    use crate::error::Error;
    use crate::strongtruth::Mechanism;

    fn two(gamma: f64, step: f64) -> Scenario {
        let mut s = Scenario::new(
            Setting::single_item(2).unwrap(),
            Scenario::uniform_agents(&[0.9, 0.5], gamma),
            0.5,
            Mechanism::linear(0.0, 1.0).unwrap(),
        )
        .unwrap();
        s.grid_step = step;
        s
    }

    #[test]
    fn standard_agents_pass_with_singleton_sets() {
        let r = verify_predicate(&two(0.0, 0.01)).unwrap();
        assert!(r.pass && r.hypothesis_holds);
        assert!(r.margin >= 0.0);
        for a in &r.agents {
            assert_eq!(a.candidates.bids, vec![a.value]);
        }
        assert_eq!(r.profiles_checked, 1);
        assert_eq!(r.eta_observed, 0.0);
        assert!(r.welfare.holds && r.revenue.holds);
    }

    #[test]
    fn benchmark_for_the_winner() {
        let r = verify_predicate(&two(0.0014, 0.01)).unwrap();
        assert!((r.agents[0].benchmark - 0.15).abs() < 1e-12);
        assert!(r.agents[0].worst_utility >= 0.15);
        assert!(r.pass);
    }

    #[test]
    fn large_spite_flags_hypothesis() {
        let mut s = two(0.0, 0.05);
        s.agents[1].gamma[0] = -0.5;
        let r = verify_predicate(&s).unwrap();
        assert!(!r.hypothesis_holds);
        assert!(r.agents[1].candidates.bids.len() > 1);
    }

    #[test]
    fn oversized_product_hits_budget() {
        let mut s = Scenario::new(
            Setting::single_item(4).unwrap(),
            Scenario::uniform_agents(&[0.9, 0.5, 0.2, 0.1], 0.0),
            0.5,
            Mechanism::linear(0.0, 1.0).unwrap(),
        )
        .unwrap();
        s.grid_step = 0.0001;
        assert!(matches!(verify_predicate(&s), Err(Error::Budget { .. })));
    }
}
