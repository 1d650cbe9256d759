use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{Dominance, Scenario, ValueEnumeration};
use crate::auction::VcgCore;
use crate::error::{Error, Result};

/// Opponent profile on which truth fails to beat the deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Full bid profile, agent `i` holding the deviation.
    pub bids: Vec<f64>,
    /// Full value profile, agent `i` holding its true value.
    pub values: Vec<f64>,
    pub truthful_utility: f64,
    pub deviation_utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationVerdict {
    pub agent: usize,
    pub bid: f64,
    pub dominated_by_truth: bool,
    /// Lexicographically smallest counterexample, ordered by opponent bids
    /// and then opponent values.
    pub witness: Option<Witness>,
}

/// Grid bids of one agent that truthful bidding does not dominate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSet {
    pub agent: usize,
    pub value: f64,
    pub bids: Vec<f64>,
    pub checked: usize,
}

impl CandidateSet {
    pub fn min(&self) -> f64 {
        self.bids.first().copied().unwrap_or(self.value)
    }

    pub fn max(&self) -> f64 {
        self.bids.last().copied().unwrap_or(self.value)
    }

    /// `max |b - v_i|` over the set.
    pub fn max_deviation(&self) -> f64 {
        self.bids.iter().fold(0.0, |m, b| m.max((b - self.value).abs()))
    }
}

fn pow(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// Comparisons one domination check performs for agent `i`.
pub(crate) fn check_size(scenario: &Scenario) -> u128 {
    let n = scenario.n();
    let g = scenario.bid_grid().len();
    let q = scenario.opponent_values().len();
    pow(g, n - 1).saturating_mul(pow(q, n - 1))
}

pub(crate) fn check_budget(required: u128, cap: u64) -> Result<()> {
    if required > cap as u128 {
        return Err(Error::Budget { required, cap });
    }
    Ok(())
}

/// Opponent enumeration for a fixed agent, with the truthful side's VCG
/// outcomes cached per opponent bid profile.
pub(crate) struct Engine<'a> {
    s: &'a Scenario,
    i: usize,
    opponents: Vec<usize>,
    grid: Vec<f64>,
    values: Vec<f64>,
    profiles: usize,
    value_profiles: usize,
    truth: Vec<VcgCore>,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(s: &'a Scenario, i: usize) -> Result<Self> {
        s.validate()?;
        let n = s.n();
        if i >= n {
            return Err(Error::domain(format!("agent index {i} out of range")));
        }
        let grid = s.bid_grid();
        let values = s.opponent_values();
        let profiles = usize::try_from(pow(grid.len(), n - 1))
            .map_err(|_| Error::Budget { required: u128::MAX, cap: s.budget })?;
        let value_profiles = usize::try_from(pow(values.len(), n - 1))
            .map_err(|_| Error::Budget { required: u128::MAX, cap: s.budget })?;
        let mut engine = Engine {
            s,
            i,
            opponents: (0..n).filter(|&j| j != i).collect(),
            grid,
            values,
            profiles,
            value_profiles,
            truth: Vec::new(),
        };
        let v_i = s.agents[i].value;
        let truth = (0..profiles)
            .into_par_iter()
            .map_init(
                || vec![0.0; n],
                |bids, p| {
                    engine.fill_bids(p, v_i, bids);
                    VcgCore::compute(&s.setting, bids)
                },
            )
            .collect();
        engine.truth = truth;
        Ok(engine)
    }

    fn fill_bids(&self, mut p: usize, own: f64, bids: &mut [f64]) {
        bids[self.i] = own;
        for &j in self.opponents.iter().rev() {
            bids[j] = self.grid[p % self.grid.len()];
            p /= self.grid.len();
        }
    }

    fn fill_values(&self, mut q: usize, bids: &[f64], values: &mut [f64]) {
        values[self.i] = self.s.agents[self.i].value;
        if self.s.values == ValueEnumeration::Truthful {
            for &j in &self.opponents {
                values[j] = bids[j];
            }
            return;
        }
        for &j in self.opponents.iter().rev() {
            values[j] = self.values[q % self.values.len()];
            q /= self.values.len();
        }
    }

    /// ER-VCG externality-modified utility of agent `i`. `te_others` is
    /// `Σ_j γ_ij u^TE_{v_j}(b_j)`, identical on both sides of a comparison.
    fn ext_utility(&self, core: &VcgCore, own_bid: f64, values: &[f64], te_others: f64) -> f64 {
        let s = self.s;
        let i = self.i;
        let row = &s.agents[i].gamma;
        let mut vcg = core.utility(i, values[i]);
        for &j in &self.opponents {
            vcg += row[j] * core.utility(j, values[j]);
        }
        let te = s.te.utility_at(values[i], own_bid) + te_others;
        (1.0 - s.delta) * vcg + s.delta / s.n() as f64 * te
    }

    fn te_others(&self, bids: &[f64], values: &[f64]) -> f64 {
        let row = &self.s.agents[self.i].gamma;
        self.opponents
            .iter()
            .map(|&j| row[j] * self.s.te.utility_at(values[j], bids[j]))
            .sum()
    }

    /// First failing value profile for opponent bid profile `p`, if any.
    fn scan_profile(&self, bid: f64, p: usize, bids: &mut [f64], values: &mut [f64]) -> Option<Witness> {
        let s = self.s;
        let v_i = s.agents[self.i].value;
        self.fill_bids(p, bid, bids);
        let dev = VcgCore::compute(&s.setting, bids);
        for q in 0..self.value_profiles {
            self.fill_values(q, bids, values);
            let te_others = self.te_others(bids, values);
            let truthful = self.ext_utility(&self.truth[p], v_i, values, te_others);
            let deviation = self.ext_utility(&dev, bid, values, te_others);
            let diff = truthful - deviation;
            let fails = match s.dominance {
                Dominance::Strict => !(diff > s.tolerance),
                Dominance::Weak => diff < -s.tolerance,
            };
            if fails {
                return Some(Witness {
                    bids: bids.to_vec(),
                    values: values.to_vec(),
                    truthful_utility: truthful,
                    deviation_utility: deviation,
                });
            }
        }
        None
    }

    fn self_witness(&self) -> Witness {
        let n = self.s.n();
        let (mut bids, mut values) = (vec![0.0; n], vec![0.0; n]);
        let v_i = self.s.agents[self.i].value;
        self.fill_bids(0, v_i, &mut bids);
        self.fill_values(0, &bids, &mut values);
        let te_others = self.te_others(&bids, &values);
        let u = self.ext_utility(&self.truth[0], v_i, &values, te_others);
        Witness {
            bids,
            values,
            truthful_utility: u,
            deviation_utility: u,
        }
    }

    fn verdict(&self, witness: Option<Witness>, bid: f64) -> DominationVerdict {
        DominationVerdict {
            agent: self.i,
            bid,
            dominated_by_truth: witness.is_none(),
            witness,
        }
    }

    /// Sequential scan; used when many bids are checked in parallel.
    pub(crate) fn check_sequential(&self, bid: f64) -> DominationVerdict {
        if self.s.dominance == Dominance::Weak && bid == self.s.agents[self.i].value {
            return self.verdict(Some(self.self_witness()), bid);
        }
        let n = self.s.n();
        let (mut bids, mut values) = (vec![0.0; n], vec![0.0; n]);
        let witness = (0..self.profiles).find_map(|p| self.scan_profile(bid, p, &mut bids, &mut values));
        self.verdict(witness, bid)
    }

    /// Parallel over opponent bid profiles; the first witness in order wins.
    pub(crate) fn check_parallel(&self, bid: f64) -> DominationVerdict {
        if self.s.dominance == Dominance::Weak && bid == self.s.agents[self.i].value {
            return self.verdict(Some(self.self_witness()), bid);
        }
        let n = self.s.n();
        let witness = (0..self.profiles).into_par_iter().find_map_first(|p| {
            let (mut bids, mut values) = (vec![0.0; n], vec![0.0; n]);
            self.scan_profile(bid, p, &mut bids, &mut values)
        });
        self.verdict(witness, bid)
    }
}

fn check_bid(bid: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&bid) {
        return Err(Error::domain(format!("analysis bids must lie in [0, 1], got {bid}")));
    }
    Ok(())
}

/// Whether bidding `v_i` beats bidding `bid` against every enumerated
/// opponent bid and value profile.
pub fn is_dominated_by_truth(scenario: &Scenario, i: usize, bid: f64) -> Result<DominationVerdict> {
    scenario.validate()?;
    check_bid(bid)?;
    check_budget(check_size(scenario), scenario.budget)?;
    Ok(Engine::new(scenario, i)?.check_parallel(bid))
}

/// Verdicts for every bid in agent `i`'s grid, in increasing bid order.
pub fn domination_verdicts(scenario: &Scenario, i: usize) -> Result<Vec<DominationVerdict>> {
    scenario.validate()?;
    if i >= scenario.n() {
        return Err(Error::domain(format!("agent index {i} out of range")));
    }
    let bids = scenario.own_bids(i);
    check_budget(check_size(scenario).saturating_mul(bids.len() as u128), scenario.budget)?;
    let engine = Engine::new(scenario, i)?;
    Ok(bids.par_iter().map(|&b| engine.check_sequential(b)).collect())
}

/// Grid bids not dominated by truthful bidding; a superset of the
/// undominated bids.
pub fn undominated_candidates(scenario: &Scenario, i: usize) -> Result<CandidateSet> {
    let verdicts = domination_verdicts(scenario, i)?;
    Ok(CandidateSet {
        agent: i,
        value: scenario.agents[i].value,
        checked: verdicts.len(),
        bids: verdicts
            .into_iter()
            .filter(|v| !v.dominated_by_truth)
            .map(|v| v.bid)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::{AgentType, Setting};
    use crate::strongtruth::Mechanism;

    fn scenario(delta: f64, gamma21: f64) -> Scenario {
        let agents = vec![
            AgentType { value: 0.9, gamma: vec![0.0, 0.0] },
            AgentType { value: 0.5, gamma: vec![gamma21, 0.0] },
        ];
        let mut s = Scenario::new(
            Setting::single_item(2).unwrap(),
            agents,
            delta,
            Mechanism::linear(0.0, 1.0).unwrap(),
        )
        .unwrap();
        s.grid_step = 0.01;
        s
    }

    #[test]
    fn far_deviation_is_dominated() {
        let v = is_dominated_by_truth(&scenario(0.5, 0.001), 1, 0.6).unwrap();
        assert!(v.dominated_by_truth);
        assert!(v.witness.is_none());
    }

    #[test]
    fn truth_does_not_dominate_itself() {
        let s = scenario(0.5, 0.001);
        let v = is_dominated_by_truth(&s, 1, 0.5).unwrap();
        assert!(!v.dominated_by_truth);
        let mut w = s.clone();
        w.dominance = Dominance::Weak;
        assert!(!is_dominated_by_truth(&w, 1, 0.5).unwrap().dominated_by_truth);
    }

    #[test]
    fn pure_vcg_ties_leave_nearby_bids_undominated() {
        let v = is_dominated_by_truth(&scenario(0.0, 0.0), 1, 0.49).unwrap();
        assert!(!v.dominated_by_truth);
        let w = v.witness.unwrap();
        assert_eq!(w.truthful_utility, w.deviation_utility);
        // opponent bids 0, lexicographically first
        assert_eq!(w.bids, vec![0.0, 0.49]);
    }

    #[test]
    fn weak_dominance_admits_ties() {
        let mut s = scenario(0.0, 0.0);
        s.dominance = Dominance::Weak;
        assert!(is_dominated_by_truth(&s, 1, 0.49).unwrap().dominated_by_truth);
    }

    #[test]
    fn standard_agents_keep_only_truth() {
        let c = undominated_candidates(&scenario(0.3, 0.0), 1).unwrap();
        assert_eq!(c.bids, vec![0.5]);
        assert_eq!(c.checked, 101);
    }

    #[test]
    fn pure_vcg_candidates_are_many() {
        let c = undominated_candidates(&scenario(0.0, 0.0), 1).unwrap();
        assert!(c.bids.len() > 1);
    }

    #[test]
    fn corners_match_full_value_grid() {
        let mut s = scenario(0.5, -0.05);
        s.grid_step = 0.05;
        let corners = undominated_candidates(&s, 1).unwrap();
        s.values = ValueEnumeration::Grid;
        let full = undominated_candidates(&s, 1).unwrap();
        assert_eq!(corners.bids, full.bids);
    }

    #[test]
    fn overbidding_opponent_breaks_the_bound() {
        // Agent 2 overbids to spare an overbidding opponent its loss.
        let mut s = scenario(0.5, 0.0014);
        let v = is_dominated_by_truth(&s, 1, 0.55).unwrap();
        assert!(!v.dominated_by_truth);
        let w = v.witness.unwrap();
        assert_eq!(w.bids, vec![0.5, 0.55]);
        assert_eq!(w.values, vec![0.0, 0.5]);
        s.values = ValueEnumeration::Truthful;
        assert!(is_dominated_by_truth(&s, 1, 0.55).unwrap().dominated_by_truth);
    }

    #[test]
    fn budget_is_enforced() {
        let mut s = scenario(0.5, 0.001);
        s.budget = 10;
        match undominated_candidates(&s, 1) {
            Err(Error::Budget { required, cap }) => {
                assert_eq!(cap, 10);
                assert_eq!(required, 101 * 101 * 2);
            }
            other => panic!("{other:?}"),
        }
    }
}
