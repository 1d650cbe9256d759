use serde::Serialize;

use super::scenario::Scenario;
use crate::auction::VcgCore;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponse {
    pub agent: usize,
    pub bid: f64,
    /// ER-VCG externality-modified utility at `bid`.
    pub utility: f64,
    pub truthful_utility: f64,
}

/// ER-VCG externality-modified utility of agent `i` at the full bid
/// profile, opponents holding their scenario values.
pub fn ext_utility_at(scenario: &Scenario, i: usize, bids: &[f64]) -> f64 {
    let s = scenario;
    let n = s.n();
    let core = VcgCore::compute(&s.setting, bids);
    let row = &s.agents[i].gamma;
    let (mut vcg, mut te) = (0.0, 0.0);
    for j in 0..n {
        let weight = if j == i { 1.0 } else { row[j] };
        let v = s.agents[j].value;
        vcg += weight * core.utility(j, v);
        te += weight * s.te.utility_at(v, bids[j]);
    }
    (1.0 - s.delta) * vcg + s.delta / n as f64 * te
}

/// Grid search over agent `i`'s bids against fixed opponent bids (listed in
/// agent order, `i` skipped). Utilities within the tolerance of the best
/// count as ties, resolved toward `v_i` and then toward the lower bid.
pub fn best_response(scenario: &Scenario, i: usize, opponent_bids: &[f64]) -> Result<BestResponse> {
    scenario.validate()?;
    let n = scenario.n();
    if i >= n {
        return Err(Error::domain(format!("agent index {i} out of range")));
    }
    if opponent_bids.len() != n - 1 {
        return Err(Error::domain(format!(
            "expected {} opponent bids, got {}",
            n - 1,
            opponent_bids.len()
        )));
    }
    if let Some(b) = opponent_bids.iter().find(|b| !(0.0..=1.0).contains(*b)) {
        return Err(Error::domain(format!("analysis bids must lie in [0, 1], got {b}")));
    }
    let mut bids = Vec::with_capacity(n);
    bids.extend_from_slice(&opponent_bids[..i]);
    bids.push(0.0);
    bids.extend_from_slice(&opponent_bids[i..]);

    let v = scenario.agents[i].value;
    let scored: Vec<(f64, f64)> = scenario
        .own_bids(i)
        .into_iter()
        .map(|b| {
            bids[i] = b;
            (b, ext_utility_at(scenario, i, &bids))
        })
        .collect();
    let best = scored.iter().fold(f64::NEG_INFINITY, |m, &(_, u)| m.max(u));
    let (bid, utility) = scored
        .iter()
        .filter(|(_, u)| *u >= best - scenario.tolerance)
        .min_by(|a, b| (a.0 - v).abs().total_cmp(&(b.0 - v).abs()).then(a.0.total_cmp(&b.0)))
        .copied()
        .expect("bid grid is never empty");
    bids[i] = v;
    Ok(BestResponse {
        agent: i,
        bid,
        utility,
        truthful_utility: ext_utility_at(scenario, i, &bids),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::{AgentType, Setting};
    use crate::strongtruth::Mechanism;
    use approx::assert_abs_diff_eq;

    fn spite(delta: f64, gamma21: f64) -> Scenario {
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
    fn spiteful_loser_raises_price() {
        let s = spite(0.0, -0.5);
        let r = best_response(&s, 1, &[0.9]).unwrap();
        assert_abs_diff_eq!(r.bid, 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(r.utility, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ext_utility_at(&s, 1, &[0.9, 0.89]), -0.005, epsilon = 1e-12);
        assert_abs_diff_eq!(ext_utility_at(&s, 1, &[0.9, 0.91]), -0.4, epsilon = 1e-12);
    }

    #[test]
    fn standard_agent_bids_truthfully() {
        let r = best_response(&spite(0.0, 0.0), 1, &[0.9]).unwrap();
        assert_eq!(r.bid, 0.5);
        let r = best_response(&spite(0.4, 0.0), 1, &[0.3]).unwrap();
        assert_eq!(r.bid, 0.5);
    }

    #[test]
    fn full_audit_restores_truth() {
        for g in [-0.5, 0.5, 0.0] {
            let r = best_response(&spite(1.0, g), 1, &[0.9]).unwrap();
            assert_eq!(r.bid, 0.5);
        }
    }

    #[test]
    fn rejects_out_of_range_bids() {
        assert!(best_response(&spite(0.5, 0.0), 1, &[1.2]).is_err());
        assert!(best_response(&spite(0.5, 0.0), 1, &[0.2, 0.3]).is_err());
    }
}
