use serde::{Deserialize, Serialize};

use super::{ErvcgDraw, ErvcgExpectation, VcgResult};
use crate::error::{Error, Result};

/// An agent's value for service and the weights it places on the others'
/// base utilities (negative for spite, positive for altruism).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentType {
    pub value: f64,
    /// Length `n`, zero at the agent's own index.
    pub gamma: Vec<f64>,
}

impl AgentType {
    pub fn standard(value: f64, n: usize) -> Self {
        AgentType {
            value,
            gamma: vec![0.0; n],
        }
    }

    pub fn is_standard(&self) -> bool {
        self.gamma.iter().all(|&g| g == 0.0)
    }
}

/// Anything that assigns a base utility to every agent.
pub trait BaseUtilities {
    fn base_utilities(&self) -> &[f64];
}

impl BaseUtilities for VcgResult {
    fn base_utilities(&self) -> &[f64] {
        &self.utilities
    }
}

impl BaseUtilities for ErvcgExpectation {
    fn base_utilities(&self) -> &[f64] {
        &self.expected_utility
    }
}

impl BaseUtilities for ErvcgDraw {
    fn base_utilities(&self) -> &[f64] {
        &self.utilities
    }
}

/// `û_i = u_i + Σ_{j≠i} γ_ij u_j`.
///
/// For an ER-VCG expectation this equals the branch-by-branch mixture since
/// the expression is linear in the base utilities.
pub fn ext_modified_utility(
    outcome: &impl BaseUtilities,
    types: &[AgentType],
    i: usize,
) -> Result<f64> {
    let u = outcome.base_utilities();
    if types.len() != u.len() || i >= u.len() {
        return Err(Error::domain("agent types do not match the mechanism outcome"));
    }
    let row = &types[i].gamma;
    if row.len() != u.len() {
        return Err(Error::domain(format!("gamma row of agent {} has wrong length", i + 1)));
    }
    Ok(u[i] + (0..u.len()).filter(|&j| j != i).map(|j| row[j] * u[j]).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::{ervcg_expected, run_vcg, Setting};
    use crate::strongtruth::Mechanism;
    use approx::assert_abs_diff_eq;

    fn types(gamma12: f64, gamma21: f64) -> Vec<AgentType> {
        vec![
            AgentType { value: 0.9, gamma: vec![0.0, gamma12] },
            AgentType { value: 0.5, gamma: vec![gamma21, 0.0] },
        ]
    }

    #[test]
    fn spiteful_loser() {
        let s = Setting::single_item(2).unwrap();
        let r = run_vcg(&s, &[0.9, 0.5], &[0.9, 0.5]).unwrap();
        assert_abs_diff_eq!(ext_modified_utility(&r, &types(0.0, -0.05), 1).unwrap(), -0.02, epsilon = 1e-12);
    }

    #[test]
    fn altruistic_winner() {
        let s = Setting::single_item(2).unwrap();
        let r = run_vcg(&s, &[0.9, 0.5], &[0.9, 0.5]).unwrap();
        assert_abs_diff_eq!(ext_modified_utility(&r, &types(0.1, 0.0), 0).unwrap(), 0.4, epsilon = 1e-12);
    }

    #[test]
    fn standard_agents_see_base_utility() {
        let s = Setting::single_item(2).unwrap();
        let r = run_vcg(&s, &[0.9, 0.5], &[0.9, 0.5]).unwrap();
        let t = types(0.0, 0.0);
        for i in 0..2 {
            assert_eq!(ext_modified_utility(&r, &t, i).unwrap(), r.utilities[i]);
        }
    }

    #[test]
    fn ervcg_matches_branch_decomposition() {
        let s = Setting::single_item(2).unwrap();
        let te = Mechanism::linear(0.0, 1.0).unwrap();
        let (bids, values, delta) = ([0.7, 0.6], [0.9, 0.5], 0.3);
        let t = types(0.2, -0.4);
        let e = ervcg_expected(&s, &bids, &values, delta, &te).unwrap();
        for i in 0..2 {
            let j = 1 - i;
            let vcg_part = e.vcg.utilities[i] + t[i].gamma[j] * e.vcg.utilities[j];
            let te_part = e.te[i].base_utility + t[i].gamma[j] * e.te[j].base_utility;
            let expected = (1.0 - delta) * vcg_part + delta / 2.0 * te_part;
            assert_abs_diff_eq!(ext_modified_utility(&e, &t, i).unwrap(), expected, epsilon = 1e-14);
        }
    }
}
