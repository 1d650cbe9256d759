use serde::{Deserialize, Serialize};

use crate::auction::{AgentType, Setting};
use crate::error::{Error, Result};
use crate::grid::interval_nodes;
use crate::strongtruth::Mechanism;

pub const DEFAULT_GRID_STEP: f64 = 0.005;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// How "dominated by truth" is decided for a deviation `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    /// Truth must be better by more than the tolerance everywhere.
    #[default]
    Strict,
    /// Truth must be no worse than the tolerance everywhere (`b != v_i`).
    Weak,
}

/// Which opponent values the domination checks range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueEnumeration {
    /// Only `v_j ∈ {0, 1}`. The utility difference is affine in each
    /// opponent value, so its minimum over the grid sits at a corner and the
    /// verdicts agree with [`ValueEnumeration::Grid`].
    #[default]
    Corners,
    Grid,
    /// Each opponent's value equals its bid. Not a full domination check;
    /// it isolates opponents who bid truthfully.
    Truthful,
}

/// Everything the analysis routines need about one game instance.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub setting: Setting,
    pub agents: Vec<AgentType>,
    pub delta: f64,
    pub te: Mechanism,
    pub epsilon: f64,
    pub grid_step: f64,
    pub tolerance: f64,
    /// Cap on utility comparisons per operation.
    pub budget: u64,
    pub dominance: Dominance,
    pub values: ValueEnumeration,
}

impl Scenario {
    /// Scenario with default analysis parameters and `ε = 0.05`.
    pub fn new(setting: Setting, agents: Vec<AgentType>, delta: f64, te: Mechanism) -> Result<Self> {
        let s = Scenario {
            setting,
            agents,
            delta,
            te,
            epsilon: 0.05,
            grid_step: DEFAULT_GRID_STEP,
            tolerance: DEFAULT_TOLERANCE,
            budget: DEFAULT_BUDGET,
            dominance: Dominance::Strict,
            values: ValueEnumeration::Corners,
        };
        s.validate()?;
        Ok(s)
    }

    /// Same `γ_ij = gamma` for every ordered pair `i != j`.
    pub fn uniform_agents(values: &[f64], gamma: f64) -> Vec<AgentType> {
        let n = values.len();
        values
            .iter()
            .enumerate()
            .map(|(i, &value)| AgentType {
                value,
                gamma: (0..n).map(|j| if i == j { 0.0 } else { gamma }).collect(),
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.setting.n()
    }

    pub fn values_vec(&self) -> Vec<f64> {
        self.agents.iter().map(|a| a.value).collect()
    }

    /// `max_j |γ_ij|`.
    pub fn agent_gamma(&self, i: usize) -> f64 {
        self.agents[i].gamma.iter().fold(0.0, |m, g| m.max(g.abs()))
    }

    /// `γ = max_ij |γ_ij|`. Spite counts through its magnitude.
    pub fn gamma(&self) -> f64 {
        (0..self.n()).fold(0.0, |m, i| m.max(self.agent_gamma(i)))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.setting.n();
        if self.agents.len() != n {
            return Err(Error::validation(
                "agents",
                format!("expected {n} agents, got {}", self.agents.len()),
            ));
        }
        for (i, a) in self.agents.iter().enumerate() {
            if !(0.0..=1.0).contains(&a.value) {
                return Err(Error::validation(format!("agents[{i}].value"), "must lie in [0, 1]"));
            }
            if a.gamma.len() != n {
                return Err(Error::validation(
                    format!("agents[{i}].gamma"),
                    format!("expected {n} entries, got {}", a.gamma.len()),
                ));
            }
            if let Some(j) = a.gamma.iter().position(|g| !g.is_finite()) {
                return Err(Error::validation(format!("agents[{i}].gamma[{j}]"), "must be finite"));
            }
            if a.gamma[i] != 0.0 {
                return Err(Error::validation(format!("agents[{i}].gamma[{i}]"), "own entry must be 0"));
            }
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::validation("ervcg.delta", "must lie in [0, 1]"));
        }
        if !(self.te.contains(0.0) && self.te.contains(1.0)) {
            return Err(Error::validation("ervcg.te", "TE mechanism must accept every bid in [0, 1]"));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::validation("analysis.epsilon", "must be positive"));
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 1.0) {
            return Err(Error::validation("analysis.grid_step", "must lie in (0, 1]"));
        }
        if !(self.tolerance >= 0.0) || !self.tolerance.is_finite() {
            return Err(Error::validation("analysis.tolerance", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Bid grid on `[0, 1]`.
    pub fn bid_grid(&self) -> Vec<f64> {
        interval_nodes(0.0, 1.0, self.grid_step).expect("validated grid step")
    }

    /// Bid grid for agent `i`, with `v_i` inserted when it is off-grid.
    pub fn own_bids(&self, i: usize) -> Vec<f64> {
        let mut g = self.bid_grid();
        let v = self.agents[i].value;
        if let Err(pos) = g.binary_search_by(|x| x.total_cmp(&v)) {
            g.insert(pos, v);
        }
        g
    }

    pub(crate) fn opponent_values(&self) -> Vec<f64> {
        match self.values {
            ValueEnumeration::Corners => vec![0.0, 1.0],
            ValueEnumeration::Grid => self.bid_grid(),
            ValueEnumeration::Truthful => vec![f64::NAN],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Scenario {
        Scenario::new(
            Setting::single_item(2).unwrap(),
            Scenario::uniform_agents(&[0.9, 0.5], 0.001),
            0.5,
            Mechanism::linear(0.0, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn gamma_uses_magnitude() {
        let mut s = base();
        s.agents[1].gamma[0] = -0.5;
        assert_eq!(s.gamma(), 0.5);
        assert_eq!(s.agent_gamma(0), 0.001);
    }

    #[test]
    fn validation_paths() {
        let mut s = base();
        s.agents[1].gamma = vec![0.0];
        match s.validate() {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "agents[1].gamma"),
            other => panic!("{other:?}"),
        }
        let mut s = base();
        s.agents[0].gamma[0] = 0.1;
        assert!(s.validate().is_err());
        let mut s = base();
        s.agents[0].value = 1.5;
        assert!(s.validate().is_err());
        let mut s = base();
        s.te = Mechanism::linear(0.0, 0.5).unwrap();
        assert!(s.validate().is_err());
    }

    #[test]
    fn off_grid_value_is_added_to_own_bids() {
        let mut s = base();
        s.agents[1].value = 0.5012;
        let g = s.own_bids(1);
        assert_eq!(g.len(), 202);
        assert!(g.contains(&0.5012));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(s.own_bids(0).len(), 201);
    }
}
