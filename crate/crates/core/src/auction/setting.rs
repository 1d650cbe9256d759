use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest agent count representable by an [`Outcome`] bitmask.
pub const MAX_AGENTS: usize = 64;

/// Set of served agents, as a bitmask over agent indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome(u64);

impl Outcome {
    pub fn from_agents(agents: &[usize]) -> Self {
        Outcome(agents.iter().fold(0u64, |m, &i| m | (1u64 << i)))
    }

    pub fn single(agent: usize) -> Self {
        Outcome(1u64 << agent)
    }

    #[inline]
    pub fn serves(self, agent: usize) -> bool {
        self.0 >> agent & 1 == 1
    }

    pub fn served(self, n: usize) -> Vec<usize> {
        (0..n).filter(|&i| self.serves(i)).collect()
    }

    pub fn bits(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let agents: Vec<String> = (0..MAX_AGENTS)
            .filter(|&i| self.serves(i))
            .map(|i| (i + 1).to_string())
            .collect();
        write!(f, "{{{}}}", agents.join(","))
    }
}

impl Serialize for Outcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let agents: Vec<usize> = (0..MAX_AGENTS).filter(|&i| self.serves(i)).collect();
        agents.serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SettingKind {
    SingleItem,
    KWinners,
    Custom,
}

/// A single-parameter allocation environment: `n` agents and a finite list
/// of feasible outcomes. Ties between outcomes go to the lowest index.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    n: usize,
    kind: SettingKind,
    k: Option<usize>,
    outcomes: Vec<Outcome>,
}

fn check_agent_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_AGENTS {
        return Err(Error::Feasibility(format!("agent count must be in 1..={MAX_AGENTS}, got {n}")));
    }
    Ok(())
}

/// k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut pos = k;
        while pos > 0 && idx[pos - 1] == n - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return out;
        }
        idx[pos - 1] += 1;
        for j in pos..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl Setting {
    /// One item; outcome `i` serves agent `i` alone.
    pub fn single_item(n: usize) -> Result<Self> {
        check_agent_count(n)?;
        Ok(Setting {
            n,
            kind: SettingKind::SingleItem,
            k: None,
            outcomes: (0..n).map(Outcome::single).collect(),
        })
    }

    /// All `k`-subsets (lexicographic), followed by the singletons not
    /// already listed.
    pub fn k_winners(n: usize, k: usize) -> Result<Self> {
        check_agent_count(n)?;
        if k == 0 || k >= n {
            return Err(Error::Feasibility(format!("k-winners needs 1 <= k < n, got k={k}, n={n}")));
        }
        let mut outcomes: Vec<Outcome> = combinations(n, k)
            .iter()
            .map(|c| Outcome::from_agents(c))
            .collect();
        if k > 1 {
            outcomes.extend((0..n).map(Outcome::single));
        }
        Ok(Setting {
            n,
            kind: SettingKind::KWinners,
            k: Some(k),
            outcomes,
        })
    }

    /// Caller-provided outcome list; each outcome lists the served agents.
    pub fn custom(n: usize, outcomes: &[Vec<usize>]) -> Result<Self> {
        check_agent_count(n)?;
        if outcomes.is_empty() {
            return Err(Error::Feasibility("outcome list is empty".into()));
        }
        for (o, agents) in outcomes.iter().enumerate() {
            if let Some(&bad) = agents.iter().find(|&&i| i >= n) {
                return Err(Error::Feasibility(format!(
                    "outcome {o} serves agent index {bad}, but n = {n}"
                )));
            }
        }
        let list: Vec<Outcome> = outcomes.iter().map(|a| Outcome::from_agents(a)).collect();
        for i in 0..n {
            if !list.contains(&Outcome::single(i)) {
                return Err(Error::Feasibility(format!(
                    "no outcome serves agent {} alone",
                    i + 1
                )));
            }
        }
        Ok(Setting {
            n,
            kind: SettingKind::Custom,
            k: None,
            outcomes: list,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> SettingKind {
        self.kind
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_item_outcomes() {
        let s = Setting::single_item(3).unwrap();
        assert_eq!(s.outcomes().len(), 3);
        assert!(s.outcomes()[1].serves(1));
        assert!(!s.outcomes()[1].serves(0));
    }

    #[test]
    fn k_winners_pairs_and_singletons() {
        let s = Setting::k_winners(3, 2).unwrap();
        let listed: Vec<Vec<usize>> = s.outcomes().iter().map(|o| o.served(3)).collect();
        assert_eq!(
            listed,
            vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0], vec![1], vec![2]]
        );
        assert_eq!(Setting::k_winners(4, 1).unwrap().outcomes().len(), 4);
        assert_eq!(Setting::k_winners(5, 2).unwrap().outcomes().len(), 10 + 5);
        assert!(Setting::k_winners(3, 3).is_err());
        assert!(Setting::k_winners(3, 0).is_err());
    }

    #[test]
    fn custom_needs_every_singleton() {
        let err = Setting::custom(3, &[vec![0], vec![0, 1], vec![2]]).unwrap_err();
        assert!(matches!(err, Error::Feasibility(ref m) if m.contains("agent 2")));
        assert!(Setting::custom(2, &[vec![0, 1], vec![0], vec![1]]).is_ok());
        assert!(Setting::custom(2, &[]).is_err());
        assert!(Setting::custom(2, &[vec![0], vec![1], vec![5]]).is_err());
    }

    #[test]
    fn outcome_display_is_one_based() {
        assert_eq!(Outcome::from_agents(&[0, 2]).to_string(), "{1,3}");
    }
}
