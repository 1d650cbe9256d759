//! Scoring rules over `n + 1` events, event 0 being the complement.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::AlternativesMechanism;
use crate::error::{Error, Result};

/// Slack for simplex membership checks.
const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Quadratic,
    Spherical,
    Logarithmic,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::Quadratic => "quadratic",
            RuleKind::Spherical => "spherical",
            RuleKind::Logarithmic => "logarithmic",
        })
    }
}

/// Serializable `{kind, n}` record for the standard rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDescriptor {
    pub kind: RuleKind,
    pub n: usize,
}

#[derive(Clone)]
enum RuleSource {
    Standard(RuleKind),
    /// `s_i = a_i - P`, `s_0 = -P`.
    Mechanism(Arc<dyn AlternativesMechanism>),
}

/// A scoring rule `s_0..s_n` over beliefs given by their free coordinates
/// `p_1..p_n`; `p_0 = 1 - Σ p_i`.
#[derive(Clone)]
pub struct ScoringRule {
    n: usize,
    bounded: bool,
    source: RuleSource,
}

impl fmt::Debug for ScoringRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScoringRule")
            .field("rule", &self.to_string())
            .field("n", &self.n)
            .field("bounded", &self.bounded)
            .finish()
    }
}

impl fmt::Display for ScoringRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            RuleSource::Standard(kind) => write!(f, "{kind}(n={})", self.n),
            RuleSource::Mechanism(m) => write!(f, "S({m:?})"),
        }
    }
}

impl ScoringRule {
    /// One of the named rules. The logarithmic rule is flagged unbounded.
    pub fn standard(kind: RuleKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("a scoring rule needs at least one non-null event"));
        }
        Ok(ScoringRule {
            n,
            bounded: kind != RuleKind::Logarithmic,
            source: RuleSource::Standard(kind),
        })
    }

    pub fn from_descriptor(d: RuleDescriptor) -> Result<Self> {
        Self::standard(d.kind, d.n)
    }

    /// The rule `S(M)`: `s_i = a_i - P`, `s_0 = -P`.
    pub(crate) fn from_mechanism(mech: Arc<dyn AlternativesMechanism>) -> Self {
        ScoringRule {
            n: mech.alternatives(),
            bounded: true,
            source: RuleSource::Mechanism(mech),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn standard_kind(&self) -> Option<RuleKind> {
        match self.source {
            RuleSource::Standard(kind) => Some(kind),
            RuleSource::Mechanism(_) => None,
        }
    }

    pub fn descriptor(&self) -> Option<RuleDescriptor> {
        self.standard_kind().map(|kind| RuleDescriptor { kind, n: self.n })
    }

    pub fn validate_belief(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.n {
            return Err(Error::domain(format!(
                "belief has {} coordinates, rule expects {}",
                p.len(),
                self.n
            )));
        }
        if p.iter().any(|x| !x.is_finite() || *x < -SIMPLEX_TOL) {
            return Err(Error::domain(format!("belief {p:?} has a negative or non-finite entry")));
        }
        if p.iter().sum::<f64>() > 1.0 + SIMPLEX_TOL {
            return Err(Error::domain(format!("belief {p:?} sums above 1")));
        }
        Ok(())
    }

    /// Scores `[s_0(p), s_1(p), .., s_n(p)]`.
    pub fn scores(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.validate_belief(p)?;
        Ok(self.scores_at(p))
    }

    pub(crate) fn scores_at(&self, p: &[f64]) -> Vec<f64> {
        match &self.source {
            RuleSource::Standard(kind) => {
                let full = full_vector(p);
                match kind {
                    RuleKind::Quadratic => {
                        let sq: f64 = full.iter().map(|x| x * x).sum();
                        full.iter().map(|q| 1.0 + 2.0 * q - sq).collect()
                    }
                    RuleKind::Spherical => {
                        let norm = full.iter().map(|x| x * x).sum::<f64>().sqrt();
                        full.iter().map(|q| q / norm).collect()
                    }
                    RuleKind::Logarithmic => full.iter().map(|q| q.ln()).collect(),
                }
            }
            RuleSource::Mechanism(m) => {
                let pay = m.payment(p);
                std::iter::once(-pay)
                    .chain(m.allocation(p).into_iter().map(|a| a - pay))
                    .collect()
            }
        }
    }
}

/// `(p_0, p_1, .., p_n)` from the free coordinates.
pub(crate) fn full_vector(p: &[f64]) -> Vec<f64> {
    let p0 = 1.0 - p.iter().sum::<f64>();
    std::iter::once(p0.max(0.0)).chain(p.iter().copied()).collect()
}

/// Expected score `Σ_i p_i s_i(p̃)` for true belief `p` and report `p̃`.
pub fn score_utility(rule: &ScoringRule, belief: &[f64], report: &[f64]) -> Result<f64> {
    rule.validate_belief(belief)?;
    rule.validate_belief(report)?;
    Ok(expected_score(belief, &rule.scores_at(report)))
}

pub(crate) fn expected_score(belief: &[f64], scores: &[f64]) -> f64 {
    let p0 = (1.0 - belief.iter().sum::<f64>()).max(0.0);
    let mut acc = p0 * scores[0];
    for (p, s) in belief.iter().zip(&scores[1..]) {
        acc += p * s;
    }
    acc
}
