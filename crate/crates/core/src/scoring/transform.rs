//! Bidirectional translation between single-agent mechanisms over `n`
//! alternatives and scoring rules over `n + 1` events.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::rule::{full_vector, ScoringRule};
use crate::error::{Error, Result};
use crate::grid;
use crate::strongtruth::{Mechanism, Table};

/// A single-agent mechanism whose input is a value vector `x` with
/// `x_i >= 0`, `Σ x_i <= 1`.
pub trait AlternativesMechanism: Send + Sync + fmt::Debug {
    fn alternatives(&self) -> usize;

    /// `a_1(x)..a_n(x)`.
    fn allocation(&self, x: &[f64]) -> Vec<f64>;

    fn payment(&self, x: &[f64]) -> f64;

    /// `Σ x_i a_i(report) - P(report)`.
    fn utility(&self, x: &[f64], report: &[f64]) -> f64 {
        let alloc = self.allocation(report);
        x.iter().zip(&alloc).map(|(v, a)| v * a).sum::<f64>() - self.payment(report)
    }
}

/// A scalar mechanism used as a one-alternative mechanism on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct SingleAlternative(Mechanism);

impl SingleAlternative {
    pub fn new(mech: Mechanism) -> Result<Self> {
        if !(mech.contains(0.0) && mech.contains(1.0)) {
            return Err(Error::domain(format!(
                "{mech} does not cover the belief interval [0, 1]"
            )));
        }
        Ok(SingleAlternative(mech))
    }

    pub fn mechanism(&self) -> &Mechanism {
        &self.0
    }
}

impl AlternativesMechanism for SingleAlternative {
    fn alternatives(&self) -> usize {
        1
    }

    fn allocation(&self, x: &[f64]) -> Vec<f64> {
        vec![self.0.alloc_at(x[0])]
    }

    fn payment(&self, x: &[f64]) -> f64 {
        self.0.pay_at(x[0])
    }
}

/// Shift and scale turning score differences into allocation probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundingConstants {
    /// `max_p max_i |s_i(p) - s_0(p)|`.
    pub c0: f64,
    /// `max_p Σ_i (s_i(p) - s_0(p) + C0)`.
    pub c: f64,
}

/// Contraction ratio of successive grid-refinement increments above which
/// a grid maximum is treated as divergent.
const DIVERGENCE_RATIO: f64 = 0.75;
const DIVERGENCE_FLOOR: f64 = 1e-9;

fn c0_on(rule: &ScoringRule, points: &[Vec<f64>]) -> Result<f64> {
    let mut c0 = 0.0f64;
    for p in points {
        let s = rule.scores_at(p);
        for si in &s[1..] {
            let d = (si - s[0]).abs();
            if !d.is_finite() {
                return Err(Error::UnboundedScore(format!(
                    "score difference is not finite at belief {p:?}"
                )));
            }
            c0 = c0.max(d);
        }
    }
    Ok(c0)
}

/// Recomputes `C0` on interior grids (every coordinate, `p_0` included, at
/// least one step from the boundary) at `step`, `step/2`, `step/4`, and
/// flags divergence when the increments stop contracting.
pub(crate) fn detect_divergence(rule: &ScoringRule, step: f64) -> Result<()> {
    let mut maxima = [0.0; 3];
    for (slot, h) in maxima.iter_mut().zip([step, step / 2.0, step / 4.0]) {
        let interior: Vec<Vec<f64>> = grid::simplex_points(rule.n(), h)?
            .into_iter()
            .filter(|p| full_vector(p).iter().all(|&q| q >= h - 1e-12))
            .collect();
        if interior.is_empty() {
            return Ok(());
        }
        *slot = c0_on(rule, &interior)?;
    }
    let (d1, d2) = (maxima[1] - maxima[0], maxima[2] - maxima[1]);
    if d1 > DIVERGENCE_FLOOR && d2 > DIVERGENCE_RATIO * d1 {
        return Err(Error::UnboundedScore(format!(
            "C0 keeps growing under refinement: {:.6} -> {:.6} -> {:.6}",
            maxima[0], maxima[1], maxima[2]
        )));
    }
    Ok(())
}

/// `(C0, C)` as grid maxima over the belief simplex, boundary included.
pub fn bounding_constants(rule: &ScoringRule, grid_step: f64) -> Result<BoundingConstants> {
    if !rule.is_bounded() {
        return Err(Error::UnboundedScore(format!(
            "{rule}: C0 is unbounded near the simplex boundary"
        )));
    }
    let points = grid::simplex_points(rule.n(), grid_step)?;
    let c0 = c0_on(rule, &points)?;
    detect_divergence(rule, grid_step)?;
    let mut c = 0.0f64;
    for p in &points {
        let s = rule.scores_at(p);
        let row: f64 = s[1..].iter().map(|si| si - s[0] + c0).sum();
        c = c.max(row);
    }
    Ok(BoundingConstants { c0, c })
}

/// `M(S)`: `a_i(x) = (s_i(x) - s_0(x) + C0) / C` and
/// `P(x) = -(s_0(x) + C0) / C`, shifted so that `P(0) = 0`.
#[derive(Debug, Clone)]
pub struct ConvertedMechanism {
    rule: ScoringRule,
    constants: BoundingConstants,
    payment_shift: f64,
}

impl ConvertedMechanism {
    pub fn rule(&self) -> &ScoringRule {
        &self.rule
    }

    pub fn constants(&self) -> BoundingConstants {
        self.constants
    }

    fn raw_payment(&self, x: &[f64]) -> f64 {
        let s0 = self.rule.scores_at(x)[0];
        -(s0 + self.constants.c0) / self.constants.c
    }

    /// `-(s_0(x) + (1 - Σ x_i) C0) / C`, the payment with a report-dependent
    /// `C0` term. Kept for comparison; it shifts the best response.
    pub fn report_weighted_payment(&self, x: &[f64]) -> f64 {
        let s0 = self.rule.scores_at(x)[0];
        let rest = 1.0 - x.iter().sum::<f64>();
        -(s0 + rest * self.constants.c0) / self.constants.c
    }

    /// The scalar mechanism on `[0, 1]` for single-event rules.
    pub fn to_scalar(self: &Arc<Self>) -> Result<Mechanism> {
        Mechanism::from_converted(Arc::clone(self))
    }

    /// Tabulates `(v, a_i, P)` on a grid; only defined for one alternative.
    pub fn tabulate(&self, grid_step: f64) -> Result<Table> {
        if self.alternatives() != 1 {
            return Err(Error::domain("only single-event conversions tabulate as (v, a, p)"));
        }
        let nodes = grid::interval_nodes(0.0, 1.0, grid_step)?;
        let alloc = nodes.iter().map(|&x| self.allocation(&[x])[0]).collect();
        let pay = nodes.iter().map(|&x| self.payment(&[x])).collect();
        Table::new(nodes, alloc, pay)
    }
}

impl AlternativesMechanism for ConvertedMechanism {
    fn alternatives(&self) -> usize {
        self.rule.n()
    }

    fn allocation(&self, x: &[f64]) -> Vec<f64> {
        let s = self.rule.scores_at(x);
        let BoundingConstants { c0, c } = self.constants;
        s[1..].iter().map(|si| (si - s[0] + c0) / c).collect()
    }

    fn payment(&self, x: &[f64]) -> f64 {
        self.raw_payment(x) - self.payment_shift
    }
}

/// Turns a bounded, non-trivial scoring rule into a mechanism.
pub fn rule_to_mechanism(rule: &ScoringRule, grid_step: f64) -> Result<ConvertedMechanism> {
    let constants = bounding_constants(rule, grid_step)?;
    if !(constants.c > 0.0) {
        return Err(Error::TrivialRule);
    }
    let mut conv = ConvertedMechanism {
        rule: rule.clone(),
        constants,
        payment_shift: 0.0,
    };
    conv.payment_shift = conv.raw_payment(&vec![0.0; rule.n()]);
    Ok(conv)
}

/// `S(M)`: `s_i(p) = a_i(p) - P(p)` and `s_0(p) = -P(p)`.
pub fn mechanism_to_rule(mech: Arc<dyn AlternativesMechanism>) -> ScoringRule {
    ScoringRule::from_mechanism(mech)
}
