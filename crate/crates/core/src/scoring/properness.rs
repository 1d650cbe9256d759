//! Strong properness of scoring rules and strong truthfulness of
//! mechanisms over the belief simplex.

use serde::Serialize;

use super::rule::{expected_score, ScoringRule};
use super::AlternativesMechanism;
use crate::error::{Error, Result};
use crate::grid;

/// Modulus at one report point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointModulus {
    pub report: Vec<f64>,
    pub m: f64,
}

/// Pointwise modulus `m(p̃)` on the grid and its infimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropernessModulus {
    pub points: Vec<PointModulus>,
    pub summary: f64,
    /// Belief and report of the pair attaining the infimum.
    pub witness: (Vec<f64>, Vec<f64>),
}

impl PropernessModulus {
    pub fn at(&self, report: &[f64]) -> Option<f64> {
        self.points
            .iter()
            .find(|pm| pm.report.iter().zip(report).all(|(a, b)| (a - b).abs() < 1e-12))
            .map(|pm| pm.m)
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `utility[i][j]` is the utility of true belief `points[i]` reporting `points[j]`.
fn simplex_modulus(points: Vec<Vec<f64>>, utility: &[Vec<f64>]) -> PropernessModulus {
    let mut per_point = Vec::with_capacity(points.len());
    let mut summary = f64::INFINITY;
    let mut witness = (0usize, 0usize);
    for j in 0..points.len() {
        let mut m = f64::INFINITY;
        for i in 0..points.len() {
            if i == j {
                continue;
            }
            let ratio = 2.0 * (utility[i][i] - utility[i][j])
                / squared_distance(&points[i], &points[j]);
            if ratio < m {
                m = ratio;
            }
            if ratio < summary {
                summary = ratio;
                witness = (i, j);
            }
        }
        per_point.push(m.max(0.0));
    }
    PropernessModulus {
        witness: (points[witness.0].clone(), points[witness.1].clone()),
        points: points
            .into_iter()
            .zip(per_point)
            .map(|(report, m)| PointModulus { report, m })
            .collect(),
        summary: summary.max(0.0),
    }
}

/// `m(p̃) = inf_p 2 (u(p,p) - u(p,p̃)) / ||p - p̃||^2`, the norm taken over
/// the free coordinates `p_1..p_n`.
pub fn strong_properness_modulus(rule: &ScoringRule, grid_step: f64) -> Result<PropernessModulus> {
    if !rule.is_bounded() {
        return Err(Error::UnboundedScore(format!("{rule} is unbounded")));
    }
    let points = grid::simplex_points(rule.n(), grid_step)?;
    let scores: Vec<Vec<f64>> = points.iter().map(|p| rule.scores_at(p)).collect();
    if scores.iter().flatten().any(|s| !s.is_finite()) {
        return Err(Error::UnboundedScore(format!("{rule} has non-finite scores on the grid")));
    }
    let utility: Vec<Vec<f64>> = points
        .iter()
        .map(|p| scores.iter().map(|s| expected_score(p, s)).collect())
        .collect();
    Ok(simplex_modulus(points, &utility))
}

/// Same measurement for a mechanism over value vectors in the simplex.
pub fn mechanism_simplex_modulus(
    mech: &dyn AlternativesMechanism,
    grid_step: f64,
) -> Result<PropernessModulus> {
    let points = grid::simplex_points(mech.alternatives(), grid_step)?;
    let utility: Vec<Vec<f64>> = points
        .iter()
        .map(|x| points.iter().map(|r| mech.utility(x, r)).collect())
        .collect();
    Ok(simplex_modulus(points, &utility))
}

/// First grid belief whose best report is not itself, with that report.
pub fn properness_violation(
    rule: &ScoringRule,
    grid_step: f64,
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let points = grid::simplex_points(rule.n(), grid_step)?;
    let scores: Vec<Vec<f64>> = points.iter().map(|p| rule.scores_at(p)).collect();
    for (i, p) in points.iter().enumerate() {
        let truthful = expected_score(p, &scores[i]);
        for (j, s) in scores.iter().enumerate() {
            if j != i && expected_score(p, s) > truthful + 1e-12 {
                return Ok(Some((p.clone(), points[j].clone())));
            }
        }
    }
    Ok(None)
}
