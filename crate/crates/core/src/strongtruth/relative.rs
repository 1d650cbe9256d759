use serde::Serialize;

use super::Mechanism;
use crate::error::{Error, Result};
use crate::grid;

/// Relative utility loss guaranteed for reports outside `[v(1-α), v(1+α)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeGapProfile {
    pub v: f64,
    pub alpha: f64,
    pub f: f64,
    /// Report attaining the minimum.
    pub report: f64,
}

/// Minimum of `(u_v(v) - u_v(ṽ)) / u_v(v)` over reports outside the
/// `α`-interval around `v`.
///
/// Both interval endpoints are evaluated, plus a window of width `v` beyond
/// each endpoint (clipped to the domain) at `grid_step`.
pub fn relative_gap_profile(
    mech: &Mechanism,
    v: f64,
    alpha: f64,
    grid_step: f64,
) -> Result<RelativeGapProfile> {
    mech.check_domain(v)?;
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("alpha must be a non-negative fraction, got {alpha}")));
    }
    let truthful = mech.truthful_utility_at(v);
    if !(truthful > 0.0) {
        return Err(Error::domain(format!(
            "relative gap needs positive truthful utility, got {truthful} at v={v}"
        )));
    }
    let upper_end = v * (1.0 + alpha);
    if !mech.contains(upper_end) {
        return Err(Error::domain(format!(
            "v(1+alpha) = {upper_end} is outside the domain of {mech}"
        )));
    }
    if alpha == 0.0 {
        return Ok(RelativeGapProfile {
            v,
            alpha,
            f: 0.0,
            report: v,
        });
    }

    let mut reports = grid::interval_nodes(upper_end, (upper_end + v).min(mech.high()), grid_step)?;
    let lower_end = v * (1.0 - alpha);
    if lower_end >= mech.low() {
        let mut lower = grid::interval_nodes((lower_end - v).max(mech.low()), lower_end, grid_step)?;
        lower.reverse();
        reports.extend(lower);
    }

    let mut best = (f64::INFINITY, v);
    for r in reports {
        let rel = (truthful - mech.utility_at(v, r)) / truthful;
        if rel < best.0 {
            best = (rel, r);
        }
    }
    Ok(RelativeGapProfile {
        v,
        alpha,
        f: best.0.max(0.0),
        report: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    #[test]
    fn log_mechanism_at_e4() {
        let m = Mechanism::log_family(2, E * E, f64::INFINITY).unwrap();
        let v = 4f64.exp();
        let prof = relative_gap_profile(&m, v, 0.5, 0.05).unwrap();
        // oracle: the upper endpoint through the misreport utility
        let truthful = m.misreport_utility(v, v).unwrap();
        let gap = truthful - m.misreport_utility(v, 1.5 * v).unwrap();
        assert_abs_diff_eq!(gap, 0.150, epsilon = 5e-4);
        assert_abs_diff_eq!(prof.f, gap / truthful, epsilon = 1e-12);
        assert_abs_diff_eq!(prof.f, 0.00366, epsilon = 2e-5);
        assert_abs_diff_eq!(prof.report, 1.5 * v, epsilon = 1e-9);
    }

    #[test]
    fn linear_boundary_gap() {
        let m = Mechanism::linear(0.0, 1.0).unwrap();
        let prof = relative_gap_profile(&m, 0.5, 0.2, 0.01).unwrap();
        assert_abs_diff_eq!(prof.f, 0.04, epsilon = 1e-12);
    }

    #[test]
    fn zero_alpha_gives_zero() {
        let m = Mechanism::linear(0.0, 1.0).unwrap();
        assert_eq!(relative_gap_profile(&m, 0.5, 0.0, 0.01).unwrap().f, 0.0);
        let log = Mechanism::log_family(2, E * E, f64::INFINITY).unwrap();
        assert_eq!(relative_gap_profile(&log, 20.0, 0.0, 0.1).unwrap().f, 0.0);
    }

    #[test]
    fn rejects_zero_utility_and_out_of_domain_window() {
        let m = Mechanism::linear(0.0, 1.0).unwrap();
        assert!(matches!(relative_gap_profile(&m, 0.0, 0.2, 0.01), Err(Error::Domain(_))));
        assert!(matches!(relative_gap_profile(&m, 0.9, 0.2, 0.01), Err(Error::Domain(_))));
    }
}
