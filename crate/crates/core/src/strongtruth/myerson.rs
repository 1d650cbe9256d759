//! Myerson payments, monotonicity scans and the envelope condition `u' = a`.

use serde::Serialize;

use super::Mechanism;
use crate::error::{Error, Result};
use crate::grid;

/// Monotonicity slack for grid scans.
pub const MONOTONE_TOL: f64 = 1e-12;

/// Central-difference step and tolerance for the envelope check.
pub const ENVELOPE_STEP: f64 = 1e-4;
pub const ENVELOPE_TOL: f64 = 1e-4;

/// Composite trapezoid rule for `∫_low^high f`.
pub(crate) fn trapezoid<F: Fn(f64) -> f64>(f: F, low: f64, high: f64, step: f64) -> Result<f64> {
    if high == low {
        return Ok(0.0);
    }
    let nodes = grid::interval_nodes(low, high, step)?;
    Ok(nodes
        .windows(2)
        .map(|w| 0.5 * (f(w[0]) + f(w[1])) * (w[1] - w[0]))
        .sum())
}

/// Myerson payment `v a(v) - ∫_low^v a(x) dx` (normalised so `p(low) = 0`)
/// by the composite trapezoid rule with the given step.
///
/// Fails if `alloc` decreases anywhere on the integration grid.
pub fn myerson_payment<F: Fn(f64) -> f64>(alloc: F, low: f64, v: f64, step: f64) -> Result<f64> {
    if !(v >= low) {
        return Err(Error::domain(format!("valuation {v} is below the domain start {low}")));
    }
    let nodes = grid::interval_nodes(low, v, step)?;
    let values: Vec<f64> = nodes.iter().map(|&x| alloc(x)).collect();
    let mut integral = 0.0;
    for i in 1..nodes.len() {
        if values[i - 1] > values[i] + MONOTONE_TOL {
            return Err(Error::domain(format!(
                "allocation decreases between {} and {}",
                nodes[i - 1],
                nodes[i]
            )));
        }
        integral += 0.5 * (values[i - 1] + values[i]) * (nodes[i] - nodes[i - 1]);
    }
    Ok(v * values[values.len() - 1] - integral)
}

impl Mechanism {
    /// Myerson payment with `p(L) = 0`, in closed form where the kind has one.
    pub fn myerson_payment(&self, v: f64, step: f64) -> Result<f64> {
        let a = self.allocation(v)?;
        Ok(v * a - self.allocation_integral(v, step)?)
    }

    /// Largest deviation of `p(v)` from `v a(v) - ∫_L^v a - L a(L) + p(L)`
    /// on a grid.
    pub fn myerson_residual(&self, grid_step: f64, integration_step: f64) -> Result<f64> {
        let nodes = grid::interval_nodes(self.low(), self.horizon(), grid_step)?;
        let base = self.base_payment() - self.low() * self.alloc_at(self.low());
        let mut worst = 0.0f64;
        for v in nodes {
            let expected = self.myerson_payment(v, integration_step)? + base;
            worst = worst.max((self.pay_at(v) - expected).abs());
        }
        Ok(worst)
    }
}

/// First consecutive grid pair with `a(v1) > a(v2) + tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneViolation {
    pub v1: f64,
    pub v2: f64,
    pub a1: f64,
    pub a2: f64,
}

/// Scans `[L, horizon]` at `grid_step`; `None` means monotone on the grid.
pub fn check_monotone(mech: &Mechanism, grid_step: f64) -> Result<Option<MonotoneViolation>> {
    let nodes = grid::interval_nodes(mech.low(), mech.horizon(), grid_step)?;
    let mut prev = (nodes[0], mech.alloc_at(nodes[0]));
    for &v in &nodes[1..] {
        let a = mech.alloc_at(v);
        if prev.1 > a + MONOTONE_TOL {
            return Ok(Some(MonotoneViolation {
                v1: prev.0,
                v2: v,
                a1: prev.1,
                a2: a,
            }));
        }
        prev = (v, a);
    }
    Ok(None)
}

/// Result of comparing a central-difference derivative of `u` with `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    pub points: usize,
    pub max_error: f64,
    pub worst_v: f64,
    pub pass: bool,
}

/// Checks `|(u(v+h) - u(v-h)) / 2h - a(v)| <= ENVELOPE_TOL` at `points`
/// evenly spaced interior valuations of `[L, horizon]`.
pub fn envelope_check(mech: &Mechanism, points: usize) -> Result<EnvelopeCheck> {
    if points == 0 {
        return Err(Error::domain("envelope check needs at least one point"));
    }
    let (low, high) = (mech.low() + ENVELOPE_STEP, mech.horizon() - ENVELOPE_STEP);
    if !(high > low) {
        return Err(Error::domain("domain too narrow for the envelope check"));
    }
    let mut max_error = 0.0f64;
    let mut worst_v = low;
    for i in 1..=points {
        let v = low + (high - low) * i as f64 / (points + 1) as f64;
        let fd = (mech.truthful_utility_at(v + ENVELOPE_STEP)
            - mech.truthful_utility_at(v - ENVELOPE_STEP))
            / (2.0 * ENVELOPE_STEP);
        let err = (fd - mech.alloc_at(v)).abs();
        if err > max_error {
            max_error = err;
            worst_v = v;
        }
    }
    Ok(EnvelopeCheck {
        points,
        max_error,
        worst_v,
        pass: max_error <= ENVELOPE_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strongtruth::Table;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    #[test]
    fn payment_for_identity_allocation() {
        let p = myerson_payment(|x| x, 0.0, 0.6, 0.01).unwrap();
        // trapezoid is exact for a linear integrand
        assert_abs_diff_eq!(p, 0.18, epsilon = 1e-12);
    }

    #[test]
    fn payment_for_constant_allocation_is_zero() {
        for v in [0.0, 0.3, 1.0] {
            let p = myerson_payment(|_| 1.0, 0.0, v, 0.01).unwrap();
            assert_abs_diff_eq!(p, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn payment_for_posted_price() {
        let step_alloc = |x: f64| if x >= 0.5 { 1.0 } else { 0.0 };
        for step in [1e-2, 1e-3, 1e-4] {
            let p = myerson_payment(step_alloc, 0.0, 0.7, step).unwrap();
            // one trapezoid panel straddles the jump
            assert!((p - 0.5).abs() <= step, "step {step}: {p}");
        }
    }

    #[test]
    fn payment_rejects_decreasing_allocation() {
        assert!(matches!(
            myerson_payment(|x| 1.0 - x, 0.0, 0.5, 0.01),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn mechanism_payment_uses_closed_forms() {
        let m = Mechanism::linear(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(m.myerson_payment(0.6, 0.1).unwrap(), 0.18, epsilon = 1e-12);
        let log = Mechanism::log_family(2, E * E, 200.0).unwrap();
        assert!(log.myerson_residual(0.5, 1e-3).unwrap() < 1e-9);
        assert!(m.myerson_residual(0.01, 1e-3).unwrap() < 1e-12);
    }

    #[test]
    fn monotone_scans() {
        let m = Mechanism::linear(0.0, 1.0).unwrap();
        assert_eq!(check_monotone(&m, 0.01).unwrap(), None);

        let nodes = crate::grid::interval_nodes(0.0, 1.0, 0.01).unwrap();
        let alloc: Vec<f64> = nodes.iter().map(|v| 1.0 - v).collect();
        let payments = vec![0.0; nodes.len()];
        let dec = Mechanism::tabulated(Table::new(nodes, alloc, payments).unwrap());
        let viol = check_monotone(&dec, 0.01).unwrap().unwrap();
        assert_eq!(viol.v1, 0.0);
        assert_abs_diff_eq!(viol.v2, 0.01, epsilon = 1e-15);

        let log = Mechanism::log_family(2, E * E, f64::INFINITY).unwrap();
        assert_eq!(check_monotone(&log, 0.05).unwrap(), None);
    }

    #[test]
    fn envelope_holds_for_constructed_mechanisms() {
        for m in [
            Mechanism::linear(0.0, 1.0).unwrap(),
            Mechanism::linear(1.0, 3.0).unwrap(),
            Mechanism::log_family(2, E * E, 200.0).unwrap(),
        ] {
            let check = envelope_check(&m, 100).unwrap();
            assert!(check.pass, "{m}: {check:?}");
        }
    }
}
