use serde::Serialize;

use super::Mechanism;
use crate::error::{Error, Result};
use crate::grid;

/// Strong-truthfulness modulus measured on a grid, with the pair attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Modulus {
    pub m: f64,
    /// True value of the witness pair.
    pub value: f64,
    /// Report of the witness pair.
    pub report: f64,
}

/// `inf 2 (u_v(v) - u_v(ṽ)) / (ṽ - v)^2` over all grid pairs `v != ṽ`,
/// clamped below at zero.
///
/// Every pair is considered, not just neighbours. Ties keep the first pair
/// in lexicographic `(v, ṽ)` grid order.
pub fn strong_truth_modulus(mech: &Mechanism, grid_step: f64) -> Result<Modulus> {
    if !mech.is_bounded() {
        return Err(Error::UnboundedDomain);
    }
    let nodes = grid::interval_nodes(mech.low(), mech.high(), grid_step)?;
    if nodes.len() < 2 {
        return Err(Error::domain("modulus needs at least two grid points"));
    }
    let alloc: Vec<f64> = nodes.iter().map(|&v| mech.alloc_at(v)).collect();
    let pay: Vec<f64> = nodes.iter().map(|&v| mech.pay_at(v)).collect();
    let truthful: Vec<f64> = nodes.iter().map(|&v| mech.truthful_utility_at(v)).collect();

    let mut best = Modulus {
        m: f64::INFINITY,
        value: nodes[0],
        report: nodes[1],
    };
    for (i, &v) in nodes.iter().enumerate() {
        for (j, &r) in nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            let gap = truthful[i] - (v * alloc[j] - pay[j]);
            let d = r - v;
            let ratio = 2.0 * gap / (d * d);
            if ratio < best.m {
                best = Modulus {
                    m: ratio,
                    value: v,
                    report: r,
                };
            }
        }
    }
    best.m = best.m.max(0.0);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strongtruth::Table;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_modulus_is_inverse_width() {
        let m = strong_truth_modulus(&Mechanism::linear(0.0, 1.0).unwrap(), 0.01).unwrap();
        assert_abs_diff_eq!(m.m, 1.0, epsilon = 1e-9);
        let m = strong_truth_modulus(&Mechanism::linear(0.0, 2.0).unwrap(), 0.02).unwrap();
        assert_abs_diff_eq!(m.m, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn constant_mechanism_has_zero_modulus() {
        let t = Table::new(vec![0.0, 0.5, 1.0], vec![0.5; 3], vec![0.25; 3]).unwrap();
        let m = strong_truth_modulus(&Mechanism::tabulated(t), 0.1).unwrap();
        assert_eq!(m.m, 0.0);
        // every pair ties at zero, so the witness is the first pair
        assert_eq!((m.value, m.report), (0.0, 0.1));
    }

    #[test]
    fn unbounded_domain_is_rejected() {
        let log = Mechanism::log_family(2, std::f64::consts::E.powi(2), f64::INFINITY).unwrap();
        assert_eq!(strong_truth_modulus(&log, 0.1), Err(Error::UnboundedDomain));
    }
}
