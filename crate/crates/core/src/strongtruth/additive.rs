use serde::Serialize;

use super::Mechanism;
use crate::error::{Error, Result};
use crate::grid;

/// Norm used to measure the distance between item vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VectorNorm {
    L1,
    L2,
}

/// One agent, `n` items, additive valuations; a linear mechanism per item.
#[derive(Debug, Clone)]
pub struct AdditiveMultiMechanism {
    items: Vec<Mechanism>,
}

/// Joint modulus over item vectors, with the witness pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointModulus {
    pub m: f64,
    pub value: Vec<f64>,
    pub report: Vec<f64>,
}

impl AdditiveMultiMechanism {
    pub fn new(low: f64, high: f64, n_items: usize) -> Result<Self> {
        if n_items == 0 {
            return Err(Error::domain("additive mechanism needs at least one item"));
        }
        let item = Mechanism::linear(low, high)?;
        Ok(AdditiveMultiMechanism {
            items: vec![item; n_items],
        })
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self) -> &[Mechanism] {
        &self.items
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.items.len() {
            return Err(Error::domain(format!(
                "expected {} item values, got {}",
                self.items.len(),
                x.len()
            )));
        }
        Ok(())
    }

    /// Sum of per-item misreport utilities.
    pub fn misreport_utility(&self, values: &[f64], reports: &[f64]) -> Result<f64> {
        self.check_len(values)?;
        self.check_len(reports)?;
        self.items
            .iter()
            .zip(values.iter().zip(reports))
            .map(|(m, (&v, &r))| m.misreport_utility(v, r))
            .sum()
    }

    /// `u(v, v) - u(v, ṽ)`.
    pub fn utility_gap(&self, values: &[f64], reports: &[f64]) -> Result<f64> {
        Ok(self.misreport_utility(values, values)? - self.misreport_utility(values, reports)?)
    }

    /// Infimum of `2 gap / ||ṽ - v||^2` over all pairs of distinct grid vectors.
    ///
    /// With the L1 norm this is `1 / (n (H - L))`; with L2 it stays `1 / (H - L)`.
    pub fn joint_modulus(&self, grid_step: f64, norm: VectorNorm) -> Result<JointModulus> {
        let item = &self.items[0];
        let nodes = grid::interval_nodes(item.low(), item.high(), grid_step)?;
        let g = nodes.len();
        let n = self.items.len();
        let total = g.checked_pow(n as u32).ok_or_else(|| Error::domain("item grid too large"))?;
        if total.saturating_mul(total) > 50_000_000 {
            return Err(Error::domain(format!(
                "joint grid of {total} vectors is too large for a pairwise scan"
            )));
        }
        // per-node utility table: util[i][j] = u_{v_i}(v_j) for a single item
        let util: Vec<Vec<f64>> = nodes
            .iter()
            .map(|&v| nodes.iter().map(|&r| item.utility_at(v, r)).collect())
            .collect();
        let truth: Vec<f64> = nodes.iter().map(|&v| item.truthful_utility_at(v)).collect();
        let decode = |mut idx: usize| {
            let mut out = vec![0usize; n];
            for slot in out.iter_mut().rev() {
                *slot = idx % g;
                idx /= g;
            }
            out
        };
        let mut best = (f64::INFINITY, 0usize, 1usize);
        for a in 0..total {
            let va = decode(a);
            for b in 0..total {
                if a == b {
                    continue;
                }
                let vb = decode(b);
                let mut gap = 0.0;
                let mut l1 = 0.0;
                let mut l2 = 0.0;
                for k in 0..n {
                    gap += truth[va[k]] - util[va[k]][vb[k]];
                    let d = (nodes[vb[k]] - nodes[va[k]]).abs();
                    l1 += d;
                    l2 += d * d;
                }
                let dist2 = match norm {
                    VectorNorm::L1 => l1 * l1,
                    VectorNorm::L2 => l2,
                };
                let ratio = 2.0 * gap / dist2;
                if ratio < best.0 {
                    best = (ratio, a, b);
                }
            }
        }
        let to_vec = |idx: usize| decode(idx).into_iter().map(|i| nodes[i]).collect();
        Ok(JointModulus {
            m: best.0.max(0.0),
            value: to_vec(best.1),
            report: to_vec(best.2),
        })
    }
}
