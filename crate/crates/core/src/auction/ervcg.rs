//! Externality-resistant VCG: with probability `1 - δ` run VCG, otherwise
//! pick one agent uniformly and run the truth-extraction (TE) mechanism on
//! that agent alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::vcg::{check_profile, vcg_unchecked, VcgResult};
use super::Setting;
use crate::error::{Error, Result};
use crate::strongtruth::Mechanism;

/// The seeded generator used for every sampled branch.
pub type BranchRng = ChaCha8Rng;

/// Allocation, payment and base utility of one agent under TE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeOutcome {
    pub allocation: f64,
    pub payment: f64,
    pub base_utility: f64,
}

/// Runs the TE mechanism on one agent: `u = value a(bid) - p(bid)`.
pub fn run_te(te_mech: &Mechanism, bid: f64, value: f64) -> Result<TeOutcome> {
    let allocation = te_mech.allocation(bid)?;
    let payment = te_mech.payment(bid)?;
    Ok(TeOutcome {
        allocation,
        payment,
        base_utility: te_mech.misreport_utility(value, bid)?,
    })
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::domain(format!("delta must lie in [0, 1], got {delta}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchProbabilities {
    pub vcg: f64,
    /// Probability of each single TE branch.
    pub te_each: f64,
}

impl BranchProbabilities {
    pub fn total(&self, n: usize) -> f64 {
        self.vcg + n as f64 * self.te_each
    }
}

/// Exact expectation over the `1 + n` branches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErvcgExpectation {
    pub delta: f64,
    pub probabilities: BranchProbabilities,
    pub vcg: VcgResult,
    /// TE outcome of agent `i` when it is singled out.
    pub te: Vec<TeOutcome>,
    pub expected_allocation: Vec<f64>,
    pub expected_payment: Vec<f64>,
    pub expected_utility: Vec<f64>,
}

impl ErvcgExpectation {
    pub fn expected_revenue(&self) -> f64 {
        self.expected_payment.iter().sum()
    }
}

pub fn ervcg_expected(
    setting: &Setting,
    bids: &[f64],
    values: &[f64],
    delta: f64,
    te_mech: &Mechanism,
) -> Result<ErvcgExpectation> {
    check_delta(delta)?;
    check_profile(setting, bids, "bid")?;
    check_profile(setting, values, "value")?;
    let n = setting.n();
    let vcg = vcg_unchecked(setting, bids, values);
    let te = bids
        .iter()
        .zip(values)
        .map(|(&b, &v)| run_te(te_mech, b, v))
        .collect::<Result<Vec<_>>>()?;
    let probabilities = BranchProbabilities {
        vcg: 1.0 - delta,
        te_each: delta / n as f64,
    };
    let (pv, pt) = (probabilities.vcg, probabilities.te_each);
    let expected_allocation = (0..n)
        .map(|i| pv * f64::from(u8::from(vcg.outcome.serves(i))) + pt * te[i].allocation)
        .collect();
    let expected_payment = (0..n)
        .map(|i| pv * vcg.payments[i] + pt * te[i].payment)
        .collect();
    let expected_utility = (0..n)
        .map(|i| pv * vcg.utilities[i] + pt * te[i].base_utility)
        .collect();
    Ok(ErvcgExpectation {
        delta,
        probabilities,
        vcg,
        te,
        expected_allocation,
        expected_payment,
        expected_utility,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum Branch {
    Vcg,
    Te { agent: usize },
}

/// One realized branch and the per-agent outcome it produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErvcgDraw {
    pub branch: Branch,
    pub allocation: Vec<f64>,
    pub payments: Vec<f64>,
    pub utilities: Vec<f64>,
}

/// Clamps bids into `[0, 1]`, logging a warning for each one moved.
pub fn clamp_bids(bids: &[f64]) -> Vec<f64> {
    bids.iter()
        .enumerate()
        .map(|(i, &b)| {
            let c = if b.is_nan() { 0.0 } else { b.clamp(0.0, 1.0) };
            if c != b {
                log::warn!("bid {b} of agent {} clamped to {c}", i + 1);
            }
            c
        })
        .collect()
}

/// Draws ER-VCG branches from a seeded [`BranchRng`].
#[derive(Debug, Clone)]
pub struct ErvcgSampler {
    rng: BranchRng,
    n: usize,
    delta: f64,
    vcg: VcgResult,
    te: Vec<TeOutcome>,
}

impl ErvcgSampler {
    /// Bids outside `[0, 1]` are clamped with a warning.
    pub fn new(
        setting: &Setting,
        bids: &[f64],
        values: &[f64],
        delta: f64,
        te_mech: &Mechanism,
        seed: u64,
    ) -> Result<Self> {
        check_delta(delta)?;
        if bids.len() != setting.n() {
            return Err(Error::domain("bid vector length does not match the agent count"));
        }
        let bids = clamp_bids(bids);
        check_profile(setting, values, "value")?;
        let vcg = vcg_unchecked(setting, &bids, values);
        let te = bids
            .iter()
            .zip(values)
            .map(|(&b, &v)| run_te(te_mech, b, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(ErvcgSampler {
            rng: BranchRng::seed_from_u64(seed),
            n: setting.n(),
            delta,
            vcg,
            te,
        })
    }

    pub fn draw_branch(&mut self) -> Branch {
        let u: f64 = self.rng.gen();
        if u < 1.0 - self.delta {
            Branch::Vcg
        } else {
            let t = (u - (1.0 - self.delta)) / self.delta;
            Branch::Te {
                agent: ((t * self.n as f64) as usize).min(self.n - 1),
            }
        }
    }

    pub fn draw(&mut self) -> ErvcgDraw {
        let branch = self.draw_branch();
        let n = self.n;
        match branch {
            Branch::Vcg => ErvcgDraw {
                branch,
                allocation: (0..n)
                    .map(|i| f64::from(u8::from(self.vcg.outcome.serves(i))))
                    .collect(),
                payments: self.vcg.payments.clone(),
                utilities: self.vcg.utilities.clone(),
            },
            Branch::Te { agent } => {
                let mut draw = ErvcgDraw {
                    branch,
                    allocation: vec![0.0; n],
                    payments: vec![0.0; n],
                    utilities: vec![0.0; n],
                };
                let te = self.te[agent];
                draw.allocation[agent] = te.allocation;
                draw.payments[agent] = te.payment;
                draw.utilities[agent] = te.base_utility;
                draw
            }
        }
    }
}

/// A single draw from the generator seeded with `seed`.
pub fn ervcg_sample(
    setting: &Setting,
    bids: &[f64],
    values: &[f64],
    delta: f64,
    te_mech: &Mechanism,
    seed: u64,
) -> Result<ErvcgDraw> {
    Ok(ErvcgSampler::new(setting, bids, values, delta, te_mech, seed)?.draw())
}
