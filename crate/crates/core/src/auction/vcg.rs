//! VCG with Clarke pivot payments over a finite outcome list.

use serde::Serialize;

use super::{Outcome, Setting};
use crate::error::{Error, Result};

/// Welfare-maximizing outcome under some bids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Welfare {
    pub value: f64,
    pub outcome: Outcome,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VcgResult {
    pub outcome: Outcome,
    pub outcome_index: usize,
    pub payments: Vec<f64>,
    pub utilities: Vec<f64>,
    /// `Σ_j v_j x_j(a*)` under the true values.
    pub social_welfare: f64,
}

impl VcgResult {
    pub fn revenue(&self) -> f64 {
        self.payments.iter().sum()
    }
}

pub(crate) fn check_profile(setting: &Setting, xs: &[f64], what: &str) -> Result<()> {
    if xs.len() != setting.n() {
        return Err(Error::domain(format!(
            "{what} vector has {} entries for {} agents",
            xs.len(),
            setting.n()
        )));
    }
    if let Some((i, x)) = xs.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < 0.0) {
        return Err(Error::domain(format!("{what} of agent {} is {x}; must be finite and >= 0", i + 1)));
    }
    Ok(())
}

#[inline]
fn outcome_welfare(outcome: Outcome, bids: &[f64]) -> f64 {
    let mut w = 0.0;
    for (j, b) in bids.iter().enumerate() {
        if outcome.serves(j) {
            w += b;
        }
    }
    w
}

#[inline]
fn others_welfare(outcome: Outcome, bids: &[f64], skip: usize) -> f64 {
    let mut w = 0.0;
    for (j, b) in bids.iter().enumerate() {
        if j != skip && outcome.serves(j) {
            w += b;
        }
    }
    w
}

pub(crate) fn argmax_welfare(setting: &Setting, bids: &[f64]) -> Welfare {
    let mut best = Welfare {
        value: f64::NEG_INFINITY,
        outcome: setting.outcomes()[0],
        index: 0,
    };
    for (idx, &o) in setting.outcomes().iter().enumerate() {
        let w = outcome_welfare(o, bids);
        if w > best.value {
            best = Welfare {
                value: w,
                outcome: o,
                index: idx,
            };
        }
    }
    best
}

/// `MSW(b_{-i})`: best welfare of the others, agent `i`'s bid ignored.
fn welfare_without(setting: &Setting, bids: &[f64], i: usize) -> f64 {
    setting
        .outcomes()
        .iter()
        .map(|&o| others_welfare(o, bids, i))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `MSW(b) = max_a Σ_j b_j x_j(a)`, ties to the lowest outcome index.
pub fn max_social_welfare(setting: &Setting, bids: &[f64]) -> Result<Welfare> {
    check_profile(setting, bids, "bid")?;
    Ok(argmax_welfare(setting, bids))
}

/// `MSW_{v_i}(b) = v_i x_i(a*) + Σ_{j≠i} b_j x_j(a*)` with `a*` chosen by the bids.
pub fn experienced_msw(setting: &Setting, i: usize, value: f64, bids: &[f64]) -> Result<f64> {
    check_profile(setting, bids, "bid")?;
    if i >= setting.n() {
        return Err(Error::domain(format!("agent index {i} out of range")));
    }
    let a = argmax_welfare(setting, bids).outcome;
    let own = if a.serves(i) { value } else { 0.0 };
    Ok(own + others_welfare(a, bids, i))
}

/// VCG outcome and Clarke payments under `bids`; utilities under `values`.
pub fn run_vcg(setting: &Setting, bids: &[f64], values: &[f64]) -> Result<VcgResult> {
    check_profile(setting, bids, "bid")?;
    check_profile(setting, values, "value")?;
    Ok(vcg_unchecked(setting, bids, values))
}

pub(crate) fn vcg_unchecked(setting: &Setting, bids: &[f64], values: &[f64]) -> VcgResult {
    let n = setting.n();
    let best = argmax_welfare(setting, bids);
    let mut payments = Vec::with_capacity(n);
    let mut utilities = Vec::with_capacity(n);
    let mut social_welfare = 0.0;
    for i in 0..n {
        let pay = welfare_without(setting, bids, i) - others_welfare(best.outcome, bids, i);
        let served = best.outcome.serves(i);
        if served {
            social_welfare += values[i];
        }
        payments.push(pay);
        utilities.push(if served { values[i] } else { 0.0 } - pay);
    }
    VcgResult {
        outcome: best.outcome,
        outcome_index: best.index,
        payments,
        utilities,
        social_welfare,
    }
}

/// Outcome and payments only; utilities follow as `v_i x_i - p_i` for any values.
#[derive(Debug, Clone)]
pub(crate) struct VcgCore {
    pub outcome: Outcome,
    pub payments: Vec<f64>,
}

impl VcgCore {
    pub fn compute(setting: &Setting, bids: &[f64]) -> Self {
        let best = argmax_welfare(setting, bids);
        let payments = (0..setting.n())
            .map(|i| welfare_without(setting, bids, i) - others_welfare(best.outcome, bids, i))
            .collect();
        VcgCore {
            outcome: best.outcome,
            payments,
        }
    }

    #[inline]
    pub fn utility(&self, i: usize, value: f64) -> f64 {
        (if self.outcome.serves(i) { value } else { 0.0 }) - self.payments[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn msw_single_item_ties_to_lowest_index() {
        let s = Setting::single_item(3).unwrap();
        let w = max_social_welfare(&s, &[0.2, 0.9, 0.9]).unwrap();
        assert_eq!(w.value, 0.9);
        assert_eq!(w.outcome, Outcome::single(1));
        let w = max_social_welfare(&s, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!((w.value, w.outcome), (0.0, Outcome::single(0)));
    }

    #[test]
    fn msw_two_winners() {
        let s = Setting::k_winners(3, 2).unwrap();
        let w = max_social_welfare(&s, &[0.9, 0.5, 0.3]).unwrap();
        assert_abs_diff_eq!(w.value, 1.4, epsilon = 1e-15);
        assert_eq!(w.outcome, Outcome::from_agents(&[0, 1]));
    }

    #[test]
    fn experienced_welfare() {
        let s = Setting::single_item(2).unwrap();
        assert_abs_diff_eq!(experienced_msw(&s, 0, 0.8, &[0.5, 0.9]).unwrap(), 0.9);
        assert_abs_diff_eq!(experienced_msw(&s, 0, 0.8, &[1.0, 0.9]).unwrap(), 0.8);
        let bids = [0.3, 0.7];
        assert_eq!(
            experienced_msw(&s, 1, 0.7, &bids).unwrap(),
            max_social_welfare(&s, &bids).unwrap().value
        );
    }

    #[test]
    fn second_price() {
        let s = Setting::single_item(2).unwrap();
        let r = run_vcg(&s, &[0.9, 0.5], &[0.9, 0.5]).unwrap();
        assert_eq!(r.outcome, Outcome::single(0));
        assert_abs_diff_eq!(r.payments[0], 0.5);
        assert_eq!(r.payments[1], 0.0);
        assert_abs_diff_eq!(r.utilities[0], 0.4, epsilon = 1e-15);
        assert_eq!(r.utilities[1], 0.0);
    }

    #[test]
    fn tie_goes_to_first_agent() {
        let s = Setting::single_item(2).unwrap();
        let r = run_vcg(&s, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_eq!(r.outcome, Outcome::single(0));
        assert_eq!(r.payments[0], 0.5);
        assert_eq!(r.utilities, vec![0.0, 0.0]);
    }

    #[test]
    fn two_winner_clarke_pivots() {
        let s = Setting::k_winners(3, 2).unwrap();
        let r = run_vcg(&s, &[0.9, 0.5, 0.3], &[0.9, 0.5, 0.3]).unwrap();
        assert_eq!(r.outcome, Outcome::from_agents(&[0, 1]));
        for (p, e) in r.payments.iter().zip([0.3, 0.3, 0.0]) {
            assert_abs_diff_eq!(*p, e, epsilon = 1e-12);
        }
        for (u, e) in r.utilities.iter().zip([0.6, 0.2, 0.0]) {
            assert_abs_diff_eq!(*u, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_malformed_profiles() {
        let s = Setting::single_item(2).unwrap();
        assert!(run_vcg(&s, &[0.1], &[0.1, 0.2]).is_err());
        assert!(run_vcg(&s, &[0.1, -0.2], &[0.1, 0.2]).is_err());
        assert!(max_social_welfare(&s, &[f64::NAN, 0.2]).is_err());
    }
}
