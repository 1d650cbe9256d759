//! Single-parameter settings, VCG with Clarke pivots, ER-VCG and
//! externality-modified utilities.

mod ervcg;
mod externality;
mod setting;
mod vcg;

pub use ervcg::{
    clamp_bids, ervcg_expected, ervcg_sample, run_te, Branch, BranchProbabilities, BranchRng,
    ErvcgDraw, ErvcgExpectation, ErvcgSampler, TeOutcome,
};
pub use externality::{ext_modified_utility, AgentType, BaseUtilities};
pub use setting::{Outcome, Setting, SettingKind, MAX_AGENTS};
pub use vcg::{experienced_msw, max_social_welfare, run_vcg, VcgResult, Welfare};
pub(crate) use vcg::{vcg_unchecked, VcgCore};
