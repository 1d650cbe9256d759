//! Exhaustive checks of the ER-VCG guarantees on bid and value grids.

mod bounds;
mod domination;
mod predicate;
mod response;
mod scenario;

pub use bounds::{eta_bound, gamma_threshold};
pub use domination::{
    domination_verdicts, is_dominated_by_truth, undominated_candidates, CandidateSet,
    DominationVerdict, Witness,
};
pub use predicate::{verify_predicate, AgentSummary, CorollaryCheck, PredicateReport};
pub use response::{best_response, ext_utility_at, BestResponse};
pub use scenario::{
    Dominance, Scenario, ValueEnumeration, DEFAULT_BUDGET, DEFAULT_GRID_STEP, DEFAULT_TOLERANCE,
};
