//! Proper scoring rules and their translation to and from single-agent
//! mechanisms.

mod properness;
mod rule;
mod transform;

pub use properness::{
    mechanism_simplex_modulus, properness_violation, strong_properness_modulus, PointModulus,
    PropernessModulus,
};
pub use rule::{score_utility, RuleDescriptor, RuleKind, ScoringRule};
pub use transform::{
    bounding_constants, mechanism_to_rule, rule_to_mechanism, AlternativesMechanism,
    BoundingConstants, ConvertedMechanism, SingleAlternative,
};
