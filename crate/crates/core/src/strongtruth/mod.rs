//! Single-agent mechanisms, Myerson payments and strong / relative
//! truthfulness measurements.

mod additive;
mod mechanism;
mod modulus;
mod myerson;
mod relative;

pub use additive::{AdditiveMultiMechanism, JointModulus, VectorNorm};
pub use mechanism::{
    DescriptorKind, Evaluation, Mechanism, MechanismDescriptor, MechanismKind, Table,
};
pub use modulus::{strong_truth_modulus, Modulus};
pub use myerson::{
    check_monotone, envelope_check, myerson_payment, EnvelopeCheck, MonotoneViolation,
    ENVELOPE_STEP, ENVELOPE_TOL, MONOTONE_TOL,
};
pub use relative::{relative_gap_profile, RelativeGapProfile};
