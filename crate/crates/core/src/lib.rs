//! Strongly truthful mechanisms, externality-resistant VCG, and the
//! translation between single-agent mechanisms and proper scoring rules.
//!
//! The [`analysis`] module checks the resulting incentive guarantees by
//! exhaustive enumeration over bid and value grids.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod auction;
pub mod cli;
pub mod error;
pub mod grid;
pub mod scoring;
pub mod strongtruth;

pub use error::{Error, Result};
