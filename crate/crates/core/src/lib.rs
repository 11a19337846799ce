//! Synthetic data with controlled second-order structure.
//!
//! Two generators share a common statistical toolkit:
//!
//! * a territorial generator coupling an aggregation-diffusion density
//!   model ([`grid`]) with a gravity-driven road network ([`network`]),
//!   whose indicator cross-correlations ([`morphology`], [`stats`]) are
//!   explored over a Latin hypercube ([`explore`]) and compared with an
//!   interaction-free baseline ([`nullmodel`]);
//! * a hybrid financial series generator ([`finance`]) keeping the low
//!   frequency component of a signal and replacing the high frequency part
//!   with correlated Brownian noise.

// `!(x > y)` guards deliberately reject NaN; index loops mirror the
// matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod explore;
pub mod finance;
pub mod grid;
pub mod morphology;
pub mod network;
pub mod nullmodel;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
