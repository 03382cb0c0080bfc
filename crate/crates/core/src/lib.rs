//! Link-level analysis of two-user (and general multi-user) NOMA clusters:
//! per-user spectral efficiency under successive interference cancellation,
//! closed-form NOMA-dominance radii, user pairing, and distance-sweep and
//! Monte-Carlo experiments against a TDMA baseline.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_io;
pub mod error;
pub mod experiments;
pub mod link_model;
pub mod pairing;
pub mod rate_engine;

pub use error::{Error, Result};
