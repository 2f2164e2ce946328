//! A laboratory for addictive behaviour in reinforcement-learning agents.
//!
//! * [`snake`]: Snake with a healthy seed and a drug seed.
//! * [`qlearn`]: tabular ε-greedy Q-learning on a compact observation.
//! * [`tdrl`]: state-value TD learning with a non-compensable drug surge.
//! * [`analysis`]: closed-form conditions for drug preference and a
//!   value-iteration oracle that checks them.
//! * [`harness`]: the three reference experiments, CSV/SVG output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod harness;
pub mod qlearn;
pub mod rng;
pub mod snake;
pub mod tdrl;

pub use error::{Error, Result};
