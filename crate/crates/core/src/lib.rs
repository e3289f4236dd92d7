//! Dynamics as sets of trajectories, statistics as measures on them.
//!
//! The [`tcore`] module holds the shared abstractions; the remaining modules
//! are worked systems built on top of it.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bernoulli;
pub mod decay;
pub mod error;
pub mod interference;
pub mod numeric;
pub mod ode;
pub mod rng;
pub mod scattering;
pub mod spin;
pub mod tcore;

pub use error::{Error, Result};
