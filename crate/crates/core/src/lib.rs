//! Sum-product messages for proper q-colorings of b-ary trees.
//!
//! * [`messages`]: message vectors, the update rule, and the message sets.
//! * [`tree`]: finite trees with boundary colorings, propagation, and a
//!   brute-force enumeration oracle.
//! * [`analysis`]: contraction constants, thresholds, samplers over the
//!   message sets, and randomized verification of the contraction bounds.
//! * [`experiments`]: the command implementations behind the `bethemix` CLI.

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod messages;
pub mod seed;
pub mod tree;

pub use error::{Error, Result};
