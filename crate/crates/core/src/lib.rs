// !(x > 0.0) is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criticality;
pub mod directions;
pub mod dms;
pub mod dominance;
pub mod error;
pub mod harness;
pub mod hypervolume;
pub mod minmax;
pub mod objective;
pub mod problems;
pub mod trace;

pub use error::{Error, Result};
