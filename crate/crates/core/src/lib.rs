//! Ideal-gas cycle models, lever-load design and experiment analysis for
//! pouch-actuator heat engines.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod compare;
pub mod cycles;
pub mod error;
pub mod rig;
pub mod thermo;

pub use error::{Error, Result};
