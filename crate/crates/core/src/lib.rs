//! Solitary waves of the perturbed energy-critical radial NLS in three
//! dimensions, built around the Aubin–Talenti profile `W`.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod banded;
pub mod cli;
pub mod config;
pub mod construct;
pub mod dynamics;
pub mod error;
pub mod functionals;
pub mod profiles;
pub mod radial;
pub mod resolvent;
pub mod verify;

pub use error::{Error, Result};
