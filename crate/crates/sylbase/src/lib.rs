//! Exact certification toolkit for base-size-two bounds on Sylow 2-subgroups
//! of finite groups of Lie type in odd characteristic.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: big-integer and rational helpers plus 2-adic utilities.
//! * [`orders`]: a data-driven catalog of group order formulas.
//! * [`sylow`]: orders of Sylow 2-subgroups of simple groups of Lie type.
//! * [`involutions`]: involution class-size bounds and wreath-model counts.
//! * [`qhat`]: the fixed-point-ratio estimator and the per-family sweep drivers.
//! * [`permgrp`]: a small permutation-group engine used for independent checks.

pub mod arith;
pub mod error;
pub mod involutions;
pub mod orders;
pub mod permgrp;
pub mod qhat;
pub mod sylow;

pub use error::{Error, Result};
