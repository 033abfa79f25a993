//! Exact and numeric computations around the quaternionic Maass
//! Spezialschar on split `SO(8)`.

#![allow(clippy::needless_range_loop, clippy::suspicious_arithmetic_impl)]

pub mod arith;
pub mod coset;
pub mod error;
pub mod lifts;
pub mod octonion;
pub mod orbits;
pub mod quadspace;
pub mod triality;
pub mod verify;
pub mod whittaker;

pub use error::{Error, Result};
