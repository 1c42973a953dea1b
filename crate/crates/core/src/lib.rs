//! Exact arithmetic for classifying points of a quaternionic Hodge-Tate
//! period domain into Ekedahl-Oort strata.

pub mod dieudonne;
pub mod error;
pub mod expr;
pub mod tilt;
pub mod lemmas;
pub mod localfield;
pub mod rational;
pub mod resfield;
pub mod strata;
pub mod suites;

pub use error::{Error, Result};
pub use rational::{Val, Q};
