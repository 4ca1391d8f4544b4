//! Finite-size analysis of hashing-based quantum repeaters.
//!
//! * [`bell`]: Bell-diagonal pair states, depolarizing noise and swapping.
//! * [`bounds`]: closed-form failure bounds, yields and ensemble sizes.
//! * [`mc`]: Monte-Carlo simulation of the hashing protocol on error strings.
//! * [`clifford`]: stabilizer tableaux and measurement-based resource states.
//! * [`rates`]: repeater timing and secret-key/entanglement rates.
//! * [`recurrence`]: entanglement-purification/swapping repeater baseline.

pub mod bell;
pub mod bounds;
pub mod clifford;
pub mod error;
pub mod gf2;
pub mod mc;
pub mod rates;
pub mod recurrence;

pub use error::{Error, Result};
