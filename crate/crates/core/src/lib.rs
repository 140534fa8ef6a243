//! Height bounds for 2-isogeny volcanoes of ordinary elliptic curves over
//! `F_p` and `F_{p^2}`.
//!
//! The crate computes the improved height bounds (the closed form for
//! `F_{p^2}` and the per-prime 2-adic lifting bound for `F_p`), checks them
//! against brute-force oracles and exhaustively enumerated isogeny graphs,
//! and uses them to shorten the volcano-walk supersingularity test.

pub mod arith;
pub mod bounds;
pub mod curve;
mod decimal;
pub mod error;
pub mod field;
pub mod poly;
pub mod sstest;
pub mod verify;
pub mod volcano;

pub use error::{Error, Result};
