//! Divisor theory on metric graphs.
//!
//! The crate has four layers:
//!
//! * [`graph`] / [`model`] — metric graphs with integer edge lengths, their
//!   unit-length discrete models, and divisors (chip configurations);
//! * [`burning`] / [`rank`] / [`jacobian`] — Dhar's burning algorithm,
//!   q-reduced divisors, Baker–Norine rank, and gonality search;
//! * [`trees`] — graphs glued from three trees along a shared root set,
//!   the rank-one divisor that construction produces, and a girth/gonality
//!   scanner over edge-length assignments;
//! * [`series`] — exact rational power series for the secant-plane
//!   counting generating function and the classical linear-series
//!   invariants `rho` and `mu`.
//!
//! Everything is exact integer or rational arithmetic; every operation is
//! deterministic for fixed inputs.

pub mod burning;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod format;
pub mod graph;
pub mod model;
pub mod gonality;
pub mod jacobian;
pub mod rank;
pub mod series;
pub mod trees;

pub use error::{Error, ErrorCode, Result};
pub use graph::{Girth, GirthMode, MetricGraph};
pub use model::{Coordinate, Divisor, Model};
