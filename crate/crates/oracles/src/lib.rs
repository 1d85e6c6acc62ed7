//! Reference computations that share no code with `warpflow-core`.
//!
//! Everything here is deliberately naive: coordinate tensor calculus with
//! nested finite differences, exhaustive distance scans, closed-form ODE
//! solutions. The point is independence from the implementation under test,
//! not speed.

#![allow(clippy::needless_range_loop)]

pub mod christoffel;
pub mod closed_form;
pub mod comparison;
pub mod distance;
