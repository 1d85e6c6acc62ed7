//! Ricci flow on doubly warped product 4-metrics
//! `g = w(s)² ds² + a(s)² dθ² + b(s)² g_{S²}` over a periodic grid, together
//! with the regularity machinery used to reason about it: Moser-iteration
//! inequality checks for linear and quadratic heat inequalities, Sobolev
//! constants of arclength tubes, covering numbers and curvature-concentration
//! scans.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the `warpflow` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod flow;
pub mod geometry;
pub mod moser;

mod error;
mod grid;
mod math;
mod radial;

pub use error::{Error, Result, Warp};
pub use geometry::{
    build_metric, tube_at, CurvatureField, Profile, Region, Shape, Tube, TubeCell, TubeSet,
    WarpedMetric,
};
pub use grid::Grid;
pub use radial::RadialFunction;

/// Volume of the unit circle times the unit round sphere, 2π · 4π.
pub const FIBER_VOLUME: f64 = 8.0 * core::f64::consts::PI * core::f64::consts::PI;
