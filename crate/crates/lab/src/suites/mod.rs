//! Seeded suites behind the experiments and the acceptance checks.

pub mod calibration;
pub mod collapse;
pub mod families;
pub mod geometry;
pub mod moser;
pub mod smoothing;
