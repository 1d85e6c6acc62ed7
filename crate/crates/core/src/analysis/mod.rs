//! Geometric functionals behind the smoothing hypotheses: Sobolev constants
//! of tubes, covering numbers, curvature concentration and ball
//! comparability.

mod covering;
mod scan;
mod sobolev;

pub use covering::{covering, verify_covering, Covering};
pub use scan::{
    ball_comparability, concentration_scan, ConcentrationLevel, ConcentrationRecord, SCAN_FACTORS,
};
pub use sobolev::{sobolev_estimate, sobolev_ratio, SobolevControls, SobolevEstimate};
