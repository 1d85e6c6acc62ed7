use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{tube_at, WarpedMetric};

/// `6x⁵ − 15x⁴ + 10x³` clamped to [0, 1]; C² with zero first and second
/// derivatives at both ends.
pub fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

/// Spatial cutoff: 1 within arclength `inner` of the center, 0 from `outer`
/// on, and a smoothstep across the annulus. Its arclength gradient is at
/// most `1.875 / (outer − inner)`.
pub fn spatial_cutoff(m: &WarpedMetric, center: usize, inner: f64, outer: f64) -> Result<Vec<f64>> {
    if !(inner >= 0.0 && outer > inner) {
        return Err(Error::InvalidParameter {
            name: "cutoff radii",
            reason: "need 0 <= inner < outer",
        });
    }
    let tube = tube_at(m, center, outer)?;
    let mut chi = vec![0.0; m.grid().n()];
    for cell in tube.cells() {
        let d = cell.offset.abs();
        if d < outer {
            chi[cell.index] = 1.0 - smoothstep((d - inner) / (outer - inner));
        }
    }
    Ok(chi)
}

/// Time cutoff: 0 before `tau`, linear on `[tau, tau']`, 1 after.
pub fn time_cutoff(t: f64, tau: f64, tau_prime: f64) -> f64 {
    if t <= tau {
        0.0
    } else if t >= tau_prime {
        1.0
    } else {
        (t - tau) / (tau_prime - tau)
    }
}
