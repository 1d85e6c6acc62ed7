//! Seeded metric and data generators shared by the suites.

use warpflow_core::{build_metric, Grid, Profile, Result, Shape, WarpedMetric};

pub fn fourier(base: f64, amplitude: f64, modes: u32, seed: u64) -> Shape {
    Shape::Fourier {
        base,
        amplitude,
        modes,
        seed,
    }
}

/// All three warps random, each `base·exp(amp·series)`.
pub fn random_warped(seed: u64, n: usize, length: f64, amplitude: f64) -> Result<WarpedMetric> {
    let s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let prof = Profile::Warped {
        w: fourier(1.0, amplitude, 3, s),
        a: fourier(0.7, amplitude, 3, s ^ 0xA),
        b: fourier(1.3, amplitude, 3, s ^ 0xB),
    };
    build_metric(&prof, Grid::new(n, length)?)
}

/// A smooth positive function on the grid.
pub fn positive_field(seed: u64, grid: &Grid, amplitude: f64) -> Vec<f64> {
    fourier(1.0, amplitude, 5, seed.wrapping_mul(0xD1B5_4A32_D192_ED03)).sample(grid)
}

/// Sphere bump of peak curvature scale `height` and fixed relative depth
/// `depth`: `b = b0(1 − depth·φ)` with φ the von Mises bump of width
/// `√(depth/height)` centered on the domain.
pub fn sphere_bump(height: f64, depth: f64, a0: f64, b0: f64, grid: Grid) -> Result<WarpedMetric> {
    let prof = Profile::Bump {
        center: 0.5 * grid.period_length(),
        height,
        width: (depth / height).sqrt(),
        a0,
        b0,
    };
    build_metric(&prof, grid)
}
