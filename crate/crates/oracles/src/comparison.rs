//! One-dimensional volume comparison for fiber-saturated tubes.
//!
//! A tube's volume is `∫ ρ(s) dσ` over an arclength window of half-width r,
//! with `ρ = a b²` up to the fiber constant. If `|d ln ρ / dσ| ≤ L`, moving
//! the window by d changes its volume by at most `e^{L|d|}`. Centers within
//! 3r/2 of a common point are at most 3r apart.

/// Largest `|Δ ln(a b²)| / edge length` over grid edges.
pub fn log_density_slope(w: &[f64], a: &[f64], b: &[f64], ds: f64) -> f64 {
    let n = w.len();
    (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            let rho = |k: usize| (a[k] * b[k] * b[k]).ln();
            (rho(j) - rho(i)).abs() / (0.5 * ds * (w[i] + w[j]))
        })
        .fold(0.0, f64::max)
}

/// `exp(3r · L)`, the comparison bound for tube-volume ratios.
pub fn comparability_bound(w: &[f64], a: &[f64], b: &[f64], ds: f64, r: f64) -> f64 {
    (3.0 * r * log_density_slope(w, a, b, ds)).exp()
}
