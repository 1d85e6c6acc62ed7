//! Exhaustive arclength distances on a periodic grid.

/// Edge lengths `ds * (w_i + w_{i+1}) / 2`, edge i joining i and i+1 (mod n).
fn edges(w: &[f64], ds: f64) -> Vec<f64> {
    let n = w.len();
    (0..n).map(|i| 0.5 * ds * (w[i] + w[(i + 1) % n])).collect()
}

/// Shortest-arc distance between grid points i and j by walking both ways.
pub fn arclength_distance(w: &[f64], ds: f64, i: usize, j: usize) -> f64 {
    let n = w.len();
    let e = edges(w, ds);
    let mut forward = 0.0;
    let mut k = i;
    while k != j {
        forward += e[k];
        k = (k + 1) % n;
    }
    let mut backward = 0.0;
    let mut k = i;
    while k != j {
        k = (k + n - 1) % n;
        backward += e[k];
    }
    forward.min(backward)
}

/// All points strictly within `rho` of `center`, sorted by index.
pub fn points_within(w: &[f64], ds: f64, center: usize, rho: f64) -> Vec<usize> {
    (0..w.len())
        .filter(|&j| arclength_distance(w, ds, center, j) < rho)
        .collect()
}
