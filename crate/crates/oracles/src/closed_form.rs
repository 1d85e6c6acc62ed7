//! Closed-form solutions of the model problems.

/// Round S² factor of radius b0 under Ricci flow with flat circle factors:
/// db/dt = −1/b, so b(t)² = b0² − 2t.
pub fn shrinking_sphere_b_sq(b0: f64, t: f64) -> f64 {
    b0 * b0 - 2.0 * t
}

/// Time at which b/b0 first drops to 1/limit on the shrinking sphere.
pub fn shrinking_sphere_crossing(b0: f64, limit: f64) -> f64 {
    0.5 * b0 * b0 * (1.0 - 1.0 / (limit * limit))
}

/// Solution of f' = c0 f² with f(0) = eta.
pub fn riccati(c0: f64, eta: f64, t: f64) -> f64 {
    eta / (1.0 - c0 * eta * t)
}

pub fn riccati_blowup(c0: f64, eta: f64) -> f64 {
    1.0 / (c0 * eta)
}

/// Semi-discrete decay of the lowest cosine mode on a uniform periodic grid
/// of spacing ds: eigenvalue −(2/ds)² sin²(π ds / L).
pub fn discrete_cosine_eigenvalue(ds: f64, period: f64) -> f64 {
    let s = (core::f64::consts::PI * ds / period).sin();
    -4.0 * s * s / (ds * ds)
}

/// Exact continuum eigenvalue of the flat circle mode cos(2πs/L).
pub fn continuum_cosine_eigenvalue(period: f64) -> f64 {
    let k = 2.0 * core::f64::consts::PI / period;
    -k * k
}
