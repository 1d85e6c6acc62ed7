//! Concrete values for the constants the inequality chain leaves unnamed.
//!
//! | name | value | where it comes from |
//! |------|-------|---------------------|
//! | `C_p` | `max(2·max(p+c, p²/(p−1), 1+1/(p−1)²), 4p²(p+c)³/(27(p−1)²))` | gradient-of-cutoff term from the integration-by-parts inequality, and the Hölder/Sobolev/Young step absorbing `(p+c)∫uχ²f^p` into `((p−1)/p)∫|∇(χf^{p/2})|²` |
//! | `Ĉ(t)` | `C_p μ³ A² / t` | the potential budget `‖u(t)‖₃ ≤ μ t^{-1/3}` |
//! | `C₁` | `4 C_p` | cutoff slope `|∇χ| ≤ 2/(r−r')` |
//! | recursion factor | `p/(p−1)` | the time-integrated energy inequality controls `((p−1)/p)∫∫|∇(χf^{p/2})|²` |
//! | `C₂` | `3/(32N)` | existence horizon of the quadratic heat inequality, `N` the covering number |

/// Coefficient of `∫|∇χ|² f^p` and of `μ³A²t⁻¹∫χ²f^p` in the differential
/// energy inequality, for volume-growth constant `c`.
pub fn c_p(p: f64, c: f64) -> f64 {
    let q = p - 1.0;
    let ibp = 2.0 * (p + c).max(p * p / q).max(1.0 + 1.0 / (q * q));
    ibp.max(young_coefficient(p, c))
}

/// `4p²(p+c)³/(27(p−1)²)`: the weight left on `μ³A²t⁻¹∫χ²f^p` after Young's
/// inequality with exponents (3, 3/2) hands `((p−1)/p)∫|∇(χf^{p/2})|²` to the
/// gradient term.
pub fn young_coefficient(p: f64, c: f64) -> f64 {
    let q = p - 1.0;
    4.0 * p * p * (p + c) * (p + c) * (p + c) / (27.0 * q * q)
}

/// `Ĉ(t) = C_p μ³ A² / t`.
pub fn c_hat(p: f64, c: f64, mu: f64, a: f64, t: f64) -> f64 {
    c_p(p, c) * mu * mu * mu * a * a / t
}

/// Coefficient of `(r − r')⁻²` in the H-recursion.
pub fn c1(p: f64, c: f64) -> f64 {
    4.0 * c_p(p, c)
}

/// Largest slope of the quintic smoothstep `6x⁵ − 15x⁴ + 10x³` on [0, 1].
pub const CUTOFF_SLOPE: f64 = 1.875;

/// Existence horizon constant for the quadratic heat inequality with
/// covering number `n`.
pub fn c2(n: usize) -> f64 {
    3.0 / (32.0 * n as f64)
}
