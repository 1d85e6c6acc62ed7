//! Curvature of a 4-metric given in coordinates, via Christoffel symbols.
//!
//! Metric derivatives are fourth-order central differences with step `h`;
//! the derivative of the Christoffel symbols is another fourth-order central
//! difference, so the oracle error is O(h^4) plus roundoff of order
//! `f64::EPSILON / h^2`.

pub type Point = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];

/// Christoffel symbols of the second kind, `gamma[l][i][j]`.
pub type Christoffel = [[[f64; 4]; 4]; 4];

fn invert(m: &Mat4) -> Mat4 {
    let mut a = *m;
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        assert!(d.abs() > 1e-300, "singular metric in oracle");
        for k in 0..4 {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                for k in 0..4 {
                    a[r][k] -= f * a[col][k];
                    inv[r][k] -= f * inv[col][k];
                }
            }
        }
    }
    inv
}

fn shifted(x: &Point, dir: usize, by: f64) -> Point {
    let mut y = *x;
    y[dir] += by;
    y
}

fn central_diff<T, F>(f: F, x: &Point, dir: usize, h: f64, combine: fn(&mut T, &T, f64)) -> T
where
    T: Default,
    F: Fn(&Point) -> T,
{
    // (-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h
    let mut out = T::default();
    let stencil = [(2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0)];
    for (k, c) in stencil {
        let v = f(&shifted(x, dir, k * h));
        combine(&mut out, &v, c / (12.0 * h));
    }
    out
}

fn axpy_mat(acc: &mut Mat4, v: &Mat4, c: f64) {
    for i in 0..4 {
        for j in 0..4 {
            acc[i][j] += c * v[i][j];
        }
    }
}

fn axpy_gamma(acc: &mut Christoffel, v: &Christoffel, c: f64) {
    for l in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                acc[l][i][j] += c * v[l][i][j];
            }
        }
    }
}

/// Coordinate directions in which the metric actually varies. Derivatives
/// along the other directions are exactly zero and skipped.
#[derive(Debug, Clone, Copy)]
pub struct Dependence(pub [bool; 4]);

pub fn christoffel<G: Fn(&Point) -> Mat4>(
    g: &G,
    x: &Point,
    h: f64,
    dep: Dependence,
) -> Christoffel {
    let ginv = invert(&g(x));
    let mut dg = [[[0.0; 4]; 4]; 4]; // dg[m][i][j] = d_m g_ij
    for m in 0..4 {
        if dep.0[m] {
            dg[m] = central_diff(g, x, m, h, axpy_mat);
        }
    }
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for l in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0;
                for m in 0..4 {
                    s += ginv[l][m] * (dg[i][m][j] + dg[j][m][i] - dg[m][i][j]);
                }
                gamma[l][i][j] = 0.5 * s;
            }
        }
    }
    gamma
}

/// Riemann tensor with all indices down, `R_{ijkl} = g(R(d_i, d_j) d_k, d_l)`
/// where `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z`.
pub fn riemann_lowered<G: Fn(&Point) -> Mat4>(
    g: &G,
    x: &Point,
    h: f64,
    dep: Dependence,
) -> [[[[f64; 4]; 4]; 4]; 4] {
    let gamma = christoffel(g, x, h, dep);
    let mut dgamma = [[[[0.0; 4]; 4]; 4]; 4]; // dgamma[m][l][i][j]
    for m in 0..4 {
        if dep.0[m] {
            dgamma[m] = central_diff(|y: &Point| christoffel(g, y, h, dep), x, m, h, axpy_gamma);
        }
    }
    // R^l_{ijk} = d_i Γ^l_{jk} − d_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} − Γ^l_{jm} Γ^m_{ik}
    let mut up = [[[[0.0; 4]; 4]; 4]; 4];
    for l in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let mut v = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for m in 0..4 {
                        v += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                    }
                    up[l][i][j][k] = v;
                }
            }
        }
    }
    let gx = g(x);
    let mut down = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let mut v = 0.0;
                    for m in 0..4 {
                        v += gx[l][m] * up[m][i][j][k];
                    }
                    down[i][j][k][l] = v;
                }
            }
        }
    }
    down
}

/// Curvature data in the orthonormal frame of a diagonal metric.
#[derive(Debug, Clone, Copy)]
pub struct FrameCurvature {
    /// Sectional curvature of the plane spanned by coordinate axes i, j.
    pub sectional: Mat4,
    /// Diagonal of Ricci in the orthonormal frame.
    pub ricci: [f64; 4],
    pub scalar: f64,
    /// Full contraction R_{abcd} R^{abcd}.
    pub riem_norm_sq: f64,
    pub ric_norm_sq: f64,
}

/// Curvature of a diagonal metric. Uses the full lowered tensor, so the
/// norms include every component, not just the sectional ones.
pub fn frame_curvature<G: Fn(&Point) -> Mat4>(
    g: &G,
    x: &Point,
    h: f64,
    dep: Dependence,
) -> FrameCurvature {
    let r = riemann_lowered(g, x, h, dep);
    let gx = g(x);
    let scale: [f64; 4] = core::array::from_fn(|i| gx[i][i].sqrt());
    let mut sectional = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                sectional[i][j] = r[i][j][j][i] / (gx[i][i] * gx[j][j]);
            }
        }
    }
    let mut riem_norm_sq = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let v = r[i][j][k][l] / (scale[i] * scale[j] * scale[k] * scale[l]);
                    riem_norm_sq += v * v;
                }
            }
        }
    }
    // Ric_{jk} = R^i_{ijk} = g^{il} R_{ijkl}
    let mut ric_frame = [[0.0; 4]; 4];
    for j in 0..4 {
        for k in 0..4 {
            let mut v = 0.0;
            for i in 0..4 {
                v += r[i][j][k][i] / gx[i][i];
            }
            ric_frame[j][k] = v / (scale[j] * scale[k]);
        }
    }
    let ricci: [f64; 4] = core::array::from_fn(|i| ric_frame[i][i]);
    let ric_norm_sq = ric_frame.iter().flatten().map(|v| v * v).sum();
    FrameCurvature {
        sectional,
        ricci,
        scalar: ricci.iter().sum(),
        riem_norm_sq,
        ric_norm_sq,
    }
}

/// The doubly warped product `w(s)^2 ds^2 + a(s)^2 dθ^2 + b(s)^2 (dφ^2 + sin^2φ dψ^2)`
/// in coordinates (s, θ, φ, ψ).
pub fn doubly_warped<'a>(
    w: &'a dyn Fn(f64) -> f64,
    a: &'a dyn Fn(f64) -> f64,
    b: &'a dyn Fn(f64) -> f64,
) -> impl Fn(&Point) -> Mat4 + 'a {
    move |x: &Point| {
        let (s, phi) = (x[0], x[2]);
        let (wv, av, bv) = (w(s), a(s), b(s));
        let mut g = [[0.0; 4]; 4];
        g[0][0] = wv * wv;
        g[1][1] = av * av;
        g[2][2] = bv * bv;
        g[3][3] = bv * bv * phi.sin().powi(2);
        g
    }
}

/// Dependence pattern of [`doubly_warped`]: varies in s and φ only.
pub const WARPED_DEPENDENCE: Dependence = Dependence([true, false, true, false]);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_sphere_factor_has_curvature_one() {
        let one = |_: f64| 1.0;
        let g = doubly_warped(&one, &one, &one);
        let c = frame_curvature(&g, &[0.3, 0.0, 1.1, 0.0], 1e-3, WARPED_DEPENDENCE);
        assert!((c.sectional[2][3] - 1.0).abs() < 1e-8);
        assert!(c.sectional[0][1].abs() < 1e-8);
        assert!((c.riem_norm_sq - 4.0).abs() < 1e-7);
        assert!((c.scalar - 2.0).abs() < 1e-8);
    }

    #[test]
    fn cone_like_warp_matches_hand_formula() {
        // a = sin(s): the (s, θ) plane is a round sphere slice, K = -a''/a = 1.
        let one = |_: f64| 1.0;
        let a = |s: f64| s.sin();
        let g = doubly_warped(&one, &a, &one);
        let c = frame_curvature(&g, &[1.0, 0.0, 0.9, 0.0], 1e-3, WARPED_DEPENDENCE);
        assert!((c.sectional[0][1] - 1.0).abs() < 1e-8);
    }
}
