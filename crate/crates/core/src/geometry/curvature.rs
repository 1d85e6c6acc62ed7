use alloc::vec::Vec;

use super::WarpedMetric;
use crate::math;

/// Pointwise curvature of the doubly warped ansatz.
///
/// The curvature operator is diagonal on the four 2-plane classes
/// (r,θ), (r,S²), (θ,S²), (S²,S²) with multiplicities 1, 2, 2, 1. The round
/// unit sphere has sectional curvature +1, and each Ricci eigenvalue is the
/// sum of the sectional curvatures of the planes containing its direction.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    /// `-a''/a`
    pub k_rtheta: Vec<f64>,
    /// `-b''/b`
    pub k_rs: Vec<f64>,
    /// `-a'b'/(ab)`
    pub k_thetas: Vec<f64>,
    /// `(1 - b'²)/b²`
    pub k_ss: Vec<f64>,
    pub ric_r: Vec<f64>,
    pub ric_theta: Vec<f64>,
    /// Eigenvalue on each of the two sphere directions.
    pub ric_s: Vec<f64>,
    pub riem_norm_sq: Vec<f64>,
    pub ric_norm_sq: Vec<f64>,
    pub scalar: Vec<f64>,
}

impl CurvatureField {
    pub fn of(m: &WarpedMetric) -> Self {
        let (da, dda) = m.radial_derivatives(m.a());
        let (db, ddb) = m.radial_derivatives(m.b());
        let n = m.grid().n();
        let mut out = Self::with_capacity(n);
        for i in 0..n {
            let (a, b) = (m.a()[i], m.b()[i]);
            let k_rtheta = -dda[i] / a;
            let k_rs = -ddb[i] / b;
            let k_thetas = -da[i] * db[i] / (a * b);
            let k_ss = (1.0 - db[i] * db[i]) / (b * b);
            out.push(k_rtheta, k_rs, k_thetas, k_ss);
        }
        out
    }

    fn with_capacity(n: usize) -> Self {
        let v = || Vec::with_capacity(n);
        Self {
            k_rtheta: v(),
            k_rs: v(),
            k_thetas: v(),
            k_ss: v(),
            ric_r: v(),
            ric_theta: v(),
            ric_s: v(),
            riem_norm_sq: v(),
            ric_norm_sq: v(),
            scalar: v(),
        }
    }

    fn push(&mut self, k_rtheta: f64, k_rs: f64, k_thetas: f64, k_ss: f64) {
        let ric_r = k_rtheta + 2.0 * k_rs;
        let ric_theta = k_rtheta + 2.0 * k_thetas;
        let ric_s = k_rs + k_thetas + k_ss;
        self.k_rtheta.push(k_rtheta);
        self.k_rs.push(k_rs);
        self.k_thetas.push(k_thetas);
        self.k_ss.push(k_ss);
        self.ric_r.push(ric_r);
        self.ric_theta.push(ric_theta);
        self.ric_s.push(ric_s);
        self.riem_norm_sq.push(
            4.0 * (k_rtheta * k_rtheta
                + 2.0 * k_rs * k_rs
                + 2.0 * k_thetas * k_thetas
                + k_ss * k_ss),
        );
        self.ric_norm_sq
            .push(ric_r * ric_r + ric_theta * ric_theta + 2.0 * ric_s * ric_s);
        self.scalar.push(ric_r + ric_theta + 2.0 * ric_s);
    }

    pub fn len(&self) -> usize {
        self.scalar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scalar.is_empty()
    }

    /// `sup |Rm|`, the tensor norm.
    pub fn sup_rm(&self) -> f64 {
        math::sqrt(math::max_of(&self.riem_norm_sq))
    }

    /// `sup |Ric|`, the tensor norm.
    pub fn sup_ric(&self) -> f64 {
        math::sqrt(math::max_of(&self.ric_norm_sq))
    }

    /// Largest |Ricci eigenvalue| at point i, i.e. the smallest K with |Ric| ≤ K g there.
    pub fn ric_operator_norm_at(&self, i: usize) -> f64 {
        math::abs(self.ric_r[i])
            .max(math::abs(self.ric_theta[i]))
            .max(math::abs(self.ric_s[i]))
    }

    pub fn ric_operator_norm(&self) -> f64 {
        (0..self.len())
            .map(|i| self.ric_operator_norm_at(i))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use crate::geometry::{build_metric, Profile, Shape};
    use crate::Grid;

    #[test]
    fn unit_product_curvature() {
        let m = build_metric(
            &Profile::FlatProduct { a0: 1.0, b0: 1.0 },
            Grid::new(64, 4.0).unwrap(),
        )
        .unwrap();
        let c = m.curvature();
        for i in 0..64 {
            assert_eq!(c.k_ss[i], 1.0);
            assert_eq!((c.k_rtheta[i], c.k_rs[i], c.k_thetas[i]), (0.0, 0.0, 0.0));
            assert_eq!((c.ric_r[i], c.ric_theta[i], c.ric_s[i]), (0.0, 0.0, 1.0));
            assert_eq!(c.riem_norm_sq[i], 4.0);
            assert_eq!(c.scalar[i], 2.0);
        }
        assert_eq!(c.sup_rm(), 2.0);
        assert_eq!(c.ric_operator_norm(), 1.0);
    }

    #[test]
    fn scaled_sphere_factor() {
        let big = 3.0;
        let m = build_metric(
            &Profile::FlatProduct { a0: 1.0, b0: big },
            Grid::new(32, 4.0).unwrap(),
        )
        .unwrap();
        let c = m.curvature();
        assert!(c.k_ss.iter().all(|&k| (k - 1.0 / 9.0).abs() < 1e-15));
        assert!(c
            .riem_norm_sq
            .iter()
            .all(|&k| (k - 4.0 / 81.0).abs() < 1e-15));
    }

    #[test]
    fn trace_identity_and_scaling() {
        let prof = Profile::Warped {
            w: Shape::Fourier {
                base: 1.0,
                amplitude: 0.3,
                modes: 4,
                seed: 11,
            },
            a: Shape::Fourier {
                base: 0.5,
                amplitude: 0.4,
                modes: 4,
                seed: 12,
            },
            b: Shape::Fourier {
                base: 1.2,
                amplitude: 0.4,
                modes: 4,
                seed: 13,
            },
        };
        let m = build_metric(&prof, Grid::new(96, 5.0).unwrap()).unwrap();
        let c = m.curvature();
        for i in 0..96 {
            let tr = c.ric_r[i] + c.ric_theta[i] + 2.0 * c.ric_s[i];
            assert!((c.scalar[i] - tr).abs() <= 1e-14 * c.scalar[i].abs().max(1.0));
            assert!(c.riem_norm_sq[i] >= 0.0 && c.ric_norm_sq[i] >= 0.0);
        }
        for lambda in [2.0, 10.0] {
            let cs = m.scaled(lambda).curvature();
            for i in 0..96 {
                let l2 = lambda * lambda;
                assert!((cs.k_rs[i] * l2 - c.k_rs[i]).abs() <= 1e-12 * c.k_rs[i].abs().max(1.0));
                assert!((cs.k_ss[i] * l2 - c.k_ss[i]).abs() <= 1e-12 * c.k_ss[i].abs().max(1.0));
                let rel =
                    (cs.riem_norm_sq[i] * l2 * l2 - c.riem_norm_sq[i]).abs() / c.riem_norm_sq[i];
                assert!(rel < 1e-12);
            }
        }
    }
}
