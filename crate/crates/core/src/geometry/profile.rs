use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::WarpedMetric;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::math;

/// A smooth positive periodic function of s, used for one warp.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "shape", rename_all = "snake_case"))]
pub enum Shape {
    Constant {
        value: f64,
    },
    /// `base · (1 − height·width²·φ(s − center))` with φ the periodic
    /// von Mises bump `exp(κ (cos(2π x/L) − 1))`, `κ = (L / 2π width)²`.
    /// φ(0) = 1 and φ''(0) = −1/width², so the dip has depth
    /// `height·width²·base` and `|v''/v| ≈ height` at the center.
    Dip {
        center: f64,
        height: f64,
        width: f64,
        base: f64,
    },
    /// `base · exp(amplitude · Σ_{k≤modes} (c_k cos(2πks/L) + d_k sin(2πks/L)) / k²)`
    /// with `c_k, d_k` uniform in [−1, 1] from a ChaCha8 stream seeded by `seed`.
    Fourier {
        base: f64,
        amplitude: f64,
        modes: u32,
        seed: u64,
    },
}

/// A [`Shape`] bound to a period, with any random coefficients drawn.
#[derive(Debug, Clone)]
pub struct ShapeEval {
    shape: Shape,
    period: f64,
    coeffs: Vec<(f64, f64)>,
}

impl ShapeEval {
    pub fn eval(&self, s: f64) -> f64 {
        let k0 = 2.0 * PI / self.period;
        match self.shape {
            Shape::Constant { value } => value,
            Shape::Dip {
                center,
                height,
                width,
                base,
            } => {
                let kappa = 1.0 / (k0 * k0 * width * width);
                let bump = math::exp(kappa * (math::cos(k0 * (s - center)) - 1.0));
                base * (1.0 - height * width * width * bump)
            }
            Shape::Fourier {
                base, amplitude, ..
            } => {
                let series: f64 = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, (c, d))| {
                        let k = (j + 1) as f64;
                        (c * math::cos(k * k0 * s) + d * math::sin(k * k0 * s)) / (k * k)
                    })
                    .sum();
                base * math::exp(amplitude * series)
            }
        }
    }
}

impl Shape {
    pub fn constant(value: f64) -> Self {
        Shape::Constant { value }
    }

    pub fn bind(&self, period: f64) -> ShapeEval {
        let coeffs = match *self {
            Shape::Fourier { modes, seed, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..modes)
                    .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect()
            }
            _ => Vec::new(),
        };
        ShapeEval {
            shape: self.clone(),
            period,
            coeffs,
        }
    }

    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        let f = self.bind(grid.period_length());
        (0..grid.n()).map(|i| f.eval(grid.coord(i))).collect()
    }
}

/// Named families of initial metrics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum Profile {
    /// `w ≡ 1, a ≡ a0, b ≡ b0`.
    FlatProduct { a0: f64, b0: f64 },
    /// `w ≡ 1, a ≡ a0`, b a [`Shape::Dip`] of the given height and width around b0.
    Bump {
        center: f64,
        height: f64,
        width: f64,
        a0: f64,
        b0: f64,
    },
    /// `w ≡ 1, a ≡ a0` (typically a0 ≪ 1) with a free S² profile.
    Collapsed { a0: f64, b: Shape },
    /// Independent shapes for all three warps.
    Warped { w: Shape, a: Shape, b: Shape },
    /// Raw arrays, one entry per grid point.
    Custom {
        w: Vec<f64>,
        a: Vec<f64>,
        b: Vec<f64>,
    },
}

impl Profile {
    /// The three warps as functions of s, when the profile is analytic.
    pub fn shapes(&self) -> Option<[Shape; 3]> {
        let c = Shape::constant;
        match self {
            Profile::FlatProduct { a0, b0 } => Some([c(1.0), c(*a0), c(*b0)]),
            Profile::Bump {
                center,
                height,
                width,
                a0,
                b0,
            } => Some([
                c(1.0),
                c(*a0),
                Shape::Dip {
                    center: *center,
                    height: *height,
                    width: *width,
                    base: *b0,
                },
            ]),
            Profile::Collapsed { a0, b } => Some([c(1.0), c(*a0), b.clone()]),
            Profile::Warped { w, a, b } => Some([w.clone(), a.clone(), b.clone()]),
            Profile::Custom { .. } => None,
        }
    }
}

/// Samples a profile on the grid at time 0. Nonpositive warps are rejected
/// with the offending component and index.
pub fn build_metric(profile: &Profile, grid: Grid) -> Result<WarpedMetric> {
    let (w, a, b) = match (profile, profile.shapes()) {
        (Profile::Custom { w, a, b }, _) => (w.clone(), a.clone(), b.clone()),
        (_, Some([w, a, b])) => (w.sample(&grid), a.sample(&grid), b.sample(&grid)),
        (_, None) => {
            return Err(Error::InvalidParameter {
                name: "profile",
                reason: "no shapes",
            })
        }
    };
    WarpedMetric::new(grid, w, a, b, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Warp;

    #[test]
    fn constant_families() {
        let g = Grid::new(64, 4.0).unwrap();
        let m = build_metric(&Profile::FlatProduct { a0: 1.0, b0: 1.0 }, g).unwrap();
        assert!(m.w().iter().chain(m.a()).chain(m.b()).all(|&v| v == 1.0));
        let m = build_metric(
            &Profile::Collapsed {
                a0: 0.01,
                b: Shape::constant(1.0),
            },
            g,
        )
        .unwrap();
        assert!(m.a().iter().all(|&v| v == 0.01));
        assert!(m.b().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn bump_matches_documented_formula() {
        let g = Grid::new(128, 4.0).unwrap();
        let (center, height, width) = (2.0, 5.0, 0.2);
        let prof = Profile::Bump {
            center,
            height,
            width,
            a0: 1.0,
            b0: 1.0,
        };
        let m = build_metric(&prof, g).unwrap();
        let kappa = (4.0 / (2.0 * PI * width)).powi(2);
        for i in 0..128 {
            let s = g.coord(i);
            let expected = 1.0
                - height
                    * width
                    * width
                    * (kappa * ((2.0 * PI * (s - center) / 4.0).cos() - 1.0)).exp();
            assert!((m.b()[i] - expected).abs() < 1e-14);
            assert!(m.b()[i] > 0.0);
        }
        // deepest point sits at the center with depth h·width²
        assert!((m.b()[64] - (1.0 - 0.2)).abs() < 1e-14);
    }

    #[test]
    fn too_deep_bump_is_rejected_with_index() {
        let g = Grid::new(64, 4.0).unwrap();
        let prof = Profile::Bump {
            center: 2.0,
            height: 50.0,
            width: 0.2,
            a0: 1.0,
            b0: 1.0,
        };
        match build_metric(&prof, g) {
            Err(Error::NonPositiveWarp {
                component, index, ..
            }) => {
                assert_eq!(component, Warp::B);
                assert!((index as isize - 32).abs() < 8);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn fourier_is_seeded_and_periodic() {
        let s = Shape::Fourier {
            base: 1.0,
            amplitude: 0.5,
            modes: 5,
            seed: 42,
        };
        let f = s.bind(3.0);
        let g = s.bind(3.0);
        for x in [0.0, 0.7, 1.9] {
            assert_eq!(f.eval(x), g.eval(x));
            assert!((f.eval(x) - f.eval(x + 3.0)).abs() < 1e-12);
            assert!(f.eval(x) > 0.0);
        }
    }
}
