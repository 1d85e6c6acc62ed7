use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Tube, WarpedMetric};
use crate::math;
use crate::FIBER_VOLUME;

/// Best constant found for `(∫ f⁴ dV)^{1/2} ≤ A ∫ |∇f|² dV` over radial f
/// vanishing outside a tube. A lower bound for the true constant.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SobolevEstimate {
    pub a: f64,
    /// Maximizer on the full grid (zero off the tube), normalized to unit
    /// Dirichlet energy.
    pub minimizer: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Ratio reached from each restart, in restart order.
    pub restart_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevControls {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop once the ratio changes by less than this relative amount.
    pub tolerance: f64,
}

impl Default for SobolevControls {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 0,
            max_iterations: 20_000,
            tolerance: 1e-13,
        }
    }
}

/// `(Σ dV f⁴)^{1/2} / ∫|∇f|²` for a grid function.
pub fn sobolev_ratio(m: &WarpedMetric, f: &[f64]) -> f64 {
    let dv = m.volume_element();
    let l4: f64 = dv.iter().zip(f).map(|(v, x)| v * x * x * x * x).sum();
    math::sqrt(l4) / m.dirichlet_energy(f)
}

/// Stiffness (tridiagonal, Dirichlet outside the tube) and mass on the
/// tube's ordered interior points.
struct Restricted {
    idx: Vec<usize>,
    diag: Vec<f64>,
    off: Vec<f64>,
    mass: Vec<f64>,
}

impl Restricted {
    fn new(m: &WarpedMetric, idx: Vec<usize>) -> Self {
        let g = m.grid();
        let ds = g.ds();
        let kappa: Vec<f64> = m
            .edge_conductance()
            .iter()
            .map(|k| FIBER_VOLUME * k / ds)
            .collect();
        let dv = m.volume_element();
        let diag = idx.iter().map(|&i| kappa[i] + kappa[g.prev(i)]).collect();
        let off = idx.windows(2).map(|p| -kappa[p[0]]).collect();
        let mass = idx.iter().map(|&i| dv[i]).collect();
        Self {
            idx,
            diag,
            off,
            mass,
        }
    }

    /// Solves the tridiagonal system by the Thomas algorithm.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let k = rhs.len();
        let mut c = vec![0.0; k];
        let mut d = vec![0.0; k];
        let mut beta = self.diag[0];
        d[0] = rhs[0] / beta;
        for i in 1..k {
            c[i - 1] = self.off[i - 1] / beta;
            beta = self.diag[i] - self.off[i - 1] * c[i - 1];
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / beta;
        }
        for i in (0..k - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        d
    }

    fn energy(&self, f: &[f64]) -> f64 {
        let mut e = 0.0;
        for i in 0..f.len() {
            e += self.diag[i] * f[i] * f[i];
            if i + 1 < f.len() {
                e += 2.0 * self.off[i] * f[i] * f[i + 1];
            }
        }
        e
    }

    fn ratio(&self, f: &[f64]) -> f64 {
        let l4: f64 = self
            .mass
            .iter()
            .zip(f)
            .map(|(v, x)| v * x * x * x * x)
            .sum();
        math::sqrt(l4) / self.energy(f)
    }

    fn normalize(&self, f: &mut [f64]) {
        let s = 1.0 / math::sqrt(self.energy(f));
        f.iter_mut().for_each(|x| *x *= s);
    }
}

/// Maximizes the Sobolev quotient over radial functions supported on the
/// tube's interior points.
///
/// Each step maps f to the normalized solution of `K g = M f³` (K stiffness,
/// M mass), the maximizer over the energy ellipsoid of the linearized
/// quotient. The quotient is convex in f, so every step is an ascent step.
/// Restarts begin from seeded positive bumps at random positions.
pub fn sobolev_estimate(
    m: &WarpedMetric,
    tube: &Tube,
    controls: &SobolevControls,
) -> Result<SobolevEstimate> {
    let idx = tube.index_set();
    if idx.len() < 8 {
        return Err(Error::TubeTooSmall {
            got: idx.len(),
            need: 8,
        });
    }
    if controls.restarts == 0 {
        return Err(Error::InvalidParameter {
            name: "restarts",
            reason: "need at least one",
        });
    }
    let sys = Restricted::new(m, idx);
    let k = sys.idx.len();
    let mut rng = ChaCha8Rng::seed_from_u64(controls.seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut restart_values = Vec::with_capacity(controls.restarts);
    let mut iterations = 0;
    let mut converged = true;

    for _ in 0..controls.restarts {
        let c = rng.random_range(0.2..0.8) * (k - 1) as f64;
        let width = rng.random_range(0.1..0.5) * k as f64;
        let mut f: Vec<f64> = (0..k)
            .map(|i| {
                let x = (i as f64 - c) / width;
                math::exp(-x * x) + 0.05 * rng.random_range(0.0..1.0)
            })
            .collect();
        sys.normalize(&mut f);
        let mut ratio = sys.ratio(&f);
        let mut done = false;
        for _ in 0..controls.max_iterations {
            iterations += 1;
            let rhs: Vec<f64> = f
                .iter()
                .zip(&sys.mass)
                .map(|(x, v)| v * x * x * x)
                .collect();
            let mut g = sys.solve(&rhs);
            sys.normalize(&mut g);
            let next = sys.ratio(&g);
            f = g;
            let change = math::abs(next - ratio);
            ratio = next;
            if change <= controls.tolerance * ratio {
                done = true;
                break;
            }
        }
        converged &= done;
        restart_values.push(ratio);
        if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
            best = Some((ratio, f));
        }
    }

    let (_, f) = best.expect("at least one restart");
    let mut minimizer = vec![0.0; m.grid().n()];
    for (&i, v) in sys.idx.iter().zip(&f) {
        minimizer[i] = *v;
    }
    Ok(SobolevEstimate {
        a: sobolev_ratio(m, &minimizer),
        minimizer,
        iterations,
        converged,
        restart_values,
    })
}
