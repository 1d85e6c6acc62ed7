//! Doubly warped product metrics on a periodic grid and their pointwise
//! geometry.
//!
//! Primes denote the arclength derivative `(1/w) d/ds`. First derivatives are
//! centered differences; second derivatives use the conservative stencil
//! `(1/w_i) [ (v_{i+1} - v_i)/w_{i+1/2} - (v_i - v_{i-1})/w_{i-1/2} ] / ds²`
//! with `w_{i+1/2}` the edge average. Both are second order and commute
//! exactly with the scaling `(w, a, b) -> λ (w, a, b)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result, Warp};
use crate::grid::Grid;
use crate::FIBER_VOLUME;

mod curvature;
mod profile;
mod tube;

pub use curvature::CurvatureField;
pub use profile::{build_metric, Profile, Shape, ShapeEval};
pub use tube::{tube_at, Tube, TubeCell, TubeSet};

/// `g = w² ds² + a² dθ² + b² g_{S²}` sampled on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedMetric {
    grid: Grid,
    w: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    time: f64,
}

/// Where to integrate.
#[derive(Debug, Clone, Copy)]
pub enum Region<'a> {
    Whole,
    Tube(&'a Tube),
}

fn check_warp(grid: &Grid, component: Warp, values: &[f64]) -> Result<()> {
    if values.len() != grid.n() {
        return Err(Error::LengthMismatch {
            component: match component {
                Warp::W => "w",
                Warp::A => "a",
                Warp::B => "b",
            },
            expected: grid.n(),
            got: values.len(),
        });
    }
    match values.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        Some(index) => Err(Error::NonPositiveWarp {
            component,
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

impl WarpedMetric {
    pub fn new(grid: Grid, w: Vec<f64>, a: Vec<f64>, b: Vec<f64>, time: f64) -> Result<Self> {
        check_warp(&grid, Warp::W, &w)?;
        check_warp(&grid, Warp::A, &a)?;
        check_warp(&grid, Warp::B, &b)?;
        if !(time >= 0.0 && time.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "time",
                reason: "must be finite and nonnegative",
            });
        }
        Ok(Self {
            grid,
            w,
            a,
            b,
            time,
        })
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    #[inline]
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    #[inline]
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    #[inline]
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn into_parts(self) -> (Grid, Vec<f64>, Vec<f64>, Vec<f64>, f64) {
        (self.grid, self.w, self.a, self.b, self.time)
    }

    /// The metric `λ² g` at time `λ² t`: every warp is multiplied by λ.
    pub fn scaled(&self, lambda: f64) -> Self {
        let mul = |v: &[f64]| v.iter().map(|x| lambda * x).collect();
        Self {
            grid: self.grid,
            w: mul(&self.w),
            a: mul(&self.a),
            b: mul(&self.b),
            time: lambda * lambda * self.time,
        }
    }

    /// The same metric with the θ-circle multiplied by `factor` (collapse for factor < 1).
    pub fn with_circle_scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.a.iter_mut().for_each(|x| *x *= factor);
        out
    }

    /// Arclength of edge i, joining points i and i+1.
    pub fn edge_lengths(&self) -> Vec<f64> {
        let ds = self.grid.ds();
        (0..self.grid.n())
            .map(|i| 0.5 * ds * (self.w[i] + self.w[self.grid.next(i)]))
            .collect()
    }

    pub fn total_arclength(&self) -> f64 {
        self.edge_lengths().iter().sum()
    }

    /// `dV_i = 8π² w a b² ds`.
    pub fn volume_element(&self) -> Vec<f64> {
        let ds = self.grid.ds();
        (0..self.grid.n())
            .map(|i| FIBER_VOLUME * self.w[i] * self.a[i] * self.b[i] * self.b[i] * ds)
            .collect()
    }

    pub fn integrate(&self, integrand: &[f64], region: Region<'_>) -> f64 {
        let dv = self.volume_element();
        match region {
            Region::Whole => dv.iter().zip(integrand).map(|(v, f)| v * f).sum(),
            Region::Tube(t) => t
                .cells()
                .iter()
                .map(|c| c.weight * dv[c.index] * integrand[c.index])
                .sum(),
        }
    }

    pub fn volume(&self, region: Region<'_>) -> f64 {
        let dv = self.volume_element();
        match region {
            Region::Whole => dv.iter().sum(),
            Region::Tube(t) => t.cells().iter().map(|c| c.weight * dv[c.index]).sum(),
        }
    }

    pub fn curvature(&self) -> CurvatureField {
        CurvatureField::of(self)
    }

    /// `∫ |Rm|² dV` over the region.
    pub fn l2_curvature(&self, region: Region<'_>) -> f64 {
        self.integrate(&self.curvature().riem_norm_sq, region)
    }

    /// Arclength first and second derivatives of a grid function.
    pub fn radial_derivatives(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let g = &self.grid;
        let ds = g.ds();
        let n = g.n();
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        for i in 0..n {
            let (ip, im) = (g.next(i), g.prev(i));
            let w = self.w[i];
            let w_plus = 0.5 * (w + self.w[ip]);
            let w_minus = 0.5 * (w + self.w[im]);
            d1[i] = (v[ip] - v[im]) / (2.0 * ds * w);
            d2[i] = ((v[ip] - v[i]) / w_plus - (v[i] - v[im]) / w_minus) / (ds * ds * w);
        }
        (d1, d2)
    }

    /// Conductances `(a b² / w)` averaged onto edges: entry i sits between i and i+1.
    pub(crate) fn edge_conductance(&self) -> Vec<f64> {
        let n = self.grid.n();
        let k: Vec<f64> = (0..n)
            .map(|i| self.a[i] * self.b[i] * self.b[i] / self.w[i])
            .collect();
        (0..n)
            .map(|i| 0.5 * (k[i] + k[self.grid.next(i)]))
            .collect()
    }

    /// Laplace–Beltrami operator on functions of s, in divergence form
    /// `(1/(w a b²)) D_s((a b²/w) D_s f)`. Self-adjoint for the quadrature
    /// `Σ f g dV` up to roundoff.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let ds = g.ds();
        let kappa = self.edge_conductance();
        (0..g.n())
            .map(|i| {
                let (ip, im) = (g.next(i), g.prev(i));
                let flux = kappa[i] * (f[ip] - f[i]) - kappa[im] * (f[i] - f[im]);
                flux / (ds * ds * self.w[i] * self.a[i] * self.b[i] * self.b[i])
            })
            .collect()
    }

    /// `∫ |∇f|² dV`, summed over edges. Equals `-Σ f Δf dV`.
    pub fn dirichlet_energy(&self, f: &[f64]) -> f64 {
        let g = &self.grid;
        let kappa = self.edge_conductance();
        let sum: f64 = (0..g.n())
            .map(|i| {
                let d = f[g.next(i)] - f[i];
                kappa[i] * d * d
            })
            .sum();
        FIBER_VOLUME * sum / g.ds()
    }

    /// `∫ |∇χ|² q dV` with q averaged onto edges.
    pub fn weighted_dirichlet_energy(&self, chi: &[f64], q: &[f64]) -> f64 {
        let g = &self.grid;
        let kappa = self.edge_conductance();
        let sum: f64 = (0..g.n())
            .map(|i| {
                let ip = g.next(i);
                let d = chi[ip] - chi[i];
                kappa[i] * d * d * 0.5 * (q[i] + q[ip])
            })
            .sum();
        FIBER_VOLUME * sum / g.ds()
    }

    /// Largest diffusion-stable explicit Euler step for the heat operator,
    /// with the diagonal coefficient kept nonnegative (monotone scheme).
    pub fn heat_dt_limit(&self) -> f64 {
        let g = &self.grid;
        let ds = g.ds();
        let kappa = self.edge_conductance();
        (0..g.n())
            .map(|i| {
                let mass = ds * ds * self.w[i] * self.a[i] * self.b[i] * self.b[i];
                mass / (kappa[i] + kappa[g.prev(i)])
            })
            .fold(f64::INFINITY, f64::min)
    }
}
