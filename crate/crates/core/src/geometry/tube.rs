use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::WarpedMetric;
use crate::error::{Error, Result};

/// One grid cell touched by a tube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeCell {
    pub index: usize,
    /// Signed arclength from the center along the shorter arc.
    pub offset: f64,
    /// Fraction of the cell's arclength lying inside the tube.
    pub weight: f64,
}

/// Fiber-saturated arclength tube around a grid point, standing in for a
/// geodesic ball: `T_{ρ−d_f} ⊆ B_ρ ⊆ T_ρ` with `d_f` the fiber diameter.
///
/// Cells partition the circle at edge midpoints. Cells straddling the
/// boundary carry fractional weight so volumes are continuous in ρ.
#[derive(Debug, Clone, PartialEq)]
pub struct Tube {
    center: usize,
    radius: f64,
    cells: Vec<TubeCell>,
    fiber_diameter: f64,
}

impl Tube {
    pub fn center(&self) -> usize {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Cells ordered by offset.
    pub fn cells(&self) -> &[TubeCell] {
        &self.cells
    }

    /// Grid points strictly within the radius, ordered along the circle.
    pub fn index_set(&self) -> Vec<usize> {
        self.cells
            .iter()
            .filter(|c| c.offset.abs() < self.radius)
            .map(|c| c.index)
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `max π·max(a, b)` over the tube: upper bound on the diameter of the
    /// fiber `S¹(a) × S²(b)` over each point.
    pub fn fiber_diameter(&self) -> f64 {
        self.fiber_diameter
    }

    /// Radius of the inner tube in the sandwich `T_{ρ−d_f} ⊆ B_ρ ⊆ T_ρ`.
    pub fn inner_radius(&self) -> f64 {
        (self.radius - self.fiber_diameter).max(0.0)
    }
}

/// Signed arclength offsets of every grid point from `center`, plus the
/// arclength of the edge toward and away from the center.
fn offsets(edges: &[f64], center: usize) -> Vec<(f64, f64, f64)> {
    let n = edges.len();
    let total: f64 = edges.iter().sum();
    let mut forward = vec![0.0; n];
    let mut acc = 0.0;
    for step in 1..n {
        let idx = (center + step) % n;
        acc += edges[(idx + n - 1) % n];
        forward[idx] = acc;
    }
    (0..n)
        .map(|i| {
            let before = edges[(i + n - 1) % n];
            let after = edges[i];
            if i == center {
                // toward = left half-cell, away = right half-cell
                (0.0, before, after)
            } else if forward[i] <= total - forward[i] {
                (forward[i], before, after)
            } else {
                (-(total - forward[i]), after, before)
            }
        })
        .collect()
}

fn build_tube(m: &WarpedMetric, edges: &[f64], center: usize, rho: f64) -> Tube {
    let mut cells: Vec<TubeCell> = offsets(edges, center)
        .into_iter()
        .enumerate()
        .filter_map(|(index, (offset, toward, away))| {
            let (lo, hi) = if index == center {
                (-0.5 * toward, 0.5 * away)
            } else if offset > 0.0 {
                (offset - 0.5 * toward, offset + 0.5 * away)
            } else {
                (offset - 0.5 * away, offset + 0.5 * toward)
            };
            let inside = (hi.min(rho) - lo.max(-rho)).max(0.0);
            let weight = (inside / (hi - lo)).min(1.0);
            (weight > 0.0).then_some(TubeCell {
                index,
                offset,
                weight,
            })
        })
        .collect();
    cells.sort_by(|x, y| x.offset.total_cmp(&y.offset));
    let fiber_diameter = cells
        .iter()
        .filter(|c| c.offset.abs() < rho)
        .map(|c| PI * m.a()[c.index].max(m.b()[c.index]))
        .fold(0.0, f64::max);
    Tube {
        center,
        radius: rho,
        cells,
        fiber_diameter,
    }
}

/// The tube of arclength radius `rho` around grid point `s0`. Requires `rho`
/// below half the total arclength so the tube does not wrap onto itself.
pub fn tube_at(m: &WarpedMetric, s0: usize, rho: f64) -> Result<Tube> {
    if s0 >= m.grid().n() {
        return Err(Error::InvalidParameter {
            name: "center",
            reason: "index outside the grid",
        });
    }
    if !(rho >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "radius",
            reason: "must be nonnegative",
        });
    }
    let edges = m.edge_lengths();
    let half = 0.5 * edges.iter().sum::<f64>();
    if rho >= half {
        return Err(Error::RadiusTooLarge { radius: rho, half });
    }
    Ok(build_tube(m, &edges, s0, rho))
}

/// Tubes of one radius around every grid point.
#[derive(Debug, Clone)]
pub struct TubeSet {
    radius: f64,
    tubes: Vec<Tube>,
}

impl TubeSet {
    pub fn new(m: &WarpedMetric, rho: f64) -> Result<Self> {
        tube_at(m, 0, rho)?;
        let edges = m.edge_lengths();
        let tubes = (0..m.grid().n())
            .map(|c| build_tube(m, &edges, c, rho))
            .collect();
        Ok(Self { radius: rho, tubes })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn tubes(&self) -> &[Tube] {
        &self.tubes
    }

    /// `∫_{T(x)} q dV` for every center x, using the volume element of `m`.
    pub fn integrals(&self, m: &WarpedMetric, q: &[f64]) -> Vec<f64> {
        let dq: Vec<f64> = m
            .volume_element()
            .iter()
            .zip(q)
            .map(|(v, f)| v * f)
            .collect();
        self.tubes
            .iter()
            .map(|t| t.cells.iter().map(|c| c.weight * dq[c.index]).sum())
            .collect()
    }

    pub fn volumes(&self, m: &WarpedMetric) -> Vec<f64> {
        let dv = m.volume_element();
        self.tubes
            .iter()
            .map(|t| t.cells.iter().map(|c| c.weight * dv[c.index]).sum())
            .collect()
    }
}
