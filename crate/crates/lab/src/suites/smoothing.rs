//! Curvature smoothing experiments: the bump-height sweep at fixed tube-L²
//! curvature and the scalar quadratic-reaction runs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use warpflow_core::analysis::{covering, sobolev_estimate, SobolevControls};
use warpflow_core::flow::{run_flow, FlowControls, FlowRun};
use warpflow_core::moser::{scalar_smoothing_check, QuadraticProblem, SmoothingReport};
use warpflow_core::{
    build_metric, tube_at, Error, Grid, Profile, Region, Result, TubeSet, WarpedMetric,
};

use super::families::sphere_bump;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothingSweepSpec {
    pub heights: Vec<f64>,
    /// Relative depth of the S² dip, held fixed across heights.
    pub depth: f64,
    pub b0: f64,
    pub length: f64,
    pub n: usize,
    pub radius: f64,
    /// Target `max_x ∫_{T_r(x)} |Rm|²`, reached by choosing the constant a0.
    pub epsilon: f64,
    pub cfl_safety: f64,
}

impl Default for SmoothingSweepSpec {
    fn default() -> Self {
        Self {
            heights: vec![10.0, 100.0, 1000.0],
            depth: 0.25,
            b0: 1.0,
            length: 2.0,
            n: 1024,
            radius: 0.25,
            epsilon: 1.0,
            cfl_safety: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMember {
    pub height: f64,
    pub a0: f64,
    pub tube_l2: f64,
    /// `sup |Ric(g0)|`, operator norm.
    pub k0: f64,
    pub horizon: f64,
    pub max_t_sup_rm: f64,
    pub max_t23_sup_ric: f64,
    pub final_time: f64,
    pub stop_reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub members: Vec<SweepMember>,
    /// `max / min` of `max t·sup|Rm|` across heights.
    pub spread: f64,
}

/// Bump metric of the given height with a0 chosen so the largest tube-L²
/// curvature equals `epsilon`. Returns the metric and its tube L².
pub fn calibrated_bump(
    spec: &SmoothingSweepSpec,
    height: f64,
    n: usize,
) -> Result<(WarpedMetric, f64)> {
    let grid = Grid::new(n, spec.length)?;
    let unit = sphere_bump(height, spec.depth, 1.0, spec.b0, grid)?;
    let tubes = TubeSet::new(&unit, spec.radius)?;
    let l2 = |m: &WarpedMetric| {
        tubes
            .integrals(m, &m.curvature().riem_norm_sq)
            .into_iter()
            .fold(0.0, f64::max)
    };
    let a0 = spec.epsilon / l2(&unit);
    let m = sphere_bump(height, spec.depth, a0, spec.b0, grid)?;
    let got = l2(&m);
    Ok((m, got))
}

/// Horizon `min(r², 1/K0)` and controls tracking bounds on `[0.01T, T]`.
pub fn smoothing_controls(m: &WarpedMetric, radius: f64, cfl_safety: f64) -> (f64, FlowControls) {
    let k0 = m.curvature().ric_operator_norm();
    let horizon = (radius * radius).min(1.0 / k0);
    let c = FlowControls {
        t_end: horizon,
        cfl_safety,
        bound_start: Some(0.01 * horizon),
        record_stride: 64,
        ..FlowControls::default()
    };
    (k0, c)
}

pub fn smoothing_member(
    spec: &SmoothingSweepSpec,
    height: f64,
    n: usize,
) -> Result<(SweepMember, FlowRun)> {
    let (m, tube_l2) = calibrated_bump(spec, height, n)?;
    let (k0, c) = smoothing_controls(&m, spec.radius, spec.cfl_safety);
    let run = run_flow(&m, &c)?;
    let r = &run.report;
    let member = SweepMember {
        height,
        a0: m.a()[0],
        tube_l2,
        k0,
        horizon: c.t_end,
        max_t_sup_rm: r.max_t_sup_rm,
        max_t23_sup_ric: r.max_t23_sup_ric,
        final_time: r.final_time,
        stop_reason: r.stop_reason.as_str().to_string(),
    };
    Ok((member, run))
}

pub fn smoothing_sweep(spec: &SmoothingSweepSpec) -> Result<SweepSummary> {
    let members: Vec<Result<SweepMember>> = spec
        .heights
        .par_iter()
        .map(|&h| smoothing_member(spec, h, spec.n).map(|(m, _)| m))
        .collect();
    let members = members.into_iter().collect::<Result<Vec<_>>>()?;
    let (lo, hi) = members.iter().fold((f64::INFINITY, 0.0f64), |(l, h), m| {
        (l.min(m.max_t_sup_rm), h.max(m.max_t_sup_rm))
    });
    Ok(SweepSummary {
        members,
        spread: hi / lo,
    })
}

/// Spatially constant data under the initial threshold on flat products of
/// several circle sizes: each run must outlive the guaranteed horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiccatiCase {
    pub a0: f64,
    pub eta: f64,
    pub sobolev: f64,
    pub covering: usize,
    pub predicted_blowup: f64,
    pub report: SmoothingReport,
}

pub const RICCATI_C0: f64 = 1.0;

fn flat_quadratic(a0: f64, radius: f64, n: usize) -> Result<QuadraticProblem> {
    let m = build_metric(
        &Profile::FlatProduct { a0, b0: 1.0 },
        Grid::new(n, 8.0 * radius)?,
    )?;
    let center = n / 2;
    let tube = tube_at(&m, center, radius)?;
    let sobolev = sobolev_estimate(&m, &tube, &SobolevControls::default())?.a;
    let covering = covering(&m, radius, center)?.len();
    Ok(QuadraticProblem {
        metric: m,
        f0: Vec::new(),
        c0: RICCATI_C0,
        sobolev,
        radius,
        horizon: 1.0,
        covering,
        samples: 100,
        dt_safety: 0.5,
    })
}

pub fn riccati_cases(a0s: &[f64], radius: f64, n: usize) -> Result<Vec<RiccatiCase>> {
    a0s.iter()
        .map(|&a0| {
            let mut qp = flat_quadratic(a0, radius, n)?;
            let tube = tube_at(&qp.metric, n / 2, radius)?;
            let vol = qp.metric.volume(Region::Tube(&tube));
            // at the threshold, scaled to the tube volume
            let eta = 1.0 / (6.0 * qp.c0 * qp.sobolev * vol.sqrt()) * (1.0 - 1e-9);
            qp.f0 = vec![eta; n];
            qp.horizon = 2.0 * qp.existence_horizon();
            let report = scalar_smoothing_check(&qp)?;
            Ok(RiccatiCase {
                a0,
                eta,
                sobolev: qp.sobolev,
                covering: qp.covering,
                predicted_blowup: 1.0 / (qp.c0 * eta),
                report,
            })
        })
        .collect()
}

/// Bump data `amp·threshold·φ/‖φ‖` at the given fractions of the initial
/// threshold; returns each run's report.
pub fn amplitude_sweep(amplitudes: &[f64], radius: f64, n: usize) -> Result<Vec<SmoothingReport>> {
    let base = flat_quadratic(1.0, radius, n)?;
    let grid = *base.metric.grid();
    let tubes = TubeSet::new(&base.metric, radius)?;
    let width = 0.3 * radius;
    let bump: Vec<f64> = (0..n)
        .map(|i| {
            let x = (grid.coord(i) - 0.5 * grid.period_length()) / width;
            (-0.5 * x * x).exp()
        })
        .collect();
    let sq: Vec<f64> = bump.iter().map(|v| v * v).collect();
    let norm = tubes
        .integrals(&base.metric, &sq)
        .into_iter()
        .fold(0.0, f64::max)
        .sqrt();
    let threshold = 1.0 / (6.0 * base.c0 * base.sobolev);
    amplitudes
        .iter()
        .map(|&amp| {
            if !(amp > 0.0 && amp <= 1.0) {
                return Err(Error::InvalidParameter {
                    name: "amplitudes",
                    reason: "must lie in (0, 1]",
                });
            }
            let mut qp = base.clone();
            qp.f0 = bump.iter().map(|v| amp * threshold * v / norm).collect();
            qp.horizon = qp.existence_horizon();
            scalar_smoothing_check(&qp)
        })
        .collect()
}
