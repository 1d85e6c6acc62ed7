//! Collapse indifference: shrinking the circle factor leaves the flow of the
//! other warps, the existence time and every dimensionless tracker unchanged.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use warpflow_core::flow::{run_flow, FlowControls, FlowRun};
use warpflow_core::{Grid, Result, WarpedMetric};

use super::families::{random_warped, sphere_bump};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollapseSpec {
    pub factors: Vec<f64>,
    pub n: usize,
    pub length: f64,
    pub bump_height: f64,
    pub bump_depth: f64,
    /// Seed of the family with non-constant circle warp.
    pub seed: u64,
    pub radius: f64,
    pub equivalence_limit: f64,
    pub t_end: f64,
}

impl Default for CollapseSpec {
    fn default() -> Self {
        Self {
            factors: vec![1.0, 0.1, 0.01],
            n: 128,
            length: 2.0,
            bump_height: 10.0,
            bump_depth: 0.25,
            seed: 0,
            radius: 0.25,
            equivalence_limit: 2.0,
            t_end: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseMember {
    pub family: &'static str,
    pub factor: f64,
    pub existence_time: f64,
    pub steps: usize,
    pub stop_reason: String,
    pub max_t_sup_rm: f64,
    pub max_equivalence: f64,
    pub max_concentration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseSummary {
    pub members: Vec<CollapseMember>,
    /// Largest relative difference of any tracker sample from the factor-1
    /// run, constant circle warp.
    pub constant_tracker_deviation: f64,
    /// `(max − min)/max` of existence times, constant circle warp.
    pub constant_time_variation: f64,
    pub nonconstant_tracker_deviation: f64,
    pub nonconstant_time_variation: f64,
}

impl CollapseSummary {
    /// Identical to roundoff for the constant family, within 10% for the other.
    pub fn holds(&self) -> bool {
        self.constant_tracker_deviation < 1e-10
            && self.constant_time_variation < 1e-10
            && self.nonconstant_time_variation < 0.1
    }
}

fn controls(spec: &CollapseSpec) -> FlowControls {
    FlowControls {
        t_end: spec.t_end,
        equivalence_limit: spec.equivalence_limit,
        stop_on_equivalence: true,
        track_radius: Some(spec.radius),
        record_stride: 16,
        ..FlowControls::default()
    }
}

pub fn collapse_bases(spec: &CollapseSpec) -> Result<[(&'static str, WarpedMetric); 2]> {
    let grid = Grid::new(spec.n, spec.length)?;
    Ok([
        (
            "constant",
            sphere_bump(spec.bump_height, spec.bump_depth, 1.0, 1.0, grid)?,
        ),
        (
            "nonconstant",
            random_warped(spec.seed, spec.n, spec.length, 0.2)?,
        ),
    ])
}

fn rel(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        (x - y).abs() / x.abs().max(y.abs())
    }
}

/// Largest relative difference between the tracker samples of two runs;
/// infinite when the step counts differ.
pub fn tracker_deviation(x: &FlowRun, y: &FlowRun) -> f64 {
    let (rx, ry) = (&x.report, &y.report);
    if rx.steps != ry.steps || rx.samples.len() != ry.samples.len() {
        return f64::INFINITY;
    }
    rx.samples
        .iter()
        .zip(&ry.samples)
        .map(|(a, b)| {
            let conc = match (a.max_concentration, b.max_concentration) {
                (Some(u), Some(v)) => rel(u, v),
                _ => 0.0,
            };
            rel(a.t, b.t)
                .max(rel(a.t_sup_rm, b.t_sup_rm))
                .max(rel(a.equivalence, b.equivalence))
                .max(conc)
        })
        .fold(rel(rx.final_time, ry.final_time), f64::max)
}

pub fn collapse_sweep(spec: &CollapseSpec) -> Result<(CollapseSummary, Vec<FlowRun>)> {
    let bases = collapse_bases(spec)?;
    let c = controls(spec);
    let jobs: Vec<(&'static str, f64, WarpedMetric)> = bases
        .iter()
        .flat_map(|(family, m)| {
            spec.factors
                .iter()
                .map(move |&f| (*family, f, m.with_circle_scaled(f)))
        })
        .collect();
    let runs: Vec<Result<FlowRun>> = jobs.par_iter().map(|(_, _, m)| run_flow(m, &c)).collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let members: Vec<CollapseMember> = jobs
        .iter()
        .zip(&runs)
        .map(|((family, factor, _), run)| {
            let r = &run.report;
            CollapseMember {
                family,
                factor: *factor,
                existence_time: run.existence_time(),
                steps: r.steps,
                stop_reason: r.stop_reason.as_str().to_string(),
                max_t_sup_rm: r.max_t_sup_rm,
                max_equivalence: r.max_equivalence,
                max_concentration: r
                    .samples
                    .iter()
                    .filter_map(|s| s.max_concentration)
                    .fold(0.0, f64::max),
            }
        })
        .collect();
    let k = spec.factors.len();
    let family_stats = |block: usize| {
        let group = &runs[block * k..(block + 1) * k];
        let dev = group[1..]
            .iter()
            .map(|r| tracker_deviation(&group[0], r))
            .fold(0.0, f64::max);
        let times: Vec<f64> = group.iter().map(FlowRun::existence_time).collect();
        let (lo, hi) = times
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), &t| (l.min(t), h.max(t)));
        (dev, (hi - lo) / hi)
    };
    let (constant_tracker_deviation, constant_time_variation) = family_stats(0);
    let (nonconstant_tracker_deviation, nonconstant_time_variation) = family_stats(1);
    Ok((
        CollapseSummary {
            members,
            constant_tracker_deviation,
            constant_time_variation,
            nonconstant_tracker_deviation,
            nonconstant_time_variation,
        },
        runs,
    ))
}
