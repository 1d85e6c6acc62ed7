//! The calibration suite: flows over bump heights and collapse factors whose
//! suprema give candidate values for the unnamed constants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use warpflow_core::analysis::{ball_comparability, covering};
use warpflow_core::flow::{run_flow, volume_growth_constant, FlowControls};
use warpflow_core::{build_metric, Grid, Profile, Result, WarpedMetric};

use super::families::fourier;
use super::geometry::sobolev_volume_ratio;
use super::moser::calibrate_kernel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSpec {
    pub heights: Vec<f64>,
    pub collapse_factors: Vec<f64>,
    /// One seeded warped metric per collapse factor.
    pub seed: u64,
    pub n: usize,
    pub length: f64,
    pub radius: f64,
    pub depth: f64,
    /// Overall parabolic scale λ applied to every member (g → λ²g, r → λr).
    pub scale: f64,
    pub heat_problems: usize,
    pub heat_n: usize,
}

impl Default for CalibrationSpec {
    fn default() -> Self {
        Self {
            heights: vec![10.0, 30.0, 100.0],
            collapse_factors: vec![1.0, 0.1, 0.01],
            seed: 0,
            n: 256,
            length: 2.0,
            radius: 0.25,
            depth: 0.25,
            scale: 1.0,
            heat_problems: 30,
            heat_n: 128,
        }
    }
}

impl CalibrationSpec {
    /// Member id and initial profile, sorted by id.
    pub fn members(&self) -> Vec<(String, Profile)> {
        let mut out = Vec::new();
        for &h in &self.heights {
            for &f in &self.collapse_factors {
                out.push((
                    format!("bump_h{h}_a{f}"),
                    Profile::Bump {
                        center: 0.5 * self.length,
                        height: h,
                        width: (self.depth / h).sqrt(),
                        a0: f,
                        b0: 1.0,
                    },
                ));
            }
        }
        for (k, &f) in self.collapse_factors.iter().enumerate() {
            let s = self
                .seed
                .wrapping_add(k as u64)
                .wrapping_mul(0x9E37_79B9_7F4A_7C15);
            out.push((
                format!("warped_seed{}_a{f}", self.seed.wrapping_add(k as u64)),
                Profile::Warped {
                    w: fourier(1.0, 0.2, 3, s),
                    a: fourier(0.7 * f, 0.2, 3, s ^ 0xA),
                    b: fourier(1.3, 0.2, 3, s ^ 0xB),
                },
            ));
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        out
    }

    pub fn metric(&self, profile: &Profile, n: usize) -> Result<WarpedMetric> {
        let m = build_metric(profile, Grid::new(n, self.length)?)?;
        Ok(if self.scale == 1.0 {
            m
        } else {
            m.scaled(self.scale)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberConstants {
    pub id: String,
    pub horizon: f64,
    pub stop_reason: String,
    /// `sup_{t ∈ [0.01T, T]} t·sup|Rm|`.
    pub smoothing: f64,
    /// `sup_{t ∈ [0.01T, T]} t^{2/3}·sup|Ric|`.
    pub ricci_decay: f64,
    /// Best c with `∂_t dV ≤ c |Rm| dV` along the run.
    pub volume_growth: f64,
    /// `A/(r⁴/Vol)^{1/2}` at the middle tube of g0.
    pub sobolev_ratio: f64,
    pub covering_n: usize,
    pub comparability: f64,
}

pub fn measure_member(
    spec: &CalibrationSpec,
    id: &str,
    profile: &Profile,
    n: usize,
) -> Result<MemberConstants> {
    let m = spec.metric(profile, n)?;
    let r = spec.radius * spec.scale;
    let k0 = m.curvature().ric_operator_norm();
    let horizon = (r * r).min(1.0 / k0);
    let c = FlowControls {
        t_end: horizon,
        bound_start: Some(0.01 * horizon),
        snapshot_times: (1..=8).map(|k| horizon * k as f64 / 8.0).collect(),
        record_stride: 64,
        ..FlowControls::default()
    };
    let run = run_flow(&m, &c)?;
    let (_, _, sobolev_ratio) = sobolev_volume_ratio(&m, n / 2, r)?;
    let mut covering_n = 0;
    for center in 0..n {
        covering_n = covering_n.max(covering(&m, r, center)?.len());
    }
    Ok(MemberConstants {
        id: id.to_string(),
        horizon,
        stop_reason: run.report.stop_reason.as_str().to_string(),
        smoothing: run.report.max_t_sup_rm,
        ricci_decay: run.report.max_t23_sup_ric,
        volume_growth: volume_growth_constant(&run.trajectory.snapshots),
        sobolev_ratio,
        covering_n,
        comparability: ball_comparability(&m, r)?,
    })
}

/// Every member measured at resolution n, in id order.
pub fn measure_suite(spec: &CalibrationSpec, n: usize) -> Result<Vec<MemberConstants>> {
    let members = spec.members();
    let out: Vec<Result<MemberConstants>> = members
        .par_iter()
        .map(|(id, p)| measure_member(spec, id, p, n))
        .collect();
    out.into_iter().collect()
}

/// Suprema over the members (and the heat suite for the kernel constant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConstants {
    pub kernel: Option<f64>,
    pub smoothing: f64,
    pub ricci_decay: f64,
    pub volume_growth: f64,
    pub sobolev_ratio: f64,
    pub covering_n: usize,
    pub comparability: f64,
}

impl SuiteConstants {
    pub fn fold(members: &[MemberConstants], kernel: Option<f64>) -> Self {
        let max = |f: fn(&MemberConstants) -> f64| {
            members.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
        };
        Self {
            kernel,
            smoothing: max(|m| m.smoothing),
            ricci_decay: max(|m| m.ricci_decay),
            volume_growth: max(|m| m.volume_growth),
            sobolev_ratio: max(|m| m.sobolev_ratio),
            covering_n: members.iter().map(|m| m.covering_n).max().unwrap_or(0),
            comparability: max(|m| m.comparability),
        }
    }

    /// Named values, in a fixed order.
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![
            ("smoothing_t_sup_rm", self.smoothing),
            ("ricci_decay_t23_sup_ric", self.ricci_decay),
            ("volume_growth_c", self.volume_growth),
            ("sobolev_volume_ratio", self.sobolev_ratio),
            ("covering_n", self.covering_n as f64),
            ("ball_comparability", self.comparability),
        ];
        if let Some(k) = self.kernel {
            v.insert(0, ("sup_bound_kernel_c", k));
        }
        v
    }
}

pub fn calibrate_suite(spec: &CalibrationSpec) -> Result<(Vec<MemberConstants>, SuiteConstants)> {
    let members = measure_suite(spec, spec.n)?;
    let kernel = if spec.heat_problems > 0 {
        Some(calibrate_kernel(
            spec.seed,
            spec.heat_problems,
            spec.heat_n,
        )?)
    } else {
        None
    };
    let constants = SuiteConstants::fold(&members, kernel);
    Ok((members, constants))
}
