//! Ricci flow `∂g/∂t = −2 Ric(g)` for the doubly warped ansatz.
//!
//! With primes the arclength derivative, the flow reads
//!
//! ```text
//! ∂w/∂t = w (a''/a + 2 b''/b)
//! ∂a/∂t = a'' + 2 a'b'/b
//! ∂b/∂t = b'' + a'b'/a − (1 − b'²)/b
//! ```
//!
//! i.e. `∂_t log w = −Ric_rr`, `∂_t log a = −Ric_θθ`, `∂_t log b = −Ric_SS` on
//! unit vectors. No DeTurck term and no reparametrization: the `g_ss`
//! component is evolved as is, so the ratios `g(t)/g(0)` are the ones the
//! metric-equivalence condition bounds.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result, Warp};
use crate::geometry::{CurvatureField, TubeSet, WarpedMetric};
use crate::math;

/// Time derivatives of the three warps.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRates {
    pub dw: Vec<f64>,
    pub da: Vec<f64>,
    pub db: Vec<f64>,
}

pub fn flow_rhs(m: &WarpedMetric) -> FlowRates {
    let (da1, da2) = m.radial_derivatives(m.a());
    let (db1, db2) = m.radial_derivatives(m.b());
    let n = m.grid().n();
    let mut out = FlowRates {
        dw: Vec::with_capacity(n),
        da: Vec::with_capacity(n),
        db: Vec::with_capacity(n),
    };
    for i in 0..n {
        let (w, a, b) = (m.w()[i], m.a()[i], m.b()[i]);
        out.dw.push(w * (da2[i] / a + 2.0 * db2[i] / b));
        out.da.push(da2[i] + 2.0 * da1[i] * db1[i] / b);
        out.db
            .push(db2[i] + da1[i] * db1[i] / a - (1.0 - db1[i] * db1[i]) / b);
    }
    out
}

/// `safety · min (w ds)² / 4`, capped by `safety / (1 + sup|Rm|)`.
pub fn cfl_dt(m: &WarpedMetric, safety: f64) -> f64 {
    cfl_dt_with(m, &m.curvature(), safety)
}

fn cfl_dt_with(m: &WarpedMetric, curv: &CurvatureField, safety: f64) -> f64 {
    let ds = m.grid().ds();
    let min_w = math::min_of(m.w());
    let diffusion = safety * (min_w * ds) * (min_w * ds) / 4.0;
    let reaction = safety / (1.0 + curv.sup_rm());
    diffusion.min(reaction)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RejectReason {
    /// dt exceeded `cfl_dt(m, 1)`.
    Cfl {
        dt: f64,
        limit: f64,
    },
    NonPositive {
        component: Warp,
        index: usize,
    },
    NonFinite,
}

/// A step that could not be taken; carries the state before the step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRejected {
    pub previous: Box<WarpedMetric>,
    pub reason: RejectReason,
}

fn advance(
    m: &WarpedMetric,
    rates: &FlowRates,
    dt: f64,
) -> core::result::Result<WarpedMetric, RejectReason> {
    let step = |base: &[f64],
                rate: &[f64],
                component: Warp|
     -> core::result::Result<Vec<f64>, RejectReason> {
        let mut out = Vec::with_capacity(base.len());
        for (index, (x, r)) in base.iter().zip(rate).enumerate() {
            let v = x + dt * r;
            if !v.is_finite() {
                return Err(RejectReason::NonFinite);
            }
            if v <= 0.0 {
                return Err(RejectReason::NonPositive { component, index });
            }
            out.push(v);
        }
        Ok(out)
    };
    let w = step(m.w(), &rates.dw, Warp::W)?;
    let a = step(m.a(), &rates.da, Warp::A)?;
    let b = step(m.b(), &rates.db, Warp::B)?;
    WarpedMetric::new(*m.grid(), w, a, b, m.time() + dt).map_err(|_| RejectReason::NonFinite)
}

fn midpoint_step(m: &WarpedMetric, dt: f64) -> core::result::Result<WarpedMetric, StepRejected> {
    let reject = |reason| StepRejected {
        previous: Box::new(m.clone()),
        reason,
    };
    let half = advance(m, &flow_rhs(m), 0.5 * dt).map_err(reject)?;
    let k2 = flow_rhs(&half);
    advance(m, &k2, dt).map_err(reject)
}

/// One explicit midpoint step. Requires `0 ≤ dt ≤ cfl_dt(m, 1)`.
pub fn flow_step(m: &WarpedMetric, dt: f64) -> core::result::Result<WarpedMetric, StepRejected> {
    if dt == 0.0 {
        return Ok(m.clone());
    }
    let limit = cfl_dt(m, 1.0);
    if !(dt > 0.0 && dt <= limit) {
        return Err(StepRejected {
            previous: Box::new(m.clone()),
            reason: RejectReason::Cfl { dt, limit },
        });
    }
    midpoint_step(m, dt)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct FlowControls {
    pub t_end: f64,
    /// In (0, 1).
    pub cfl_safety: f64,
    pub max_steps: usize,
    /// Bound on warp ratios `max(x/x0, x0/x)`, x ∈ {w, a, b}.
    pub equivalence_limit: f64,
    /// Stop the run the first time the equivalence limit is exceeded.
    /// Otherwise the violation is only recorded.
    pub stop_on_equivalence: bool,
    pub snapshot_times: Vec<f64>,
    /// Radius of the tubes (built at t = 0) for L² curvature and
    /// concentration tracking. None disables both trackers.
    pub track_radius: Option<f64>,
    /// Record a sample every this many accepted steps (maxima use every step).
    pub record_stride: usize,
    /// Start of the window for the t·sup|Rm| and t^{2/3}·sup|Ric| maxima.
    /// Defaults to the first snapshot time, else 0.01·t_end.
    pub bound_start: Option<f64>,
    /// Smallest step tried before declaring the state singular.
    pub dt_min: f64,
}

impl Default for FlowControls {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            cfl_safety: 0.25,
            max_steps: 10_000_000,
            equivalence_limit: 2.0,
            stop_on_equivalence: false,
            snapshot_times: Vec::new(),
            track_radius: None,
            record_stride: 1,
            bound_start: None,
            dt_min: 1e-12,
        }
    }
}

impl FlowControls {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end", "must be positive and finite");
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety < 1.0) {
            return bad("cfl_safety", "must lie in (0, 1)");
        }
        if !(self.equivalence_limit > 1.0) {
            return bad("equivalence_limit", "must exceed 1");
        }
        if self.record_stride == 0 {
            return bad("record_stride", "must be at least 1");
        }
        if !(self.dt_min > 0.0) {
            return bad("dt_min", "must be positive");
        }
        if self
            .snapshot_times
            .iter()
            .any(|t| !(t.is_finite() && *t >= 0.0))
        {
            return bad("snapshot_times", "must be finite and nonnegative");
        }
        Ok(())
    }

    pub fn bound_window_start(&self) -> f64 {
        self.bound_start
            .or_else(|| {
                self.snapshot_times
                    .iter()
                    .copied()
                    .filter(|&t| t > 0.0)
                    .fold(None, |acc: Option<f64>, t| {
                        Some(acc.map_or(t, |a| a.min(t)))
                    })
            })
            .unwrap_or(0.01 * self.t_end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StopReason {
    ReachedTEnd,
    EquivalenceViolated,
    StepLimit,
    NonfiniteState,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::ReachedTEnd => "reached_t_end",
            StopReason::EquivalenceViolated => "equivalence_violated",
            StopReason::StepLimit => "step_limit",
            StopReason::NonfiniteState => "nonfinite_state",
        }
    }
}

/// Tracked quantities at one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundSample {
    pub t: f64,
    pub sup_rm: f64,
    pub sup_ric: f64,
    pub t_sup_rm: f64,
    pub t23_sup_ric: f64,
    pub equivalence: f64,
    pub volume: f64,
    /// `max_x ∫_{T_r(x)} |Rm|²`.
    pub max_tube_l2: Option<f64>,
    /// `max_x r⁴/Vol(T_r(x)) · ∫_{T_r(x)} |Rm|²`.
    pub max_concentration: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundReport {
    pub samples: Vec<BoundSample>,
    /// `max t·sup|Rm|` over accepted steps with t ≥ `bound_start`.
    pub max_t_sup_rm: f64,
    /// `max t^{2/3}·sup|Ric|` over the same window.
    pub max_t23_sup_ric: f64,
    pub bound_start: f64,
    pub max_equivalence: f64,
    pub equivalence_first_violation: Option<f64>,
    pub stop_reason: StopReason,
    pub final_time: f64,
    pub steps: usize,
    pub rejected_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    /// The initial metric followed by one metric per reached snapshot time.
    pub snapshots: Vec<WarpedMetric>,
    pub final_state: WarpedMetric,
}

#[derive(Debug, Clone)]
pub struct FlowRun {
    pub trajectory: FlowTrajectory,
    pub report: BoundReport,
}

impl FlowRun {
    /// Time the solution was continued to before stopping.
    pub fn existence_time(&self) -> f64 {
        self.report.final_time
    }
}

/// `max_i max(x/x0, x0/x)` over the three warps.
pub fn equivalence_ratio(m: &WarpedMetric, m0: &WarpedMetric) -> f64 {
    let ratio = |x: &[f64], x0: &[f64]| {
        x.iter()
            .zip(x0)
            .map(|(v, v0)| (v / v0).max(v0 / v))
            .fold(1.0, f64::max)
    };
    ratio(m.w(), m0.w())
        .max(ratio(m.a(), m0.a()))
        .max(ratio(m.b(), m0.b()))
}

struct Tracker<'a> {
    m0: &'a WarpedMetric,
    tubes: Option<TubeSet>,
}

impl Tracker<'_> {
    fn sample(&self, m: &WarpedMetric, curv: &CurvatureField) -> BoundSample {
        let t = m.time();
        let (sup_rm, sup_ric) = (curv.sup_rm(), curv.sup_ric());
        let (max_tube_l2, max_concentration) = match &self.tubes {
            Some(set) => {
                let l2 = set.integrals(m, &curv.riem_norm_sq);
                let vol = set.volumes(m);
                let r4 = math::powi(set.radius(), 4);
                let conc = l2
                    .iter()
                    .zip(&vol)
                    .map(|(l, v)| if *v > 0.0 { r4 / v * l } else { 0.0 })
                    .fold(0.0, f64::max);
                (Some(l2.iter().copied().fold(0.0, f64::max)), Some(conc))
            }
            None => (None, None),
        };
        BoundSample {
            t,
            sup_rm,
            sup_ric,
            t_sup_rm: t * sup_rm,
            t23_sup_ric: math::powf(t, 2.0 / 3.0) * sup_ric,
            equivalence: equivalence_ratio(m, self.m0),
            volume: m.volume(crate::Region::Whole),
            max_tube_l2,
            max_concentration,
        }
    }
}

/// Integrates the flow from `m0` until `t_end` or a stop condition, tracking
/// curvature bounds, metric equivalence and (optionally) tube curvature.
pub fn run_flow(m0: &WarpedMetric, c: &FlowControls) -> Result<FlowRun> {
    c.validate()?;
    let tubes = c.track_radius.map(|r| TubeSet::new(m0, r)).transpose()?;
    let tracker = Tracker { m0, tubes };
    let bound_start = c.bound_window_start();

    let mut pending: Vec<f64> = c
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t > m0.time() && t <= c.t_end)
        .collect();
    pending.sort_by(f64::total_cmp);
    pending.dedup();
    let mut pending = pending.into_iter().peekable();

    let mut m = m0.clone();
    let mut curv = m.curvature();
    let mut snapshots = alloc::vec![m0.clone()];
    let mut samples = alloc::vec![tracker.sample(&m, &curv)];
    let mut max_t_sup_rm: f64 = 0.0;
    let mut max_t23_sup_ric: f64 = 0.0;
    let mut max_equivalence: f64 = 1.0;
    let mut first_violation = None;
    let (mut steps, mut rejected) = (0usize, 0usize);
    let mut last_recorded = 0usize;

    let stop_reason = loop {
        let t = m.time();
        if t >= c.t_end {
            break StopReason::ReachedTEnd;
        }
        if steps >= c.max_steps {
            break StopReason::StepLimit;
        }
        let target = pending.peek().copied().unwrap_or(c.t_end).min(c.t_end);
        if target - t <= 1e-14 * target.max(1.0) {
            // Already at the target up to roundoff.
            m = m.with_time(target);
            if pending.peek() == Some(&target) {
                pending.next();
                snapshots.push(m.clone());
            }
            continue;
        }
        let mut dt = cfl_dt_with(&m, &curv, c.cfl_safety);
        if !(dt.is_finite() && dt >= c.dt_min) {
            break StopReason::NonfiniteState;
        }
        let mut land = false;
        if t + dt >= target {
            dt = target - t;
            land = true;
        }
        let next = loop {
            match midpoint_step(&m, dt) {
                Ok(next) => break Some(next),
                Err(_) => {
                    rejected += 1;
                    dt *= 0.5;
                    land = false;
                    if dt < c.dt_min {
                        break None;
                    }
                }
            }
        };
        let Some(next) = next else {
            break StopReason::NonfiniteState;
        };
        m = if land { next.with_time(target) } else { next };
        steps += 1;
        curv = m.curvature();
        if curv.riem_norm_sq.iter().any(|v| !v.is_finite()) {
            break StopReason::NonfiniteState;
        }

        let now = m.time();
        if now >= bound_start {
            max_t_sup_rm = max_t_sup_rm.max(now * curv.sup_rm());
            max_t23_sup_ric = max_t23_sup_ric.max(math::powf(now, 2.0 / 3.0) * curv.sup_ric());
        }
        let eq = equivalence_ratio(&m, m0);
        max_equivalence = max_equivalence.max(eq);
        if land && pending.peek() == Some(&target) {
            pending.next();
            snapshots.push(m.clone());
        }
        if steps % c.record_stride == 0 {
            samples.push(tracker.sample(&m, &curv));
            last_recorded = steps;
        }
        if eq > c.equivalence_limit && first_violation.is_none() {
            first_violation = Some(now);
            if c.stop_on_equivalence {
                break StopReason::EquivalenceViolated;
            }
        }
    };
    if last_recorded != steps {
        samples.push(tracker.sample(&m, &curv));
    }

    Ok(FlowRun {
        report: BoundReport {
            samples,
            max_t_sup_rm,
            max_t23_sup_ric,
            bound_start,
            max_equivalence,
            equivalence_first_violation: first_violation,
            stop_reason,
            final_time: m.time(),
            steps,
            rejected_steps: rejected,
        },
        trajectory: FlowTrajectory {
            snapshots,
            final_state: m,
        },
    })
}

/// Largest normalized mismatch between the observed rate of change of the
/// volume element across snapshots (centered differences) and the rate
/// `−R·dV` the flow predicts.
pub fn dvol_residual(trajectory: &FlowTrajectory) -> Result<f64> {
    dvol_residual_against(&trajectory.snapshots, |m| {
        m.curvature().scalar.iter().map(|r| -r).collect()
    })
}

/// As [`dvol_residual`] with an arbitrary predicted `∂_t log dV`.
pub fn dvol_residual_against<F>(snapshots: &[WarpedMetric], predicted_log_rate: F) -> Result<f64>
where
    F: Fn(&WarpedMetric) -> Vec<f64>,
{
    if snapshots.len() < 3 {
        return Err(Error::TooFewSnapshots {
            need: 3,
            got: snapshots.len(),
        });
    }
    let density = |m: &WarpedMetric| -> Vec<f64> {
        (0..m.grid().n())
            .map(|i| m.w()[i] * m.a()[i] * m.b()[i] * m.b()[i])
            .collect()
    };
    let mut worst: f64 = 0.0;
    for k in 1..snapshots.len() - 1 {
        let (prev, cur, next) = (&snapshots[k - 1], &snapshots[k], &snapshots[k + 1]);
        let span = next.time() - prev.time();
        let (dp, dc, dn) = (density(prev), density(cur), density(next));
        let rate = predicted_log_rate(cur);
        for i in 0..dc.len() {
            let observed = (dn[i] - dp[i]) / span;
            worst = worst.max(math::abs(observed - rate[i] * dc[i]) / dc[i]);
        }
    }
    Ok(worst)
}

/// Smallest c with `∂_t dV ≤ c·|Rm|·dV` along the snapshots, i.e.
/// `max(−R/|Rm|)` over points with nonzero curvature. Measures the constant
/// of the volume-growth condition when the potential is |Rm|.
pub fn volume_growth_constant(snapshots: &[WarpedMetric]) -> f64 {
    snapshots
        .iter()
        .flat_map(|m| {
            let c = m.curvature();
            (0..c.len())
                .filter(|&i| c.riem_norm_sq[i] > 0.0)
                .map(|i| -c.scalar[i] / math::sqrt(c.riem_norm_sq[i]))
                .collect::<Vec<_>>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
