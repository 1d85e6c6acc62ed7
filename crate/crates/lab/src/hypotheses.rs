//! Initial-metric hypothesis checks: tube-L² curvature against ε and the
//! pointwise Ricci bound against K.

use serde::Serialize;
use warpflow_core::analysis::concentration_scan;
use warpflow_core::{Grid, TubeSet, WarpedMetric};

use crate::error::{LabError, Result};
use crate::suites::families::sphere_bump;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub radius: f64,
    pub epsilon: f64,
    pub k: f64,
    /// `max_x ∫_{T_r(x)} |Rm|²` and where it is attained.
    pub max_tube_l2: f64,
    pub worst_center_l2: usize,
    /// `max_x |Ric|` (operator norm) and where it is attained.
    pub max_ric: f64,
    pub worst_center_ric: usize,
    pub l2_holds: bool,
    pub ric_holds: bool,
    /// `max_x r⁴/Vol(T_r(x)) · ∫|Rm|²` against the same ε.
    pub max_concentration: f64,
    pub concentration_holds: bool,
    pub passed: bool,
    /// `c1 · min(r², 1/K)`.
    pub predicted_horizon: f64,
}

fn argmax(v: impl Iterator<Item = f64>) -> (usize, f64) {
    v.enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, x)| if x > acc.1 { (i, x) } else { acc },
    )
}

pub fn check_hypotheses(
    m0: &WarpedMetric,
    r: f64,
    epsilon: f64,
    k: f64,
    c1: f64,
) -> Result<Verdict> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(LabError::config(
            "scan.radius",
            "hypothesis checks need 0 < r ≤ 1",
        ));
    }
    let c = m0.curvature();
    let tubes = TubeSet::new(m0, r)?;
    let (worst_center_l2, max_tube_l2) = argmax(tubes.integrals(m0, &c.riem_norm_sq).into_iter());
    let (worst_center_ric, max_ric) = argmax((0..c.len()).map(|i| c.ric_operator_norm_at(i)));
    let max_concentration = concentration_scan(m0, r)?[0].max_ratio;
    let l2_holds = max_tube_l2 <= epsilon;
    let ric_holds = max_ric <= k;
    Ok(Verdict {
        radius: r,
        epsilon,
        k,
        max_tube_l2,
        worst_center_l2,
        max_ric,
        worst_center_ric,
        l2_holds,
        ric_holds,
        max_concentration,
        concentration_holds: max_concentration <= epsilon,
        passed: l2_holds && ric_holds,
        predicted_horizon: c1 * (r * r).min(1.0 / k),
    })
}

/// Bump height at which the tube-L² bound ε is first exceeded, by bisection
/// on log h over `[lo, hi]`; None when the bound holds or fails throughout.
pub fn epsilon_failure_height(
    grid: Grid,
    depth: f64,
    a0: f64,
    r: f64,
    epsilon: f64,
    (lo, hi): (f64, f64),
) -> Result<Option<f64>> {
    let exceeds = |h: f64| -> Result<bool> {
        let m = sphere_bump(h, depth, a0, 1.0, grid)?;
        Ok(check_hypotheses(&m, r, epsilon, f64::INFINITY, 1.0)?.max_tube_l2 > epsilon)
    };
    if exceeds(lo)? || !exceeds(hi)? {
        return Ok(None);
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if exceeds(mid.exp())? {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Some(b.exp()))
}
