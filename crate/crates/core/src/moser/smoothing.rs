use alloc::vec;
use alloc::vec::Vec;

use super::constants;
use super::heat::integrate;
use crate::error::{Error, Result};
use crate::geometry::{TubeSet, WarpedMetric};
use crate::math;

/// `∂f/∂t = Δf + C₀ f²` with the data of the quadratic smoothing estimate.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    pub metric: WarpedMetric,
    pub f0: Vec<f64>,
    pub c0: f64,
    /// Sobolev constant of the r-tubes.
    pub sobolev: f64,
    pub radius: f64,
    pub horizon: f64,
    /// Covering number of the 2r-tube by r-tubes.
    pub covering: usize,
    pub samples: usize,
    pub dt_safety: f64,
}

impl QuadraticProblem {
    fn validate(&self) -> Result<()> {
        let n = self.metric.grid().n();
        if self.f0.len() != n {
            return Err(Error::LengthMismatch {
                component: "f0",
                expected: n,
                got: self.f0.len(),
            });
        }
        if self.f0.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "f0",
                reason: "must be finite and nonnegative",
            });
        }
        let ok = self.c0 > 0.0 && self.sobolev > 0.0 && self.radius > 0.0 && self.horizon > 0.0;
        if !ok || self.covering == 0 || self.samples == 0 {
            return Err(Error::InvalidParameter {
                name: "quadratic problem",
                reason: "c0, sobolev, radius, horizon, covering and samples must be positive",
            });
        }
        Ok(())
    }

    /// `C₂ r²` with `C₂ = 3/(32N)`.
    pub fn existence_horizon(&self) -> f64 {
        constants::c2(self.covering) * self.radius * self.radius
    }

    fn sample_times(&self) -> Vec<f64> {
        (0..=self.samples)
            .map(|k| self.horizon * k as f64 / self.samples as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SmoothingReport {
    /// `max_x ‖f₀‖_{L²(T_r(x))}`.
    pub initial_max_l2: f64,
    /// `(6 C₀ A)⁻¹`.
    pub initial_threshold: f64,
    pub hypotheses_hold: bool,
    /// `(3 C₀ A)⁻¹`.
    pub e0_threshold: f64,
    /// First sample time with `max_x ‖f(t)‖_{L²(T_r(x))}` above `e0_threshold`.
    pub e0_exceeded_at: Option<f64>,
    /// `min(T, C₂ r²)`.
    pub guaranteed_horizon: f64,
    /// `max t·sup f` over samples with `t ≤ guaranteed_horizon`.
    pub max_t_sup_f: f64,
    /// `max t·sup f` over all samples.
    pub max_t_sup_f_run: f64,
    pub final_time: f64,
    pub blowup_time: Option<f64>,
    pub reached_horizon: bool,
}

/// Solves the quadratic heat equation and tracks the quantities of the
/// scalar smoothing estimate. Blowup is a finding, reported with its time.
pub fn scalar_smoothing_check(qp: &QuadraticProblem) -> Result<SmoothingReport> {
    qp.validate()?;
    let m = &qp.metric;
    let tubes = TubeSet::new(m, qp.radius)?;
    let max_l2 = |f: &[f64]| {
        let f2: Vec<f64> = f.iter().map(|v| v * v).collect();
        math::sqrt(tubes.integrals(m, &f2).into_iter().fold(0.0, f64::max))
    };
    let initial_max_l2 = max_l2(&qp.f0);
    let initial_threshold = 1.0 / (6.0 * qp.c0 * qp.sobolev);
    let e0_threshold = 1.0 / (3.0 * qp.c0 * qp.sobolev);
    let guaranteed_horizon = qp.horizon.min(qp.existence_horizon());

    let c0 = qp.c0;
    let run = integrate(
        m,
        vec![qp.f0.clone()],
        &qp.sample_times(),
        qp.dt_safety,
        |_, s| vec![s[0].iter().map(|f| c0 * f).collect()],
    );
    let mut report = SmoothingReport {
        initial_max_l2,
        initial_threshold,
        hypotheses_hold: initial_max_l2 <= initial_threshold,
        e0_threshold,
        e0_exceeded_at: None,
        guaranteed_horizon,
        max_t_sup_f: 0.0,
        max_t_sup_f_run: 0.0,
        final_time: *run.times.last().unwrap_or(&0.0),
        blowup_time: run.blowup,
        reached_horizon: false,
    };
    for (t, fields) in run.times.iter().zip(&run.values) {
        let f = &fields[0];
        let tsup = t * math::max_of(f);
        report.max_t_sup_f_run = report.max_t_sup_f_run.max(tsup);
        if *t <= guaranteed_horizon {
            report.max_t_sup_f = report.max_t_sup_f.max(tsup);
        }
        if report.e0_exceeded_at.is_none() && max_l2(f) > e0_threshold {
            report.e0_exceeded_at = Some(*t);
        }
    }
    if let Some(tb) = run.blowup {
        report.final_time = tb;
    }
    report.reached_horizon = report.blowup_time.is_none_or(|tb| tb >= guaranteed_horizon)
        && report.final_time >= guaranteed_horizon;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayReport {
    /// `max t^{2/3} u(x,t) / (A^{2/3} (∫_{T_{3r}(x)} u₀³)^{1/3})` over samples
    /// and over centers whose 3r-tube carries some of u₀.
    pub max_ratio: f64,
    /// Centers skipped because u₀ vanishes on their 3r-tube.
    pub skipped_centers: usize,
    pub final_time: f64,
    pub blowup_time: Option<f64>,
}

/// Couples `∂u/∂t = Δu + c_u f u` to the quadratic problem's `f` and tracks
/// the `t^{-2/3}` decay ratio of u against its local cubic data.
pub fn coupled_decay_check(
    qp: &QuadraticProblem,
    u0: &[f64],
    coupling: f64,
) -> Result<DecayReport> {
    qp.validate()?;
    let m = &qp.metric;
    if u0.len() != m.grid().n() || u0.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "u0",
            reason: "must match the grid and be nonnegative",
        });
    }
    let wide = TubeSet::new(m, 3.0 * qp.radius)?;
    let u03: Vec<f64> = u0.iter().map(|v| v * v * v).collect();
    let scale = math::powf(qp.sobolev, 2.0 / 3.0);
    let denom: Vec<f64> = wide
        .integrals(m, &u03)
        .into_iter()
        .map(|s| scale * math::cbrt(s))
        .collect();
    let skipped_centers = denom.iter().filter(|&&d| d <= 0.0).count();

    let c0 = qp.c0;
    let run = integrate(
        m,
        vec![qp.f0.clone(), u0.to_vec()],
        &qp.sample_times(),
        qp.dt_safety,
        |_, s| {
            vec![
                s[0].iter().map(|f| c0 * f).collect(),
                s[0].iter().map(|f| coupling * f).collect(),
            ]
        },
    );
    let mut max_ratio: f64 = 0.0;
    for (t, fields) in run.times.iter().zip(&run.values) {
        let w = math::powf(*t, 2.0 / 3.0);
        for (u, d) in fields[1].iter().zip(&denom) {
            if *d > 0.0 {
                max_ratio = max_ratio.max(w * u / d);
            }
        }
    }
    Ok(DecayReport {
        max_ratio,
        skipped_centers,
        final_time: run.blowup.unwrap_or(*run.times.last().unwrap_or(&0.0)),
        blowup_time: run.blowup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_metric, Profile};
    use crate::Grid;

    fn problem(f0: Vec<f64>, horizon: f64) -> QuadraticProblem {
        let m = build_metric(
            &Profile::FlatProduct { a0: 1.0, b0: 1.0 },
            Grid::new(64, 8.0).unwrap(),
        )
        .unwrap();
        QuadraticProblem {
            metric: m,
            f0,
            c0: 1.0,
            sobolev: 1.0,
            radius: 0.5,
            horizon,
            covering: 5,
            samples: 50,
            dt_safety: 0.5,
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let r = scalar_smoothing_check(&problem(vec![0.0; 64], 1.0)).unwrap();
        assert_eq!(r.max_t_sup_f_run, 0.0);
        assert!(r.hypotheses_hold && r.reached_horizon && r.blowup_time.is_none());
        let d = coupled_decay_check(&problem(vec![0.0; 64], 1.0), &[0.0; 64], 1.0).unwrap();
        assert_eq!(d.max_ratio, 0.0);
        assert_eq!(d.skipped_centers, 64);
    }

    #[test]
    fn constant_data_blows_up_at_the_riccati_time() {
        let eta = 2.0;
        let r = scalar_smoothing_check(&problem(vec![eta; 64], 1.0)).unwrap();
        let tb = r.blowup_time.expect("blowup");
        assert!((tb - 0.5).abs() < 0.02, "{tb}");
        assert!(!r.hypotheses_hold);
    }

    #[test]
    fn pure_heat_decay_ratio_is_finite() {
        let u0: Vec<f64> = (0..64)
            .map(|i| if (28..36).contains(&i) { 1.0 } else { 0.0 })
            .collect();
        let d = coupled_decay_check(&problem(vec![0.0; 64], 1.0), &u0, 1.0).unwrap();
        assert!(d.max_ratio.is_finite() && d.max_ratio > 0.0);
    }
}
