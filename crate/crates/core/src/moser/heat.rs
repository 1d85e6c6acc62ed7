use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{Tube, WarpedMetric};
use crate::math;

/// The potential `u ≥ 0` of `∂f/∂t = Δf + u f`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Zero,
    Static(Vec<f64>),
    /// `profile · t^exponent`. Satisfies a cubic budget on `(0, T]` when
    /// `exponent ≥ −1/3`.
    PowerLaw {
        profile: Vec<f64>,
        exponent: f64,
    },
}

impl Potential {
    pub fn at(&self, t: f64, n: usize) -> Vec<f64> {
        match self {
            Potential::Zero => vec![0.0; n],
            Potential::Static(u) => u.clone(),
            Potential::PowerLaw { profile, exponent } => {
                let s = math::powf(t, *exponent);
                profile.iter().map(|u| u * s).collect()
            }
        }
    }

    fn profile(&self) -> Option<&[f64]> {
        match self {
            Potential::Zero => None,
            Potential::Static(u) | Potential::PowerLaw { profile: u, .. } => Some(u),
        }
    }
}

/// A linear heat problem `∂f/∂t = Δf + u f` on a fixed metric, with the
/// constants the inequality checks need.
#[derive(Debug, Clone)]
pub struct HeatProblem {
    pub metric: WarpedMetric,
    pub potential: Potential,
    pub f0: Vec<f64>,
    pub horizon: f64,
    /// Declared budget: `(∫_{tube} u³)^{1/3} ≤ μ t^{-1/3}`.
    pub mu: f64,
    /// Sobolev constant of the tube the checks run on.
    pub sobolev: f64,
    /// Volume-growth constant: `∂_t dV ≤ c·u·dV`. Zero on a fixed metric.
    pub volume_growth: f64,
    /// Number of uniform sampling intervals over `[0, horizon]`.
    pub samples: usize,
    /// Fraction of the monotone explicit step limit actually used.
    pub dt_safety: f64,
}

impl HeatProblem {
    pub fn new(metric: WarpedMetric, potential: Potential, f0: Vec<f64>, horizon: f64) -> Self {
        Self {
            metric,
            potential,
            f0,
            horizon,
            mu: 0.0,
            sobolev: 1.0,
            volume_growth: 0.0,
            samples: 100,
            dt_safety: 0.5,
        }
    }

    pub fn with_budget(mut self, mu: f64, sobolev: f64) -> Self {
        self.mu = mu;
        self.sobolev = sobolev;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.metric.grid().n();
        let check_len = |component, got: usize| {
            if got == n {
                Ok(())
            } else {
                Err(Error::LengthMismatch {
                    component,
                    expected: n,
                    got,
                })
            }
        };
        check_len("f0", self.f0.len())?;
        if let Some(u) = self.potential.profile() {
            check_len("potential", u.len())?;
            if u.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidParameter {
                    name: "potential",
                    reason: "must be finite and nonnegative",
                });
            }
        }
        if let Potential::PowerLaw { exponent, .. } = self.potential {
            if !(exponent >= -1.0 / 3.0) {
                return Err(Error::InvalidParameter {
                    name: "potential exponent",
                    reason: "below -1/3 no cubic budget can hold near t = 0",
                });
            }
        }
        if self.f0.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "f0",
                reason: "must be finite and nonnegative",
            });
        }
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: "must be positive and finite",
                })
            }
        };
        positive("horizon", self.horizon)?;
        positive("sobolev", self.sobolev)?;
        if !(self.mu >= 0.0 && self.volume_growth >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: "budget constants must be nonnegative",
            });
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter {
                name: "samples",
                reason: "need at least one interval",
            });
        }
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "dt_safety",
                reason: "must lie in (0, 1]",
            });
        }
        Ok(())
    }

    /// `max_k ‖u(t_k)‖_{3,tube} t_k^{1/3} / μ` over the given positive times;
    /// above 1 means the declared budget is violated somewhere.
    pub fn budget_ratio(&self, tube: &Tube, times: &[f64]) -> f64 {
        let n = self.metric.grid().n();
        times
            .iter()
            .filter(|&&t| t > 0.0)
            .map(|&t| {
                let u3: Vec<f64> = self.potential.at(t, n).iter().map(|u| u * u * u).collect();
                let norm = math::cbrt(self.metric.integrate(&u3, crate::Region::Tube(tube)));
                norm * math::cbrt(t) / self.mu
            })
            .fold(0.0, f64::max)
    }

    pub fn sample_times(&self) -> Vec<f64> {
        (0..=self.samples)
            .map(|k| self.horizon * k as f64 / self.samples as f64)
            .collect()
    }
}

/// Solution values at the sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatSeries {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub steps: usize,
}

impl HeatSeries {
    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Index of the sample at time `t` (nearest).
    pub fn index_of(&self, t: f64) -> usize {
        let mut best = 0;
        for (k, s) in self.times.iter().enumerate() {
            if (s - t).abs() < (self.times[best] - t).abs() {
                best = k;
            }
        }
        best
    }

    /// Largest spacing between consecutive samples.
    pub fn max_spacing(&self) -> f64 {
        self.times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

/// Outcome of a multi-field explicit integration.
pub(crate) struct Integration {
    pub times: Vec<f64>,
    /// `values[sample][field]`.
    pub values: Vec<Vec<Vec<f64>>>,
    pub steps: usize,
    /// Time at which the state stopped being representable, if it did.
    pub blowup: Option<f64>,
}

/// Largest `dt · q` allowed in one step, keeping the reaction resolved.
const REACTION_STEP: f64 = 0.05;

/// Integrates `∂f_j/∂t = Δf_j + q_j f_j` for several fields with forward
/// Euler, where `q = rate(t_mid, fields)` is evaluated at the step midpoint
/// time. The step never exceeds the monotone diffusion limit, so with
/// `q ≥ 0` nonnegative data stays nonnegative.
pub(crate) fn integrate<R>(
    m: &WarpedMetric,
    init: Vec<Vec<f64>>,
    sample_times: &[f64],
    dt_safety: f64,
    mut rate: R,
) -> Integration
where
    R: FnMut(f64, &[Vec<f64>]) -> Vec<Vec<f64>>,
{
    let dt_diff = dt_safety * m.heat_dt_limit();
    let mut state = init;
    let mut t = sample_times.first().copied().unwrap_or(0.0);
    let mut out = Integration {
        times: vec![t],
        values: vec![state.clone()],
        steps: 0,
        blowup: None,
    };
    let dt_floor = 1e-14 * sample_times.last().copied().unwrap_or(1.0).max(1.0);
    for &target in sample_times.iter().skip(1) {
        while t < target {
            let mut dt = dt_diff.min(target - t);
            let mut q = rate(t + 0.5 * dt, &state);
            let mut qmax = q.iter().flat_map(|v| v.iter().copied()).fold(0.0, f64::max);
            let mut tries = 0;
            while dt * qmax > REACTION_STEP && tries < 60 {
                dt = 0.9 * REACTION_STEP / qmax;
                q = rate(t + 0.5 * dt, &state);
                qmax = q.iter().flat_map(|v| v.iter().copied()).fold(0.0, f64::max);
                tries += 1;
            }
            if !(qmax.is_finite() && dt > dt_floor) {
                out.blowup = Some(t);
                return out;
            }
            let next: Vec<Vec<f64>> = state
                .iter()
                .zip(&q)
                .map(|(f, qj)| {
                    let lap = m.laplacian(f);
                    (0..f.len())
                        .map(|i| f[i] + dt * (lap[i] + qj[i] * f[i]))
                        .collect()
                })
                .collect();
            if next.iter().flatten().any(|v| !v.is_finite()) {
                out.blowup = Some(t);
                return out;
            }
            state = next;
            t = if target - t - dt <= dt_floor {
                target
            } else {
                t + dt
            };
            out.steps += 1;
        }
        out.times.push(t);
        out.values.push(state.clone());
    }
    out
}

/// Solves `∂f/∂t = Δf + u f` as an equality, the extremal case of the
/// differential inequality, sampling at the problem's uniform sample times.
pub fn heat_solve(hp: &HeatProblem) -> Result<HeatSeries> {
    hp.validate()?;
    let n = hp.metric.grid().n();
    let run = integrate(
        &hp.metric,
        vec![hp.f0.clone()],
        &hp.sample_times(),
        hp.dt_safety,
        |t, _| vec![hp.potential.at(t, n)],
    );
    if run.blowup.is_some() {
        return Err(Error::NonFinite("heat solution"));
    }
    Ok(HeatSeries {
        times: run.times,
        values: run
            .values
            .into_iter()
            .map(|mut v| v.swap_remove(0))
            .collect(),
        steps: run.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_metric, Profile, Shape};
    use crate::Grid;
    use core::f64::consts::PI;

    fn flat(n: usize, len: f64) -> WarpedMetric {
        build_metric(
            &Profile::FlatProduct { a0: 1.0, b0: 1.0 },
            Grid::new(n, len).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn constants_stay_constant() {
        let prof = Profile::Warped {
            w: Shape::Fourier {
                base: 1.0,
                amplitude: 0.4,
                modes: 3,
                seed: 1,
            },
            a: Shape::constant(0.7),
            b: Shape::Fourier {
                base: 1.0,
                amplitude: 0.4,
                modes: 3,
                seed: 2,
            },
        };
        let m = build_metric(&prof, Grid::new(64, 4.0).unwrap()).unwrap();
        let hp = HeatProblem::new(m, Potential::Zero, vec![2.5; 64], 0.5);
        let s = heat_solve(&hp).unwrap();
        for f in &s.values {
            assert!(f.iter().all(|v| (v - 2.5).abs() < 1e-13));
        }
    }

    #[test]
    fn cosine_mode_decays_at_the_continuum_rate() {
        let (n, len) = (128, 4.0);
        let m = flat(n, len);
        let k = 2.0 * PI / len;
        let f0: Vec<f64> = (0..n)
            .map(|i| 1.0 + (k * m.grid().coord(i)).cos())
            .collect();
        let mut hp = HeatProblem::new(m.clone(), Potential::Zero, f0, 0.2);
        hp.samples = 4;
        let s = heat_solve(&hp).unwrap();
        for (t, f) in s.times.iter().zip(&s.values) {
            let amp = f[0] - 1.0;
            let expected = (-k * k * t).exp();
            assert!(
                (amp / expected - 1.0).abs() < 1e-3,
                "t={t}: {amp} vs {expected}"
            );
        }
    }

    #[test]
    fn constant_potential_grows_exponentially() {
        let m = flat(32, 4.0);
        let c0 = 1.5;
        let mut hp = HeatProblem::new(m, Potential::Static(vec![c0; 32]), vec![1.0; 32], 0.4);
        hp.samples = 4;
        let s = heat_solve(&hp).unwrap();
        let last = s.values.last().unwrap();
        let expected = (c0 * 0.4f64).exp();
        assert!(last.iter().all(|v| (v / expected - 1.0).abs() < 1e-2));
    }

    #[test]
    fn maximum_principle_without_potential() {
        let m = flat(64, 4.0);
        let f0: Vec<f64> = (0..64)
            .map(|i| if (20..30).contains(&i) { 3.0 } else { 0.5 })
            .collect();
        let hp = HeatProblem::new(m, Potential::Zero, f0, 1.0);
        let s = heat_solve(&hp).unwrap();
        for f in &s.values {
            assert!(f.iter().all(|&v| (0.5 - 1e-14..=3.0 + 1e-14).contains(&v)));
        }
    }

    #[test]
    fn validation() {
        let m = flat(32, 4.0);
        let bad = HeatProblem::new(m.clone(), Potential::Zero, vec![-1.0; 32], 1.0);
        assert!(bad.validate().is_err());
        let short = HeatProblem::new(m.clone(), Potential::Zero, vec![1.0; 31], 1.0);
        assert!(matches!(
            short.validate(),
            Err(Error::LengthMismatch { .. })
        ));
        let steep = HeatProblem::new(
            m,
            Potential::PowerLaw {
                profile: vec![1.0; 32],
                exponent: -0.5,
            },
            vec![1.0; 32],
            1.0,
        );
        assert!(steep.validate().is_err());
    }
}
