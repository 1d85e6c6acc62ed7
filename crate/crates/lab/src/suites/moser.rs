//! Seeded verification suites for the Moser inequality chain.

use rayon::prelude::*;
use serde::Serialize;
use warpflow_core::analysis::{sobolev_estimate, SobolevControls};
use warpflow_core::moser::{
    constants, energy_step_check, h_recursion_check, heat_solve, integration_by_parts_gap,
    kernel_ratio, spatial_cutoff, time_integrated_check, HeatProblem, HeatSeries, Potential,
};
use warpflow_core::{tube_at, Region, Result};

use super::families::{positive_field, random_warped};

/// One evaluated inequality.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckRecord {
    pub check: &'static str,
    pub seed: u64,
    pub p: f64,
    pub t: Option<f64>,
    pub tau: Option<f64>,
    pub tau_prime: Option<f64>,
    pub r_prime: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoserSuiteSpec {
    pub seed: u64,
    /// Random (f, χ, metric) samples for the integration-by-parts inequality.
    pub samples: usize,
    /// Heat problems for the energy, time-integrated and H-recursion checks.
    pub heat_problems: usize,
    pub n: usize,
    pub rel_tol: f64,
}

impl Default for MoserSuiteSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 100,
            heat_problems: 10,
            n: 128,
            rel_tol: 1e-8,
        }
    }
}

pub const LEMMA1_EXPONENTS: [f64; 4] = [1.5, 2.0, 3.0, 6.0];

/// Integration-by-parts inequality on random smooth positive f, cutoffs of
/// random placement and width, random metrics; plus the large-p proxy p = 50
/// with f in [0.5, 2].
pub fn integration_by_parts_suite(spec: &MoserSuiteSpec) -> Result<Vec<CheckRecord>> {
    let per_seed: Vec<Result<Vec<CheckRecord>>> = (0..spec.samples as u64)
        .into_par_iter()
        .map(|k| {
            let seed = spec.seed.wrapping_add(k);
            let m = random_warped(seed, spec.n, 6.0, 0.3)?;
            let grid = *m.grid();
            let f = positive_field(seed ^ 0x51, &grid, 1.2);
            let bounded = positive_field(seed ^ 0x52, &grid, 0.4);
            let unit = |shift: u32| ((seed.rotate_left(shift) % 1000) as f64) / 1000.0;
            let center = (seed as usize * 37) % spec.n;
            let inner = 0.1 + 0.7 * unit(7);
            let outer = inner + 0.2 + 0.8 * unit(19);
            let mut chi = spatial_cutoff(&m, center, inner, outer)?;
            if seed % 2 == 1 {
                let bend = positive_field(seed ^ 0x53, &grid, 0.5);
                chi.iter_mut().zip(&bend).for_each(|(c, b)| *c *= b);
            }
            let mut out = Vec::new();
            for (p, data) in LEMMA1_EXPONENTS
                .iter()
                .map(|&p| (p, &f))
                .chain([(50.0, &bounded)])
            {
                let r = integration_by_parts_gap(data, &chi, p, &m)?;
                out.push(CheckRecord {
                    check: "integration_by_parts",
                    seed,
                    p,
                    t: None,
                    tau: None,
                    tau_prime: None,
                    r_prime: None,
                    lhs: r.sides.lhs,
                    rhs: r.sides.rhs,
                    holds: r.sides.holds(spec.rel_tol),
                });
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for r in per_seed {
        all.extend(r?);
    }
    Ok(all)
}

pub const HEAT_LENGTH: f64 = 6.0;
pub const HEAT_RADIUS: f64 = 1.0;
pub const HEAT_HORIZON: f64 = 0.5;

/// A seeded linear heat problem on a random metric, with the Sobolev
/// constant of the tube measured and the cubic potential budget set to the
/// smallest μ that holds.
#[derive(Debug, Clone)]
pub struct HeatCase {
    pub seed: u64,
    pub problem: HeatProblem,
    pub center: usize,
    pub radius: f64,
}

pub fn heat_case(seed: u64, n: usize, samples: usize) -> Result<HeatCase> {
    let m = random_warped(seed, n, HEAT_LENGTH, 0.25)?;
    let grid = *m.grid();
    let center = n / 2;
    let tube = tube_at(&m, center, HEAT_RADIUS)?;
    let controls = SobolevControls {
        restarts: 4,
        seed,
        ..SobolevControls::default()
    };
    let a = sobolev_estimate(&m, &tube, &controls)?.a;
    let scale = 0.5 + 0.5 * (seed % 8) as f64;
    let profile: Vec<f64> = positive_field(seed ^ 0x61, &grid, 1.0)
        .iter()
        .map(|u| u * scale)
        .collect();
    let cubed: Vec<f64> = profile.iter().map(|u| u * u * u).collect();
    let norm = m.integrate(&cubed, Region::Tube(&tube)).cbrt();
    let (potential, mu) = if seed % 2 == 1 {
        (
            Potential::PowerLaw {
                profile,
                exponent: -1.0 / 3.0,
            },
            norm,
        )
    } else {
        (Potential::Static(profile), norm * HEAT_HORIZON.cbrt())
    };
    let f0 = positive_field(seed ^ 0x62, &grid, 0.8);
    let mut problem =
        HeatProblem::new(m, potential, f0, HEAT_HORIZON).with_budget(mu * (1.0 + 1e-12), a);
    problem.samples = samples;
    Ok(HeatCase {
        seed,
        problem,
        center,
        radius: HEAT_RADIUS,
    })
}

fn record(check: &'static str, seed: u64, p: f64, lhs: f64, rhs: f64, holds: bool) -> CheckRecord {
    CheckRecord {
        check,
        seed,
        p,
        t: None,
        tau: None,
        tau_prime: None,
        r_prime: None,
        lhs,
        rhs,
        holds,
    }
}

/// Energy inequality at every sample, time-integrated inequality on a few
/// windows and the H-recursion on a 3×3 grid of (τ', r') for p = 3 and 4.5.
pub fn heat_checks(case: &HeatCase, series: &HeatSeries, rel_tol: f64) -> Result<Vec<CheckRecord>> {
    let hp = &case.problem;
    let (c, r) = (case.center, case.radius);
    let horizon = series.horizon();
    let chi = spatial_cutoff(&hp.metric, c, 0.5 * r, r)?;
    let mut out = Vec::new();
    for p in [3.0, 4.5] {
        for (t, f) in series.times.iter().zip(&series.values).skip(1) {
            let e = energy_step_check(hp, f, &chi, p, *t)?;
            let mut rec = record("energy", case.seed, p, e.residual, 0.0, e.holds(rel_tol));
            rec.t = Some(*t);
            out.push(rec);
        }
        for t in [0.3, 0.6, 1.0].map(|x| x * horizon) {
            let (tau, tau_prime) = (0.1 * horizon, 0.3 * horizon);
            let s = time_integrated_check(series, hp, &chi, p, tau, tau_prime, t)?;
            let mut rec = record(
                "time_integrated",
                case.seed,
                p,
                s.lhs,
                s.rhs,
                s.holds(rel_tol),
            );
            (rec.t, rec.tau, rec.tau_prime) = (Some(t), Some(tau), Some(tau_prime));
            out.push(rec);
        }
        for tau_prime in [0.2, 0.4, 0.6].map(|x| x * horizon) {
            for r_prime in [0.25, 0.5, 0.75].map(|x| x * r) {
                let s = h_recursion_check(series, hp, c, p, 0.0, tau_prime, r, r_prime)?;
                let mut rec = record("h_recursion", case.seed, p, s.lhs, s.rhs, s.holds(rel_tol));
                (rec.tau, rec.tau_prime, rec.r_prime) = (Some(0.0), Some(tau_prime), Some(r_prime));
                out.push(rec);
            }
        }
    }
    Ok(out)
}

/// Heat problems of the suite, solved, with all their checks.
pub fn heat_suite(spec: &MoserSuiteSpec) -> Result<Vec<CheckRecord>> {
    let per_case: Vec<Result<Vec<CheckRecord>>> = (0..spec.heat_problems as u64)
        .into_par_iter()
        .map(|k| {
            let case = heat_case(spec.seed.wrapping_add(k), spec.n, 100)?;
            let series = heat_solve(&case.problem)?;
            heat_checks(&case, &series, spec.rel_tol)
        })
        .collect();
    let mut all = Vec::new();
    for r in per_case {
        all.extend(r?);
    }
    Ok(all)
}

/// A potential far above the declared budget (μ = 0): the energy check must
/// report a positive residual somewhere.
pub fn adversarial_case(spec: &MoserSuiteSpec) -> Result<Vec<CheckRecord>> {
    let mut case = heat_case(spec.seed, spec.n, 20)?;
    let hp = &mut case.problem;
    let chi = spatial_cutoff(&hp.metric, case.center, 0.5 * case.radius, case.radius)?;
    let chi2: Vec<f64> = chi.iter().map(|c| c * c).collect();
    let mass = hp.metric.integrate(&chi2, Region::Whole);
    let p = 3.0;
    let level = 100.0 * constants::c_p(p, 0.0) * hp.metric.dirichlet_energy(&chi) / mass;
    hp.potential = Potential::Static(vec![level; spec.n]);
    hp.mu = 0.0;
    hp.horizon = 2.0 / level;
    let series = heat_solve(hp)?;
    series
        .times
        .iter()
        .zip(&series.values)
        .skip(1)
        .map(|(t, f)| {
            let e = energy_step_check(hp, f, &chi, p, *t)?;
            let mut rec = record(
                "adversarial_energy",
                case.seed,
                p,
                e.residual,
                0.0,
                e.holds(spec.rel_tol),
            );
            rec.t = Some(*t);
            Ok(rec)
        })
        .collect()
}

/// Largest `f(center, t)/kernel` over samples with `t ∈ [0.1T, T]`, p0 = 3.
pub fn kernel_constant(case: &HeatCase, series: &HeatSeries) -> Result<f64> {
    let horizon = series.horizon();
    let mut worst: f64 = 0.0;
    for &t in series.times.iter().filter(|&&t| t >= 0.1 * horizon - 1e-12) {
        worst = worst.max(kernel_ratio(
            series,
            &case.problem,
            case.center,
            case.radius,
            3.0,
            t,
        )?);
    }
    Ok(worst)
}

/// C* over `count` seeded heat problems at resolution n.
pub fn calibrate_kernel(seed: u64, count: usize, n: usize) -> Result<f64> {
    let ratios: Vec<Result<f64>> = (0..count as u64)
        .into_par_iter()
        .map(|k| {
            let case = heat_case(seed.wrapping_add(k), n, 100)?;
            let series = heat_solve(&case.problem)?;
            kernel_constant(&case, &series)
        })
        .collect();
    ratios
        .into_iter()
        .try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}
