use alloc::vec::Vec;

use super::constants;
use super::heat::{HeatProblem, HeatSeries};
use crate::error::{Error, Result};
use crate::geometry::{tube_at, Tube, WarpedMetric};
use crate::math;
use crate::Region;

/// Below this, `f` is replaced by the floor inside `f^{p−1}` with `p − 1 < 1`.
const POWER_FLOOR: f64 = 1e-300;

/// Two sides of an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
}

impl Sides {
    pub fn gap(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// `lhs ≤ rhs` up to `rel_tol` times the larger side's magnitude.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.gap() >= -rel_tol * self.lhs.abs().max(self.rhs.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationByPartsGap {
    pub sides: Sides,
    /// f has zeros and p < 2, so `0^{p−1}·Δf` was read as 0.
    pub zero_convention: bool,
}

fn pow_floored(f: f64, e: f64) -> f64 {
    if e < 1.0 {
        math::powf(f.max(POWER_FLOOR), e)
    } else {
        math::powf(f, e)
    }
}

fn pow_all(f: &[f64], e: f64) -> Vec<f64> {
    f.iter().map(|&v| math::powf(v, e)).collect()
}

/// Both sides of
/// `∫|∇(χ f^{p/2})|² ≤ p²/(2(p−1)) ∫χ² f^{p−1}(−Δf) + (1 + 1/(p−1)²) ∫|∇χ|² f^p`.
pub fn integration_by_parts_gap(
    f: &[f64],
    chi: &[f64],
    p: f64,
    m: &WarpedMetric,
) -> Result<IntegrationByPartsGap> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: "must exceed 1",
        });
    }
    if f.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "f",
            reason: "must be nonnegative",
        });
    }
    let g: Vec<f64> = chi
        .iter()
        .zip(f)
        .map(|(c, v)| c * math::powf(*v, 0.5 * p))
        .collect();
    let lhs = m.dirichlet_energy(&g);
    let lap = m.laplacian(f);
    let dv = m.volume_element();
    let zero_convention = p < 2.0 && f.contains(&0.0);
    let pairing: f64 = (0..f.len())
        .map(|i| {
            let weight = chi[i] * chi[i] * pow_floored(f[i], p - 1.0);
            if weight == 0.0 {
                0.0
            } else {
                dv[i] * weight * (-lap[i])
            }
        })
        .sum();
    let q = p - 1.0;
    let rhs = p * p / (2.0 * q) * pairing
        + (1.0 + 1.0 / (q * q)) * m.weighted_dirichlet_energy(chi, &pow_all(f, p));
    Ok(IntegrationByPartsGap {
        sides: Sides { lhs, rhs },
        zero_convention,
    })
}

/// Terms of the energy inequality at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyResidual {
    /// `d/dt ∫χ²f^p + ((p−1)/p)∫|∇(χf^{p/2})|² − C_p∫|∇χ|²f^p − C_p μ³A²t⁻¹∫χ²f^p`;
    /// nonpositive when the inequality holds.
    pub residual: f64,
    /// Largest magnitude among the four terms, for relative tolerances.
    pub scale: f64,
}

impl EnergyResidual {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.residual <= rel_tol * self.scale
    }
}

/// Evaluates the differential energy inequality for the solution value `f`
/// at time `t`. The time derivative is the exact one of the semi-discrete
/// equation, `Σ dV χ² p f^{p−1}(Δf + u f)`.
pub fn energy_step_check(
    hp: &HeatProblem,
    f: &[f64],
    chi: &[f64],
    p: f64,
    t: f64,
) -> Result<EnergyResidual> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: "the potential budget is undefined at t = 0",
        });
    }
    if !(p > 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: "must exceed 1",
        });
    }
    let m = &hp.metric;
    let n = m.grid().n();
    let u = hp.potential.at(t, n);
    let lap = m.laplacian(f);
    let dv = m.volume_element();
    let mut dx = 0.0;
    let mut x = 0.0;
    for i in 0..n {
        let c2 = chi[i] * chi[i];
        if c2 == 0.0 {
            continue;
        }
        dx += dv[i] * c2 * p * pow_floored(f[i], p - 1.0) * (lap[i] + u[i] * f[i]);
        x += dv[i] * c2 * math::powf(f[i], p);
    }
    let g: Vec<f64> = chi
        .iter()
        .zip(f)
        .map(|(c, v)| c * math::powf(*v, 0.5 * p))
        .collect();
    let grad = (p - 1.0) / p * m.dirichlet_energy(&g);
    let cp = constants::c_p(p, hp.volume_growth);
    let cut = cp * m.weighted_dirichlet_energy(chi, &pow_all(f, p));
    let budget = constants::c_hat(p, hp.volume_growth, hp.mu, hp.sobolev, t) * x;
    Ok(EnergyResidual {
        residual: dx + grad - cut - budget,
        scale: dx.abs().max(grad).max(cut).max(budget),
    })
}

/// `∫_from^to s(t) dt` for the piecewise-linear interpolant of per-sample
/// values `s` on `times`.
pub fn time_integral(times: &[f64], s: &[f64], from: f64, to: f64) -> f64 {
    let interp = |k: usize, t: f64| {
        let (t0, t1) = (times[k], times[k + 1]);
        s[k] + (s[k + 1] - s[k]) * (t - t0) / (t1 - t0)
    };
    let mut total = 0.0;
    for k in 0..times.len().saturating_sub(1) {
        let lo = times[k].max(from);
        let hi = times[k + 1].min(to);
        if hi > lo {
            total += 0.5 * (hi - lo) * (interp(k, lo) + interp(k, hi));
        }
    }
    total
}

/// `H(p, τ, r) = ∫_τ^T ∫_{tube} f^p dV dt` over the series.
pub fn h_functional(series: &HeatSeries, m: &WarpedMetric, p: f64, tau: f64, tube: &Tube) -> f64 {
    let per_sample: Vec<f64> = series
        .values
        .iter()
        .map(|f| m.integrate(&pow_all(f, p), Region::Tube(tube)))
        .collect();
    time_integral(&series.times, &per_sample, tau, series.horizon())
}

struct EnergyTerms {
    x: Vec<f64>,
    grad: Vec<f64>,
    cut: Vec<f64>,
}

fn energy_terms(series: &HeatSeries, m: &WarpedMetric, chi: &[f64], p: f64) -> EnergyTerms {
    let mut out = EnergyTerms {
        x: Vec::new(),
        grad: Vec::new(),
        cut: Vec::new(),
    };
    let chi2: Vec<f64> = chi.iter().map(|c| c * c).collect();
    for f in &series.values {
        let fp = pow_all(f, p);
        let chi2fp: Vec<f64> = chi2.iter().zip(&fp).map(|(c, v)| c * v).collect();
        out.x.push(m.integrate(&chi2fp, Region::Whole));
        let g: Vec<f64> = chi
            .iter()
            .zip(f)
            .map(|(c, v)| c * math::powf(*v, 0.5 * p))
            .collect();
        out.grad.push(m.dirichlet_energy(&g));
        out.cut.push(m.weighted_dirichlet_energy(chi, &fp));
    }
    out
}

/// Time-integrated energy inequality for `τ' ≤ t ≤ T`:
/// `∫χ²f^p(t) + ((p−1)/p)∫_{τ'}^t∫|∇(χf^{p/2})|²
///   ≤ C_p∫_τ^T∫|∇χ|²f^p + (Ĉ(τ') + 1/(τ'−τ))∫_τ^T∫χ²f^p`.
pub fn time_integrated_check(
    series: &HeatSeries,
    hp: &HeatProblem,
    chi: &[f64],
    p: f64,
    tau: f64,
    tau_prime: f64,
    t: f64,
) -> Result<Sides> {
    let horizon = series.horizon();
    if !(0.0 <= tau && tau < tau_prime && tau_prime <= t && t <= horizon) {
        return Err(Error::InvalidParameter {
            name: "time window",
            reason: "need 0 <= tau < tau' <= t <= T",
        });
    }
    let e = energy_terms(series, &hp.metric, chi, p);
    let k = series.index_of(t);
    let times = &series.times;
    let lhs = e.x[k] + (p - 1.0) / p * time_integral(times, &e.grad, tau_prime, times[k]);
    let cp = constants::c_p(p, hp.volume_growth);
    let coeff = constants::c_hat(p, hp.volume_growth, hp.mu, hp.sobolev, tau_prime)
        + 1.0 / (tau_prime - tau);
    let rhs = cp * time_integral(times, &e.cut, tau, horizon)
        + coeff * time_integral(times, &e.x, tau, horizon);
    Ok(Sides { lhs, rhs })
}

/// The H-recursion
/// `H(3p/2, τ', r') ≤ A·(p/(p−1))·(Ĉ(τ') + 1/(τ'−τ) + C₁/(r−r')²)^{3/2}·H(p, τ, r)^{3/2}`
/// on tubes around `center`, with `A = hp.sobolev` the Sobolev constant of
/// the r-tube.
#[allow(clippy::too_many_arguments)]
pub fn h_recursion_check(
    series: &HeatSeries,
    hp: &HeatProblem,
    center: usize,
    p: f64,
    tau: f64,
    tau_prime: f64,
    r: f64,
    r_prime: f64,
) -> Result<Sides> {
    let m = &hp.metric;
    let horizon = series.horizon();
    if !(0.0 <= tau && tau < tau_prime && tau_prime < horizon) {
        return Err(Error::InvalidParameter {
            name: "time window",
            reason: "need 0 <= tau < tau' < T",
        });
    }
    if !(0.0 < r_prime && r_prime < r) {
        return Err(Error::InvalidParameter {
            name: "radii",
            reason: "need 0 < r' < r",
        });
    }
    let min_width = 2.0 * m.grid().ds() * math::max_of(m.w());
    if r - r_prime < min_width {
        return Err(Error::DegenerateWindow {
            what: "r - r'",
            width: r - r_prime,
            min: min_width,
        });
    }
    let min_span = 2.0 * series.max_spacing();
    if tau_prime - tau < min_span {
        return Err(Error::DegenerateWindow {
            what: "tau' - tau",
            width: tau_prime - tau,
            min: min_span,
        });
    }
    let outer = tube_at(m, center, r)?;
    let inner = tube_at(m, center, r_prime)?;
    let lhs = h_functional(series, m, 1.5 * p, tau_prime, &inner);
    let c = hp.volume_growth;
    let bracket = constants::c_hat(p, c, hp.mu, hp.sobolev, tau_prime)
        + 1.0 / (tau_prime - tau)
        + constants::c1(p, c) / ((r - r_prime) * (r - r_prime));
    let h = h_functional(series, m, p, tau, &outer);
    let rhs = hp.sobolev * p / (p - 1.0) * math::powf(bracket, 1.5) * math::powf(h, 1.5);
    Ok(Sides { lhs, rhs })
}
