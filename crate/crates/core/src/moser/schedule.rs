use alloc::vec::Vec;

use super::checks::{h_functional, time_integral};
use super::heat::{HeatProblem, HeatSeries};
use crate::error::{Error, Result};
use crate::geometry::{tube_at, WarpedMetric};
use crate::math;
use crate::Region;

/// Growth factor of the exponents, `ν = 3/2`.
pub const NU: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScheduleEntry {
    pub p: f64,
    pub tau: f64,
    pub r: f64,
}

/// Exponents, start times and radii of the iteration, with the partial sums
/// that control the accumulated constants.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MoserSchedule {
    pub p0: f64,
    pub nu: f64,
    pub k_max: usize,
    pub entries: Vec<ScheduleEntry>,
    /// `σ_k = Σ_{i≤k} ν^{−i}`, below 3.
    pub sigma: Vec<f64>,
    /// `σ'_k = Σ_{i≤k} i ν^{−i}`, below 6.
    pub sigma_prime: Vec<f64>,
}

/// `p_k = p0 ν^k`, `τ_k = t(1 − ν^{−k−1})`, `r_k = (r/2)(1 + ν^{−k/2})` for
/// `k = 0..=k_max`.
pub fn moser_schedule(p0: f64, t: f64, r: f64, k_max: usize) -> Result<MoserSchedule> {
    if !(p0 > 2.0) {
        return Err(Error::InvalidParameter {
            name: "p0",
            reason: "must exceed 2",
        });
    }
    if !(t > 0.0 && r > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t, r",
            reason: "must be positive",
        });
    }
    let mut entries = Vec::with_capacity(k_max + 1);
    let mut sigma = Vec::with_capacity(k_max + 1);
    let mut sigma_prime = Vec::with_capacity(k_max + 1);
    let (mut s, mut sp) = (0.0, 0.0);
    for k in 0..=k_max {
        let inv = math::powi(NU, -(k as i32));
        entries.push(ScheduleEntry {
            p: p0 * math::powi(NU, k as i32),
            tau: t * (1.0 - inv / NU),
            r: 0.5 * r * (1.0 + math::sqrt(inv)),
        });
        s += inv;
        sp += k as f64 * inv;
        sigma.push(s);
        sigma_prime.push(sp);
    }
    Ok(MoserSchedule {
        p0,
        nu: NU,
        k_max,
        entries,
        sigma,
        sigma_prime,
    })
}

/// `A^{2/p0}·((1 + A²μ³)/t + r⁻²)^{3/p0}·energy^{1/p0}`: the sup bound
/// without its dimensional constant.
pub fn sup_bound_kernel(a: f64, mu: f64, p0: f64, t: f64, r: f64, energy: f64) -> f64 {
    let bracket = (1.0 + a * a * mu * mu * mu) / t + 1.0 / (r * r);
    math::powf(a, 2.0 / p0) * math::powf(bracket, 3.0 / p0) * math::powf(energy, 1.0 / p0)
}

/// `Φ_k = H(p_k, τ_k, r_k)^{1/p_k}` along the schedule, tubes around `center`.
pub fn moser_ladder(
    series: &HeatSeries,
    m: &WarpedMetric,
    schedule: &MoserSchedule,
    center: usize,
) -> Result<Vec<f64>> {
    schedule
        .entries
        .iter()
        .map(|e| {
            let tube = tube_at(m, center, e.r)?;
            Ok(math::powf(
                h_functional(series, m, e.p, e.tau, &tube),
                1.0 / e.p,
            ))
        })
        .collect()
}

/// `f(center, t)` divided by the kernel with energy `∫_0^t ∫_{T_r} f^{p0}`,
/// at the sample nearest `t`.
pub fn kernel_ratio(
    series: &HeatSeries,
    hp: &HeatProblem,
    center: usize,
    r: f64,
    p0: f64,
    t: f64,
) -> Result<f64> {
    let m = &hp.metric;
    let tube = tube_at(m, center, r)?;
    let k = series.index_of(t);
    let t = series.times[k];
    if !(t > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: "must be positive",
        });
    }
    let per_sample: Vec<f64> = series
        .values
        .iter()
        .map(|f| {
            let fp: Vec<f64> = f.iter().map(|&v| math::powf(v, p0)).collect();
            m.integrate(&fp, Region::Tube(&tube))
        })
        .collect();
    let energy = time_integral(&series.times, &per_sample, 0.0, t);
    let kernel = sup_bound_kernel(hp.sobolev, hp.mu, p0, t, r, energy);
    Ok(if kernel > 0.0 {
        series.values[k][center] / kernel
    } else {
        0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_and_third_entries() {
        let s = moser_schedule(3.0, 1.0, 1.0, 5).unwrap();
        let e = s.entries[0];
        assert_eq!((e.p, e.r), (3.0, 1.0));
        assert!((e.tau - 1.0 / 3.0).abs() < 1e-15);
        let e = s.entries[2];
        assert!((e.p - 6.75).abs() < 1e-14);
        assert!((e.tau - 19.0 / 27.0).abs() < 1e-14);
        assert!((e.r - 5.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn limits_and_partial_sums() {
        let s = moser_schedule(2.001, 2.0, 0.5, 200).unwrap();
        let last = s.entries.last().unwrap();
        assert!(last.p > 1e30);
        assert!((last.tau - 2.0).abs() < 1e-12);
        assert!((last.r - 0.25).abs() < 1e-12);
        assert!(s
            .entries
            .windows(2)
            .all(|w| w[1].p > w[0].p && w[1].tau >= w[0].tau && w[1].r <= w[0].r));
        assert!(s.sigma.iter().all(|&x| x <= 3.0));
        assert!(s.sigma_prime.iter().all(|&x| x <= 6.0));
        assert!((s.sigma.last().unwrap() - 3.0).abs() < 1e-12);
        assert!((s.sigma_prime.last().unwrap() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn kernel_arithmetic() {
        assert_eq!(sup_bound_kernel(1.0, 0.0, 3.0, 1.0, 1.0, 1.0), 2.0);
        let k1 = sup_bound_kernel(0.7, 0.3, 4.0, 0.5, 0.8, 1.3);
        let k2 = sup_bound_kernel(0.7, 0.3, 4.0, 0.5, 0.8, 2.6);
        assert!((k2 / k1 - 2f64.powf(0.25)).abs() < 1e-14);
        assert!(moser_schedule(2.0, 1.0, 1.0, 3).is_err());
    }
}
