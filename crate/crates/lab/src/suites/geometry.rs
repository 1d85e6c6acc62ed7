//! Sobolev–volume relation under collapse, Sobolev scale invariance, and
//! covering/comparability over the suite metrics.

use serde::Serialize;
use warpflow_core::analysis::{
    ball_comparability, covering, sobolev_estimate, verify_covering, SobolevControls,
};
use warpflow_core::{build_metric, tube_at, Grid, Profile, Region, Result, WarpedMetric};

use super::families::{random_warped, sphere_bump};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SobolevVolumePoint {
    pub a0: f64,
    pub sobolev: f64,
    pub volume: f64,
    /// `A / (r⁴/Vol)^{1/2}`.
    pub ratio: f64,
}

/// `A/(r⁴/Vol)^{1/2}` at the center tube of the given metric.
pub fn sobolev_volume_ratio(
    m: &WarpedMetric,
    center: usize,
    radius: f64,
) -> Result<(f64, f64, f64)> {
    let tube = tube_at(m, center, radius)?;
    let a = sobolev_estimate(m, &tube, &SobolevControls::default())?.a;
    let vol = m.volume(Region::Tube(&tube));
    Ok((a, vol, a / (radius.powi(4) / vol).sqrt()))
}

/// The ratio on a bump metric at several circle sizes.
pub fn sobolev_volume_sweep(a0s: &[f64], n: usize, radius: f64) -> Result<Vec<SobolevVolumePoint>> {
    let grid = Grid::new(n, 8.0 * radius)?;
    a0s.iter()
        .map(|&a0| {
            let m = sphere_bump(10.0, 0.25, a0, 1.0, grid)?;
            let (sobolev, volume, ratio) = sobolev_volume_ratio(&m, n / 2, radius)?;
            Ok(SobolevVolumePoint {
                a0,
                sobolev,
                volume,
                ratio,
            })
        })
        .collect()
}

/// Largest relative change of A under `g → λ²g, r → λr`.
pub fn sobolev_scale_deviation(
    m: &WarpedMetric,
    center: usize,
    radius: f64,
    lambdas: &[f64],
) -> Result<f64> {
    let controls = SobolevControls::default();
    let base = sobolev_estimate(m, &tube_at(m, center, radius)?, &controls)?.a;
    let mut worst: f64 = 0.0;
    for &l in lambdas {
        let ms = m.scaled(l);
        let a = sobolev_estimate(&ms, &tube_at(&ms, center, l * radius)?, &controls)?.a;
        worst = worst.max((a / base - 1.0).abs());
    }
    Ok(worst)
}

/// Metrics on which covering and comparability are exercised.
pub fn suite_metrics(n: usize) -> Result<Vec<(String, WarpedMetric)>> {
    let grid = Grid::new(n, 6.0)?;
    let mut out = vec![
        (
            "flat".to_string(),
            build_metric(&Profile::FlatProduct { a0: 1.0, b0: 1.0 }, grid)?,
        ),
        (
            "flat_collapsed".to_string(),
            build_metric(&Profile::FlatProduct { a0: 0.01, b0: 1.0 }, grid)?,
        ),
    ];
    for h in [10.0, 30.0, 100.0] {
        out.push((format!("bump_h{h}"), sphere_bump(h, 0.25, 1.0, 1.0, grid)?));
    }
    for seed in 0..5 {
        out.push((
            format!("warped_seed{seed}"),
            random_warped(seed, n, 6.0, 0.3)?,
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringRecord {
    pub metric: String,
    pub radius: f64,
    /// Largest covering number over all centers.
    pub max_n: usize,
    /// Every center's covering passed the exhaustive check.
    pub verified: bool,
    pub comparability: f64,
}

pub fn covering_records(
    metrics: &[(String, WarpedMetric)],
    radii: &[f64],
) -> Result<Vec<CoveringRecord>> {
    let mut out = Vec::new();
    for (name, m) in metrics {
        for &r in radii {
            let mut max_n = 0;
            let mut verified = true;
            for c in 0..m.grid().n() {
                let cover = covering(m, r, c)?;
                max_n = max_n.max(cover.len());
                verified &= verify_covering(m, r, c, &cover);
            }
            out.push(CoveringRecord {
                metric: name.clone(),
                radius: r,
                max_n,
                verified,
                comparability: ball_comparability(m, r)?,
            });
        }
    }
    Ok(out)
}
