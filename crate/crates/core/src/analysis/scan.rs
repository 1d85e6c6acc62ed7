use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{TubeSet, WarpedMetric};
use crate::math;

/// Scale-invariant curvature concentration of one tube.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConcentrationRecord {
    pub center: usize,
    pub radius: f64,
    /// `∫_{T_r} |Rm|² dV`.
    pub l2_curv: f64,
    pub volume: f64,
    /// `r⁴/Vol · ∫|Rm|²`.
    pub ratio: f64,
    /// `(r⁴/Vol)^{1/2}`, the volume-only proxy for the Sobolev constant.
    pub sobolev_proxy: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConcentrationLevel {
    pub radius: f64,
    pub records: Vec<ConcentrationRecord>,
    pub max_ratio: f64,
    pub argmax: usize,
}

/// Shrink factors scanned besides the full radius.
pub const SCAN_FACTORS: [f64; 3] = [1.0, 0.5, 0.25];

/// Concentration records at every center, at radii r, r/2 and r/4.
pub fn concentration_scan(m: &WarpedMetric, r: f64) -> Result<Vec<ConcentrationLevel>> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: "must be positive",
        });
    }
    let rm2 = m.curvature().riem_norm_sq;
    SCAN_FACTORS
        .iter()
        .map(|&c| {
            let radius = c * r;
            let tubes = TubeSet::new(m, radius)?;
            let l2 = tubes.integrals(m, &rm2);
            let vol = tubes.volumes(m);
            let r4 = math::powi(radius, 4);
            let records: Vec<ConcentrationRecord> = (0..l2.len())
                .map(|i| ConcentrationRecord {
                    center: i,
                    radius,
                    l2_curv: l2[i],
                    volume: vol[i],
                    ratio: r4 / vol[i] * l2[i],
                    sobolev_proxy: math::sqrt(r4 / vol[i]),
                })
                .collect();
            let (argmax, max_ratio) = records.iter().map(|rec| rec.ratio).enumerate().fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
            Ok(ConcentrationLevel {
                radius,
                records,
                max_ratio,
                argmax,
            })
        })
        .collect()
}

/// `max_x max_{y₁,y₂ ∈ T_{3r/2}(x)} Vol(T_r(y₁)) / Vol(T_r(y₂))`.
pub fn ball_comparability(m: &WarpedMetric, r: f64) -> Result<f64> {
    let vol = TubeSet::new(m, r)?.volumes(m);
    let near = TubeSet::new(m, 1.5 * r)?;
    Ok(near
        .tubes()
        .iter()
        .map(|t| {
            let (lo, hi) = t
                .index_set()
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), &i| {
                    (lo.min(vol[i]), hi.max(vol[i]))
                });
            hi / lo
        })
        .fold(1.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_metric, Profile};
    use crate::{Grid, FIBER_VOLUME};

    #[test]
    fn flat_product_ratio_from_closed_forms() {
        let m = build_metric(
            &Profile::FlatProduct { a0: 1.0, b0: 1.0 },
            Grid::new(256, 8.0).unwrap(),
        )
        .unwrap();
        let levels = concentration_scan(&m, 0.5).unwrap();
        // |Rm|² = 4, Vol(T_r) = 2r·8π²
        for level in &levels {
            let r = level.radius;
            let expected = r.powi(4) / (2.0 * r * FIBER_VOLUME) * 4.0 * 2.0 * r * FIBER_VOLUME;
            assert!((level.max_ratio - expected).abs() < 1e-12 * expected);
            for rec in &level.records {
                assert!(
                    (rec.ratio - rec.sobolev_proxy.powi(2) * rec.l2_curv).abs()
                        <= 1e-14 * rec.ratio
                );
            }
        }
        assert_eq!(ball_comparability(&m, 0.5).unwrap(), 1.0);
    }
}
