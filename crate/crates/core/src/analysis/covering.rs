use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{tube_at, WarpedMetric};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Covering {
    /// Grid indices of the covering centers, ordered along the circle.
    pub centers: Vec<usize>,
}

impl Covering {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// Greedy arclength covering of the 2r-tube around `center` by r-tubes whose
/// centers lie in the 3r/2-tube.
///
/// Walks the 2r-tube in order of signed offset; for the first uncovered
/// point it picks the admissible center farthest along that still reaches
/// it, which covers the longest stretch ahead.
pub fn covering(m: &WarpedMetric, r: f64, center: usize) -> Result<Covering> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: "must be positive",
        });
    }
    let targets: Vec<f64> = tube_at(m, center, 2.0 * r)?
        .cells()
        .iter()
        .filter(|c| c.offset.abs() <= 2.0 * r)
        .map(|c| c.offset)
        .collect();
    let candidates: Vec<(usize, f64)> = tube_at(m, center, 1.5 * r)?
        .cells()
        .iter()
        .filter(|c| c.offset.abs() < 1.5 * r)
        .map(|c| (c.index, c.offset))
        .collect();
    let mut centers = Vec::new();
    let mut k = 0;
    while k < targets.len() {
        let o = targets[k];
        let reach = candidates
            .iter()
            .filter(|(_, c)| (c - o).abs() <= r)
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .or_else(|| {
                candidates
                    .iter()
                    .min_by(|x, y| (x.1 - o).abs().total_cmp(&(y.1 - o).abs()))
            });
        let Some(&(idx, c)) = reach else {
            break;
        };
        centers.push(idx);
        let before = k;
        while k < targets.len() && (targets[k] - c).abs() <= r {
            k += 1;
        }
        if k == before {
            // Not reachable from any admissible center; skip so the result
            // fails verification instead of looping.
            k += 1;
        }
    }
    centers.dedup();
    Ok(Covering { centers })
}

/// Exhaustive check that every grid point within 2r of `center` is within r
/// of some covering center, using distances recomputed from edge lengths.
pub fn verify_covering(m: &WarpedMetric, r: f64, center: usize, cover: &Covering) -> bool {
    let edges = m.edge_lengths();
    let n = edges.len();
    let total: f64 = edges.iter().sum();
    let mut prefix = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    prefix.push(0.0);
    for e in &edges {
        acc += e;
        prefix.push(acc);
    }
    let dist = |i: usize, j: usize| {
        let d = (prefix[i] - prefix[j]).abs();
        d.min(total - d)
    };
    (0..n)
        .filter(|&j| dist(center, j) <= 2.0 * r)
        .all(|j| cover.centers.iter().any(|&c| dist(c, j) <= r))
}
