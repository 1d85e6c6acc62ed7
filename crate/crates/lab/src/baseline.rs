//! Regression baselines of calibrated constants and drift comparison.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::suites::calibration::SuiteConstants;

pub const BASELINE_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineEntry {
    pub name: String,
    pub value: f64,
    /// Fingerprint of the config that measured the value.
    pub fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionBaseline {
    pub schema_version: u32,
    pub entries: Vec<BaselineEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Drift {
    pub name: String,
    pub baseline: f64,
    pub measured: Option<f64>,
    /// `|measured − baseline| / |baseline|`; infinite when missing.
    pub relative: f64,
    pub within: bool,
}

impl RegressionBaseline {
    pub fn from_constants(c: &SuiteConstants, fingerprint: &str) -> Self {
        Self {
            schema_version: BASELINE_SCHEMA,
            entries: c
                .named()
                .into_iter()
                .map(|(name, value)| BaselineEntry {
                    name: name.to_string(),
                    value,
                    fingerprint: fingerprint.to_string(),
                })
                .collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| e.value)
    }

    /// Compares every entry of `self` against `measured`.
    pub fn compare(&self, measured: &RegressionBaseline, tolerance: f64) -> Vec<Drift> {
        self.entries
            .iter()
            .map(|e| {
                let m = measured.get(&e.name);
                let relative = match m {
                    Some(v) if v == e.value => 0.0,
                    Some(v) => (v - e.value).abs() / e.value.abs(),
                    None => f64::INFINITY,
                };
                Drift {
                    name: e.name.clone(),
                    baseline: e.value,
                    measured: m,
                    relative,
                    within: relative <= tolerance,
                }
            })
            .collect()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        let b: Self =
            serde_json::from_str(&text).map_err(|e| LabError::config("baseline", e.to_string()))?;
        if b.schema_version != BASELINE_SCHEMA {
            return Err(LabError::config(
                "baseline",
                format!("unsupported schema {}", b.schema_version),
            ));
        }
        if let Some(e) = b.entries.iter().find(|e| e.fingerprint.is_empty()) {
            return Err(LabError::config(
                "baseline",
                format!("entry `{}` has no fingerprint", e.name),
            ));
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constants(scale: f64) -> SuiteConstants {
        SuiteConstants {
            kernel: Some(0.7 * scale),
            smoothing: 0.3 * scale,
            ricci_decay: 1.2 * scale,
            volume_growth: 2.4,
            sobolev_ratio: 0.5,
            covering_n: 3,
            comparability: 3.2,
        }
    }

    #[test]
    fn drift_within_and_beyond_tolerance() {
        let base = RegressionBaseline::from_constants(&constants(1.0), "abc");
        assert!(base.entries.iter().all(|e| e.fingerprint == "abc"));
        assert!(base
            .compare(&base, 0.1)
            .iter()
            .all(|d| d.within && d.relative == 0.0));
        let drifted = RegressionBaseline::from_constants(&constants(1.15), "def");
        let d = base.compare(&drifted, 0.1);
        let failed: Vec<&str> = d
            .iter()
            .filter(|d| !d.within)
            .map(|d| d.name.as_str())
            .collect();
        assert_eq!(
            failed,
            [
                "sup_bound_kernel_c",
                "smoothing_t_sup_rm",
                "ricci_decay_t23_sup_ric"
            ]
        );
    }

    #[test]
    fn missing_entries_are_drift() {
        let base = RegressionBaseline::from_constants(&constants(1.0), "abc");
        let mut c = constants(1.0);
        c.kernel = None;
        let d = base.compare(&RegressionBaseline::from_constants(&c, "abc"), 0.1);
        assert!(!d[0].within && d[0].measured.is_none());
    }
}
