//! TOML experiment configs: schema, defaults, validation and fingerprints.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use warpflow_core::flow::FlowControls;
use warpflow_core::{build_metric, Grid, Profile, WarpedMetric};

use crate::error::{LabError, Result};
use crate::suites::calibration::CalibrationSpec;
use crate::suites::collapse::CollapseSpec;
use crate::suites::moser::MoserSuiteSpec;
use crate::suites::smoothing::SmoothingSweepSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Flow,
    MoserVerify,
    Sobolev,
    Scan,
    SmoothingSweep,
    CollapseSweep,
    Calibrate,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Flow => "flow",
            ExperimentKind::MoserVerify => "moser_verify",
            ExperimentKind::Sobolev => "sobolev",
            ExperimentKind::Scan => "scan",
            ExperimentKind::SmoothingSweep => "smoothing_sweep",
            ExperimentKind::CollapseSweep => "collapse_sweep",
            ExperimentKind::Calibrate => "calibrate",
        }
    }

    /// Kinds that draw random samples and therefore need a seed.
    pub fn randomized(&self) -> bool {
        matches!(
            self,
            ExperimentKind::MoserVerify
                | ExperimentKind::Sobolev
                | ExperimentKind::CollapseSweep
                | ExperimentKind::Calibrate
        )
    }

    fn needs_profile(&self) -> bool {
        matches!(
            self,
            ExperimentKind::Flow | ExperimentKind::Sobolev | ExperimentKind::Scan
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub length: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n: 256,
            length: 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SobolevSpec {
    /// Tube center; the middle of the grid when absent.
    pub center: Option<usize>,
    pub radius: f64,
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for SobolevSpec {
    fn default() -> Self {
        Self {
            center: None,
            radius: 0.5,
            restarts: 8,
            max_iterations: 20_000,
            tolerance: 1e-13,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSpec {
    pub radius: f64,
    /// Bound on tube-L² curvature; enables the hypothesis verdict with `k`.
    pub epsilon: Option<f64>,
    /// Bound on the pointwise Ricci operator norm.
    pub k: Option<f64>,
    /// Existence constant in the predicted horizon `c1·min(r², 1/K)`.
    pub c1: f64,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            radius: 0.5,
            epsilon: None,
            k: None,
            c1: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative slack of quadrature-level inequality checks.
    pub quadrature_rel: f64,
    /// Allowed relative drift of calibrated constants against a baseline.
    pub drift: f64,
    /// Allowed max/min ratio of the smoothing constant across bump heights.
    pub smoothing_spread: f64,
    /// Allowed relative variation of existence times, non-constant collapse.
    pub time_variation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadrature_rel: 1e-8,
            drift: 0.1,
            smoothing_spread: 2.0,
            time_variation: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    /// Master seed, copied into every randomized suite.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Output directory. Not part of the fingerprint.
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps. Not part of the fingerprint.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Baseline to compare calibrated constants against.
    #[serde(default)]
    pub baseline: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub profile: Option<Profile>,
    #[serde(default)]
    pub flow: FlowControls,
    #[serde(default)]
    pub moser: MoserSuiteSpec,
    #[serde(default)]
    pub sobolev: SobolevSpec,
    #[serde(default)]
    pub scan: ScanSpec,
    #[serde(default)]
    pub smoothing: SmoothingSweepSpec,
    #[serde(default)]
    pub collapse: CollapseSpec,
    #[serde(default)]
    pub calibrate: CalibrationSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    /// A config of the given kind with every section at its default.
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind,
            seed: None,
            out: None,
            workers: None,
            baseline: None,
            grid: GridSpec::default(),
            profile: None,
            flow: FlowControls::default(),
            moser: MoserSuiteSpec::default(),
            sobolev: SobolevSpec::default(),
            scan: ScanSpec::default(),
            smoothing: SmoothingSweepSpec::default(),
            collapse: CollapseSpec::default(),
            calibrate: CalibrationSpec::default(),
            tolerances: Tolerances::default(),
        }
    }

    /// Parses and validates; errors name the offending key.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text)
            .map_err(|e| LabError::config("<document>", e.message()))?;
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." {
                "<document>".to_string()
            } else {
                path
            };
            LabError::config(key, e.into_inner().message())
        })?;
        cfg.validate()?;
        Ok(cfg.resolved())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LabError::config("<document>", e.to_string()))
    }

    /// Copies the master seed into every randomized section.
    pub fn resolved(mut self) -> Self {
        if let Some(seed) = self.seed {
            self.moser.seed = seed;
            self.collapse.seed = seed;
            self.calibrate.seed = seed;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(LabError::config(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        if self.kind.randomized() && self.seed.is_none() {
            return Err(LabError::config(
                "seed",
                format!("required for the randomized kind `{}`", self.kind.as_str()),
            ));
        }
        if self.workers == Some(0) {
            return Err(LabError::config("workers", "must be positive"));
        }
        Grid::new(self.grid.n, self.grid.length)
            .map_err(|e| LabError::config("grid", e.to_string()))?;
        if self.kind.needs_profile() {
            self.metric()?;
        }
        self.flow
            .validate()
            .map_err(|e| LabError::config("flow", e.to_string()))?;
        let t = &self.tolerances;
        for (key, v) in [
            ("tolerances.quadrature_rel", t.quadrature_rel),
            ("tolerances.drift", t.drift),
            ("tolerances.smoothing_spread", t.smoothing_spread),
            ("tolerances.time_variation", t.time_variation),
        ] {
            positive(key, v)?;
        }
        positive("sobolev.radius", self.sobolev.radius)?;
        positive("sobolev.tolerance", self.sobolev.tolerance)?;
        if self.sobolev.restarts == 0 {
            return Err(LabError::config("sobolev.restarts", "must be positive"));
        }
        positive("scan.radius", self.scan.radius)?;
        positive("scan.c1", self.scan.c1)?;
        if let Some(e) = self.scan.epsilon {
            positive("scan.epsilon", e)?;
        }
        if let Some(k) = self.scan.k {
            positive("scan.k", k)?;
        }
        if (self.scan.epsilon.is_some() || self.scan.k.is_some()) && self.scan.radius > 1.0 {
            return Err(LabError::config(
                "scan.radius",
                "hypothesis checks need r ≤ 1",
            ));
        }
        let m = &self.moser;
        if m.samples == 0 || m.n < 16 {
            return Err(LabError::config(
                "moser",
                "samples must be positive and n ≥ 16",
            ));
        }
        positive("moser.rel_tol", m.rel_tol)?;
        let s = &self.smoothing;
        if s.heights.is_empty() || s.heights.iter().any(|h| !(*h > 0.0)) {
            return Err(LabError::config(
                "smoothing.heights",
                "must be a nonempty list of positive heights",
            ));
        }
        for (key, v) in [
            ("smoothing.depth", s.depth),
            ("smoothing.b0", s.b0),
            ("smoothing.length", s.length),
            ("smoothing.radius", s.radius),
            ("smoothing.epsilon", s.epsilon),
            ("smoothing.cfl_safety", s.cfl_safety),
        ] {
            positive(key, v)?;
        }
        if s.depth >= 1.0 {
            return Err(LabError::config("smoothing.depth", "must be below 1"));
        }
        let c = &self.collapse;
        if c.factors.is_empty() || c.factors.iter().any(|f| !(*f > 0.0)) {
            return Err(LabError::config(
                "collapse.factors",
                "must be a nonempty list of positive factors",
            ));
        }
        let cal = &self.calibrate;
        if cal
            .heights
            .iter()
            .chain(&cal.collapse_factors)
            .any(|v| !(*v > 0.0))
            || !(cal.scale > 0.0)
        {
            return Err(LabError::config(
                "calibrate",
                "heights, collapse factors and scale must be positive",
            ));
        }
        if self.kind == ExperimentKind::Calibrate && cal.members().len() < 10 {
            return Err(LabError::config(
                "calibrate",
                format!(
                    "suite enumerates {} configurations, need at least 10",
                    cal.members().len()
                ),
            ));
        }
        Ok(())
    }

    /// The initial metric of profile-based kinds.
    pub fn metric(&self) -> Result<WarpedMetric> {
        let profile = self.profile.as_ref().ok_or_else(|| {
            LabError::config(
                "profile",
                format!("required for kind `{}`", self.kind.as_str()),
            )
        })?;
        let grid = Grid::new(self.grid.n, self.grid.length)
            .map_err(|e| LabError::config("grid", e.to_string()))?;
        build_metric(profile, grid).map_err(|e| LabError::config("profile", e.to_string()))
    }

    /// SHA-256 of the canonical JSON echo, output location and worker count
    /// excluded.
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        c.workers = None;
        let canonical = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(LabError::config(
            key,
            format!("must be positive and finite, got {v}"),
        ))
    }
}
