//! Runs one configured experiment and writes its manifest, CSV series,
//! summary JSON and plots under the output directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use warpflow_core::analysis::{
    ball_comparability, concentration_scan, covering, sobolev_estimate, sobolev_ratio,
    SobolevControls,
};
use warpflow_core::flow::{run_flow, BoundSample, FlowRun, StopReason};
use warpflow_core::{tube_at, Region};

use crate::baseline::RegressionBaseline;
use crate::config::{ExperimentConfig, ExperimentKind, SCHEMA_VERSION};
use crate::error::{LabError, Result};
use crate::hypotheses::check_hypotheses;
use crate::plot::svg_plot;
use crate::suites::calibration::{calibrate_suite, MemberConstants};
use crate::suites::collapse::collapse_sweep;
use crate::suites::moser::{adversarial_case, heat_suite, integration_by_parts_suite, CheckRecord};
use crate::suites::smoothing::smoothing_member;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "WARPFLOW_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Passed,
    /// A checked property failed.
    Violation,
    /// The computation stopped early (blowup, step limit).
    Stopped,
}

impl Status {
    pub fn exit_code(&self) -> u8 {
        match self {
            Status::Passed => 0,
            Status::Violation => 1,
            Status::Stopped => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub status: Status,
    pub summary: Value,
}

/// Explicit directory, else the config's, else `$WARPFLOW_OUT/<kind>-<fp>`,
/// else `warpflow-out/<kind>-<fp>`.
pub fn resolve_out_dir(cfg: &ExperimentConfig, explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit.or(cfg.out.as_deref()) {
        return p.to_path_buf();
    }
    let root =
        std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("warpflow-out"), PathBuf::from);
    root.join(format!(
        "{}-{}",
        cfg.kind.as_str(),
        &cfg.fingerprint()[..12]
    ))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| LabError::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| LabError::io(path, e))
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    write(path, s)
}

/// A CSV file whose header row carries units.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn save(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| LabError::io(path, e.into_error()))?;
        write(path, bytes)
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

const SERIES_HEADER: [&str; 9] = [
    "t [time]",
    "sup_rm [1/length^2]",
    "sup_ric [1/length^2]",
    "t_sup_rm [1]",
    "t23_sup_ric [length^-2/3]",
    "equivalence [1]",
    "volume [length^4]",
    "max_tube_l2 [1]",
    "max_concentration [1]",
];

fn series_table(samples: &[BoundSample]) -> Table {
    let mut t = Table::new(&SERIES_HEADER);
    for s in samples {
        t.push(vec![
            num(s.t),
            num(s.sup_rm),
            num(s.sup_ric),
            num(s.t_sup_rm),
            num(s.t23_sup_ric),
            num(s.equivalence),
            num(s.volume),
            opt(s.max_tube_l2),
            opt(s.max_concentration),
        ]);
    }
    t
}

/// Plots of the tracked bounds, read back from the given series files.
fn plot_series(dir: &Path, series: &[(String, PathBuf)], tracked: bool) -> Result<()> {
    let refs: Vec<(String, &Path)> = series
        .iter()
        .map(|(l, p)| (l.clone(), p.as_path()))
        .collect();
    let mut plots = vec![
        ("t_sup_rm.svg", "t·sup|Rm|", "t_sup_rm"),
        ("equivalence.svg", "metric equivalence ratio", "equivalence"),
    ];
    if tracked {
        plots.push((
            "concentration.svg",
            "max concentration ratio",
            "max_concentration",
        ));
    }
    for (file, title, y) in plots {
        write(&dir.join(file), svg_plot(title, "t", y, &refs)?)?;
    }
    Ok(())
}

/// Regenerates every plot of a finished run from its CSV files.
pub fn replot(dir: &Path) -> Result<Vec<PathBuf>> {
    let manifest: Value = read_json(&dir.join("manifest.json"))?;
    let tracked = manifest["config"]["flow"]["track_radius"].is_number()
        || manifest["kind"] == "collapse_sweep";
    let mut series = Vec::new();
    if dir.join("timeseries.csv").exists() {
        series.push(("run".to_string(), dir.join("timeseries.csv")));
    }
    let members = dir.join("members");
    if members.is_dir() {
        let mut ids: Vec<PathBuf> = fs::read_dir(&members)
            .map_err(|e| LabError::io(&members, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("timeseries.csv").exists())
            .collect();
        ids.sort();
        for p in ids {
            let label = p
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            series.push((label, p.join("timeseries.csv")));
        }
    }
    if series.is_empty() {
        return Ok(Vec::new());
    }
    plot_series(dir, &series, tracked)?;
    let mut files = vec![dir.join("t_sup_rm.svg"), dir.join("equivalence.svg")];
    if tracked {
        files.push(dir.join("concentration.svg"));
    }
    Ok(files)
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Validates, runs and writes all outputs. Sweep members run on at most
/// `cfg.workers` threads.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Outcome> {
    cfg.validate()?;
    let cfg = cfg.clone().resolved();
    match cfg.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| LabError::config("workers", e.to_string()))?
            .install(|| run_inner(&cfg, out_dir)),
        None => run_inner(&cfg, out_dir),
    }
}

fn run_inner(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let fingerprint = cfg.fingerprint();
    let mut echo = cfg.clone();
    echo.out = None;
    echo.workers = None;
    write_json(
        &dir.join("manifest.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "kind": cfg.kind.as_str(),
            "fingerprint": fingerprint,
            "package_version": env!("CARGO_PKG_VERSION"),
            "config": echo,
        }),
    )?;
    let (status, results) = match cfg.kind {
        ExperimentKind::Flow => flow(cfg, dir)?,
        ExperimentKind::MoserVerify => moser(cfg, dir)?,
        ExperimentKind::Sobolev => sobolev(cfg, dir)?,
        ExperimentKind::Scan => scan(cfg, dir)?,
        ExperimentKind::SmoothingSweep => smoothing(cfg, dir)?,
        ExperimentKind::CollapseSweep => collapse(cfg, dir)?,
        ExperimentKind::Calibrate => calibrate(cfg, dir, &fingerprint)?,
    };
    let summary = json!({
        "kind": cfg.kind.as_str(),
        "fingerprint": fingerprint,
        "status": status,
        "passed": status == Status::Passed,
        "results": results,
    });
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(Outcome {
        out_dir: dir.to_path_buf(),
        status,
        summary,
    })
}

fn stop_status(run: &FlowRun) -> Status {
    match run.report.stop_reason {
        StopReason::ReachedTEnd | StopReason::EquivalenceViolated => Status::Passed,
        StopReason::StepLimit | StopReason::NonfiniteState => Status::Stopped,
    }
}

fn flow(cfg: &ExperimentConfig, dir: &Path) -> Result<(Status, Value)> {
    let m0 = cfg.metric()?;
    let run = run_flow(&m0, &cfg.flow)?;
    let r = &run.report;
    let path = dir.join("timeseries.csv");
    series_table(&r.samples).save(&path)?;
    let fin = &run.trajectory.final_state;
    let mut profile = Table::new(&["s [coordinate]", "w [1]", "a [length]", "b [length]"]);
    for i in 0..fin.grid().n() {
        profile.push(vec![
            num(fin.grid().coord(i)),
            num(fin.w()[i]),
            num(fin.a()[i]),
            num(fin.b()[i]),
        ]);
    }
    profile.save(&dir.join("final_state.csv"))?;
    plot_series(
        dir,
        &[("run".to_string(), path)],
        cfg.flow.track_radius.is_some(),
    )?;
    let b_sq = fin.b().iter().map(|b| b * b);
    let (lo, hi) = b_sq.fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(v), h.max(v)));
    let results = json!({
        "reached_t_end": r.stop_reason == StopReason::ReachedTEnd,
        "stop_reason": r.stop_reason.as_str(),
        "final_time": r.final_time,
        "steps": r.steps,
        "rejected_steps": r.rejected_steps,
        "max_t_sup_rm": r.max_t_sup_rm,
        "max_t23_sup_ric": r.max_t23_sup_ric,
        "bound_start": r.bound_start,
        "max_equivalence": r.max_equivalence,
        "equivalence_first_violation": r.equivalence_first_violation,
        "final_b_sq_min": lo,
        "final_b_sq_max": hi,
        "initial_volume": m0.volume(Region::Whole),
        "final_volume": fin.volume(Region::Whole),
    });
    Ok((stop_status(&run), results))
}

fn check_table(records: &[CheckRecord]) -> Table {
    let mut t = Table::new(&[
        "check",
        "seed",
        "p [1]",
        "t [time]",
        "tau [time]",
        "tau_prime [time]",
        "r_prime [length]",
        "lhs",
        "rhs",
        "holds",
    ]);
    for r in records {
        t.push(vec![
            r.check.to_string(),
            r.seed.to_string(),
            num(r.p),
            opt(r.t),
            opt(r.tau),
            opt(r.tau_prime),
            opt(r.r_prime),
            num(r.lhs),
            num(r.rhs),
            r.holds.to_string(),
        ]);
    }
    t
}

fn moser(cfg: &ExperimentConfig, dir: &Path) -> Result<(Status, Value)> {
    let mut spec = cfg.moser;
    spec.rel_tol = cfg.tolerances.quadrature_rel;
    let mut records = integration_by_parts_suite(&spec)?;
    records.extend(heat_suite(&spec)?);
    let adversarial = adversarial_case(&spec)?;
    check_table(&records).save(&dir.join("checks.csv"))?;
    check_table(&adversarial).save(&dir.join("adversarial.csv"))?;
    let mut by_check: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in &records {
        let e = by_check.entry(r.check).or_default();
        e.0 += 1;
        e.1 += usize::from(!r.holds);
    }
    let violations: usize = by_check.values().map(|v| v.1).sum();
    let detected = adversarial.iter().any(|r| !r.holds);
    let results = json!({
        "records": records.len(),
        "violations": violations,
        "by_check": by_check
            .iter()
            .map(|(k, (n, v))| (k.to_string(), json!({"records": n, "violations": v})))
            .collect::<BTreeMap<_, _>>(),
        "adversarial_detected": detected,
        "samples": spec.samples,
        "heat_problems": spec.heat_problems,
        "rel_tol": spec.rel_tol,
    });
    let status = if violations == 0 && detected {
        Status::Passed
    } else {
        Status::Violation
    };
    Ok((status, results))
}

fn sobolev(cfg: &ExperimentConfig, dir: &Path) -> Result<(Status, Value)> {
    let m = cfg.metric()?;
    let s = &cfg.sobolev;
    let center = s.center.unwrap_or(m.grid().n() / 2);
    if center >= m.grid().n() {
        return Err(LabError::config("sobolev.center", "outside the grid"));
    }
    let tube = tube_at(&m, center, s.radius)?;
    let controls = SobolevControls {
        restarts: s.restarts,
        seed: cfg.seed.unwrap_or(0),
        max_iterations: s.max_iterations,
        tolerance: s.tolerance,
    };
    let est = sobolev_estimate(&m, &tube, &controls)?;
    let mut t = Table::new(&["s [coordinate]", "f [1]"]);
    for (i, f) in est.minimizer.iter().enumerate() {
        t.push(vec![num(m.grid().coord(i)), num(*f)]);
    }
    t.save(&dir.join("minimizer.csv"))?;
    let vol = m.volume(Region::Tube(&tube));
    let results = json!({
        "a": est.a,
        "converged": est.converged,
        "iterations": est.iterations,
        "restart_values": est.restart_values,
        "rayleigh_of_minimizer": sobolev_ratio(&m, &est.minimizer),
        "center": center,
        "radius": s.radius,
        "tube_volume": vol,
        "sobolev_volume_ratio": est.a / (s.radius.powi(4) / vol).sqrt(),
    });
    let status = if est.converged {
        Status::Passed
    } else {
        Status::Violation
    };
    Ok((status, results))
}

fn scan(cfg: &ExperimentConfig, dir: &Path) -> Result<(Status, Value)> {
    let m = cfg.metric()?;
    let r = cfg.scan.radius;
    let levels = concentration_scan(&m, r)?;
    let mut t = Table::new(&[
        "radius [length]",
        "center",
        "l2_curv [1]",
        "volume [length^4]",
        "ratio [1]",
        "sobolev_proxy [length^0]",
    ]);
    for level in &levels {
        for rec in &level.records {
            t.push(vec![
                num(rec.radius),
                rec.center.to_string(),
                num(rec.l2_curv),
                num(rec.volume),
                num(rec.ratio),
                num(rec.sobolev_proxy),
            ]);
        }
    }
    t.save(&dir.join("concentration.csv"))?;
    let mut per_level = Vec::new();
    for level in &levels {
        let path = dir.join(format!("levels/r{}.csv", level.radius));
        let mut lt = Table::new(&["center", "ratio [1]"]);
        for rec in &level.records {
            lt.push(vec![rec.center.to_string(), num(rec.ratio)]);
        }
        lt.save(&path)?;
        per_level.push((format!("r = {}", level.radius), path));
    }
    let refs: Vec<(String, &Path)> = per_level
        .iter()
        .map(|(l, p)| (l.clone(), p.as_path()))
        .collect();
    write(
        &dir.join("concentration.svg"),
        svg_plot("concentration ratio by center", "center", "ratio", &refs)?,
    )?;
    let mut covering_n = 0;
    for c in 0..m.grid().n() {
        covering_n = covering_n.max(covering(&m, r, c)?.len());
    }
    let verdict = match (cfg.scan.epsilon, cfg.scan.k) {
        (Some(eps), Some(k)) => Some(check_hypotheses(&m, r, eps, k, cfg.scan.c1)?),
        _ => None,
    };
    let results = json!({
        "levels": levels
            .iter()
            .map(|l| json!({"radius": l.radius, "max_ratio": l.max_ratio, "argmax": l.argmax}))
            .collect::<Vec<_>>(),
        "covering_n": covering_n,
        "ball_comparability": ball_comparability(&m, r)?,
        "verdict": verdict,
    });
    let status = match &verdict {
        Some(v) if !v.passed => Status::Violation,
        _ => Status::Passed,
    };
    Ok((status, results))
}

fn member_dir(dir: &Path, id: &str) -> PathBuf {
    dir.join("members").join(id)
}

fn smoothing(cfg: &ExperimentConfig, dir: &Path) -> Result<(Status, Value)> {
    use rayon::prelude::*;
    let spec = &cfg.smoothing;
    let runs: Vec<Result<_>> = spec
        .heights
        .par_iter()
        .map(|&h| Ok(smoothing_member(spec, h, spec.n)?))
        .collect();
    let mut members = Vec::new();
    let mut series = Vec::new();
    let mut status = Status::Passed;
    let mut table = Table::new(&[
        "height [1/length^2]",
        "a0 [length]",
        "tube_l2 [1]",
        "k0 [1/length^2]",
        "horizon [time]",
        "max_t_sup_rm [1]",
        "max_t23_sup_ric [length^-2/3]",
        "final_time [time]",
        "stop_reason",
    ]);
    for r in runs {
        let (member, run) = r?;
        let path = member_dir(dir, &format!("h{}", member.height)).join("timeseries.csv");
        series_table(&run.report.samples).save(&path)?;
        series.push((format!("h = {}", member.height), path));
        if stop_status(&run) != Status::Passed {
            status = Status::Stopped;
        }
        table.push(vec![
            num(member.height),
            num(member.a0),
            num(member.tube_l2),
            num(member.k0),
            num(member.horizon),
            num(member.max_t_sup_rm),
            num(member.max_t23_sup_ric),
            num(member.final_time),
            member.stop_reason.clone(),
        ]);
        members.push(member);
    }
    table.save(&dir.join("sweep.csv"))?;
    plot_series(dir, &series, false)?;
    let (lo, hi) = members.iter().fold((f64::INFINITY, 0.0f64), |(l, h), m| {
        (l.min(m.max_t_sup_rm), h.max(m.max_t_sup_rm))
    });
    let spread = hi / lo;
    if status == Status::Passed && !(spread < cfg.tolerances.smoothing_spread) {
        status = Status::Violation;
    }
    Ok((
        status,
        json!({"members": members, "spread": spread, "spread_limit": cfg.tolerances.smoothing_spread}),
    ))
}

fn collapse(cfg: &ExperimentConfig, dir: &Path) -> Result<(Status, Value)> {
    let (summary, runs) = collapse_sweep(&cfg.collapse)?;
    let mut table = Table::new(&[
        "family",
        "factor [1]",
        "existence_time [time]",
        "steps",
        "stop_reason",
        "max_t_sup_rm [1]",
        "max_equivalence [1]",
        "max_concentration [1]",
    ]);
    let mut series = Vec::new();
    for (m, run) in summary.members.iter().zip(&runs) {
        let id = format!("{}_a{}", m.family, m.factor);
        let path = member_dir(dir, &id).join("timeseries.csv");
        series_table(&run.report.samples).save(&path)?;
        series.push((id, path));
        table.push(vec![
            m.family.to_string(),
            num(m.factor),
            num(m.existence_time),
            m.steps.to_string(),
            m.stop_reason.clone(),
            num(m.max_t_sup_rm),
            num(m.max_equivalence),
            num(m.max_concentration),
        ]);
    }
    table.save(&dir.join("collapse.csv"))?;
    plot_series(dir, &series, true)?;
    let holds = summary.constant_tracker_deviation < 1e-10
        && summary.constant_time_variation < 1e-10
        && summary.nonconstant_time_variation < cfg.tolerances.time_variation;
    let stopped = runs.iter().any(|r| stop_status(r) != Status::Passed);
    let status = match (stopped, holds) {
        (true, _) => Status::Stopped,
        (false, true) => Status::Passed,
        (false, false) => Status::Violation,
    };
    Ok((status, serde_json::to_value(&summary)?))
}

fn member_invariants(m: &MemberConstants) -> Result<()> {
    let values = [
        m.smoothing,
        m.ricci_decay,
        m.volume_growth,
        m.sobolev_ratio,
        m.comparability,
    ];
    if m.stop_reason != StopReason::ReachedTEnd.as_str() || values.iter().any(|v| !v.is_finite()) {
        return Err(LabError::Invariant(format!(
            "calibration member `{}` stopped with {} or produced a nonfinite constant",
            m.id, m.stop_reason
        )));
    }
    Ok(())
}

fn calibrate(cfg: &ExperimentConfig, dir: &Path, fingerprint: &str) -> Result<(Status, Value)> {
    let (members, constants) = calibrate_suite(&cfg.calibrate)?;
    for m in &members {
        member_invariants(m)?;
    }
    let mut table = Table::new(&[
        "id",
        "horizon [time]",
        "smoothing [1]",
        "ricci_decay [length^-2/3]",
        "volume_growth [1]",
        "sobolev_ratio [1]",
        "covering_n",
        "comparability [1]",
    ]);
    for m in &members {
        write_json(&member_dir(dir, &m.id).join("constants.json"), m)?;
        table.push(vec![
            m.id.clone(),
            num(m.horizon),
            num(m.smoothing),
            num(m.ricci_decay),
            num(m.volume_growth),
            num(m.sobolev_ratio),
            m.covering_n.to_string(),
            num(m.comparability),
        ]);
    }
    table.save(&dir.join("members.csv"))?;
    let baseline = RegressionBaseline::from_constants(&constants, fingerprint);
    write_json(&dir.join("baseline.json"), &baseline)?;
    let (status, drift) = match &cfg.baseline {
        Some(path) => {
            let reference = RegressionBaseline::read(path)?;
            let drift = reference.compare(&baseline, cfg.tolerances.drift);
            let ok = drift.iter().all(|d| d.within);
            (
                if ok {
                    Status::Passed
                } else {
                    Status::Violation
                },
                Some(drift),
            )
        }
        None => (Status::Passed, None),
    };
    Ok((
        status,
        json!({
            "constants": constants,
            "members": members.len(),
            "drift": drift,
            "drift_tolerance": cfg.tolerances.drift,
        }),
    ))
}
