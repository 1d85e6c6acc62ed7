//! Acceptance criteria, one pass/fail line each with its runtime.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use warpflow::config::{ExperimentConfig, ExperimentKind};
use warpflow::experiment::run_experiment;
use warpflow::suites::calibration::{measure_suite, CalibrationSpec, SuiteConstants};
use warpflow::suites::collapse::{collapse_sweep, CollapseSpec};
use warpflow::suites::geometry::{
    covering_records, sobolev_scale_deviation, sobolev_volume_sweep, suite_metrics,
};
use warpflow::suites::moser::{
    adversarial_case, calibrate_kernel, heat_suite, integration_by_parts_suite, MoserSuiteSpec,
};
use warpflow::suites::smoothing::{
    amplitude_sweep, riccati_cases, smoothing_sweep, SmoothingSweepSpec,
};
use warpflow_core::flow::{cfl_dt, flow_step, run_flow, FlowControls, StopReason};
use warpflow_core::moser::constants::c2;
use warpflow_core::{build_metric, CurvatureField, Grid, Profile, Shape, WarpedMetric};
use warpflow_oracles::christoffel::{
    doubly_warped, frame_curvature, FrameCurvature, WARPED_DEPENDENCE,
};
use warpflow_oracles::closed_form::{riccati_blowup, shrinking_sphere_b_sq};
use warpflow_oracles::comparison::comparability_bound;

/// Property verdict and a one-line measurement summary.
type Check = (bool, String);

fn fourier(base: f64, amplitude: f64, seed: u64) -> Shape {
    Shape::Fourier {
        base,
        amplitude,
        modes: 3,
        seed,
    }
}

fn fields(c: &CurvatureField, i: usize) -> [f64; 10] {
    [
        c.k_rtheta[i],
        c.k_rs[i],
        c.k_thetas[i],
        c.k_ss[i],
        c.ric_r[i],
        c.ric_theta[i],
        c.ric_s[i],
        c.riem_norm_sq[i],
        c.ric_norm_sq[i],
        c.scalar[i],
    ]
}

fn oracle_fields(o: &FrameCurvature) -> [f64; 10] {
    [
        o.sectional[0][1],
        o.sectional[0][2],
        o.sectional[1][2],
        o.sectional[2][3],
        o.ricci[0],
        o.ricci[1],
        o.ricci[2],
        o.riem_norm_sq,
        o.ric_norm_sq,
        o.scalar,
    ]
}

fn curvature_errors(prof: &Profile, n: usize, len: f64) -> [f64; 10] {
    let m = build_metric(prof, Grid::new(n, len).unwrap()).unwrap();
    let c = m.curvature();
    let [w, a, b] = prof.shapes().unwrap().map(|s| s.bind(len));
    let (wf, af, bf) = (|s: f64| w.eval(s), |s: f64| a.eval(s), |s: f64| b.eval(s));
    let g = doubly_warped(&wf, &af, &bf);
    let (mut err, mut scale) = ([0.0f64; 10], [0.0f64; 10]);
    for i in 0..n {
        let o = oracle_fields(&frame_curvature(
            &g,
            &[m.grid().coord(i), 0.0, 1.1, 0.0],
            1e-3,
            WARPED_DEPENDENCE,
        ));
        let d = fields(&c, i);
        for k in 0..10 {
            err[k] = err[k].max((d[k] - o[k]).abs());
            scale[k] = scale[k].max(o[k].abs());
        }
    }
    core::array::from_fn(|k| err[k] / scale[k].max(1e-12))
}

fn curvature_oracle() -> Check {
    let len = 2.0 * std::f64::consts::PI;
    let mut worst = f64::INFINITY;
    for seed in 0..20u64 {
        let prof = Profile::Warped {
            w: fourier(1.0, 0.3, 3 * seed),
            a: fourier(0.6, 0.4, 3 * seed + 1),
            b: fourier(1.2, 0.4, 3 * seed + 2),
        };
        let e = [128, 256, 512].map(|n| curvature_errors(&prof, n, len));
        for pair in e.windows(2) {
            for (coarse, fine) in pair[0].iter().zip(&pair[1]) {
                worst = worst.min((coarse / fine).log2());
            }
        }
    }
    (
        worst >= 1.9,
        format!("min order {worst:.4} over 20 seeds × 10 fields × 2 doublings (need ≥ 1.9)"),
    )
}

fn exact_solution() -> Check {
    let b0 = 1.5;
    let t_end = 0.4 * b0 * b0 / 2.0;
    let c = FlowControls {
        t_end,
        snapshot_times: (1..=16).map(|k| t_end * k as f64 / 16.0).collect(),
        ..FlowControls::default()
    };
    let m = build_metric(
        &Profile::FlatProduct { a0: 1.0, b0 },
        Grid::new(256, 4.0).unwrap(),
    )
    .unwrap();
    let run = run_flow(&m, &c).unwrap();
    let mut worst: f64 = 0.0;
    for snap in &run.trajectory.snapshots {
        let exact = shrinking_sphere_b_sq(b0, snap.time());
        for b in snap.b() {
            worst = worst.max((b * b / exact - 1.0).abs());
        }
    }
    let ok = worst < 1e-4 && run.report.stop_reason == StopReason::ReachedTEnd;
    (
        ok,
        format!("max relative error of b² {worst:.3e} at n = 256 (need < 1e-4)"),
    )
}

fn covariance() -> Check {
    let prof = Profile::Warped {
        w: fourier(1.0, 0.2, 7),
        a: fourier(0.8, 0.3, 107),
        b: fourier(1.5, 0.3, 207),
    };
    let m = build_metric(&prof, Grid::new(96, 6.0).unwrap()).unwrap();
    let dt = cfl_dt(&m, 0.25);
    let mut worst: f64 = 0.0;
    for lambda in [2.0, 10.0] {
        let (mut g, mut gs) = (m.clone(), m.scaled(lambda));
        for _ in 0..200 {
            g = flow_step(&g, dt).unwrap();
            gs = flow_step(&gs, dt * lambda * lambda).unwrap();
        }
        let dev = |x: &[f64], y: &[f64]| {
            x.iter()
                .zip(y)
                .map(|(u, v)| (v / lambda / u - 1.0).abs())
                .fold(0.0, f64::max)
        };
        worst = worst
            .max(dev(g.w(), gs.w()))
            .max(dev(g.a(), gs.a()))
            .max(dev(g.b(), gs.b()));
    }
    (
        worst < 1e-10,
        format!("max relative deviation {worst:.3e} for λ ∈ {{2, 10}} (need < 1e-10)"),
    )
}

fn collapse_indifference() -> Check {
    let (s, _) = collapse_sweep(&CollapseSpec::default()).unwrap();
    let times: Vec<String> = s
        .members
        .iter()
        .map(|m| format!("{:.6}", m.existence_time))
        .collect();
    (
        s.holds(),
        format!(
            "constant a: tracker dev {:.1e}, time var {:.1e}; varying a: time var {:.1e} (need < 0.1); times {}",
            s.constant_tracker_deviation,
            s.constant_time_variation,
            s.nonconstant_time_variation,
            times.join(" ")
        ),
    )
}

fn smoothing_law() -> Check {
    let spec = SmoothingSweepSpec::default();
    let s = smoothing_sweep(&spec).unwrap();
    let fixed = s
        .members
        .iter()
        .all(|m| (m.tube_l2 / spec.epsilon - 1.0).abs() < 1e-9);
    let reached = s.members.iter().all(|m| m.stop_reason == "reached_t_end");
    let values: Vec<String> = s
        .members
        .iter()
        .map(|m| format!("{:.4}", m.max_t_sup_rm))
        .collect();
    (
        s.spread < 2.0 && fixed && reached,
        format!(
            "sup t·sup|Rm| = [{}] for h = 10, 100, 1000, spread {:.3} (need < 2)",
            values.join(", "),
            s.spread
        ),
    )
}

fn ricci_decay() -> Check {
    let spec = CalibrationSpec {
        heat_problems: 0,
        ..CalibrationSpec::default()
    };
    let coarse = SuiteConstants::fold(&measure_suite(&spec, spec.n).unwrap(), None).ricci_decay;
    let fine = SuiteConstants::fold(&measure_suite(&spec, 2 * spec.n).unwrap(), None).ricci_decay;
    let drift = (fine / coarse - 1.0).abs();
    (
        coarse.is_finite() && drift < 0.2,
        format!("sup t^(2/3)·sup|Ric| = {coarse:.5} (n = 256), {fine:.5} (n = 512), drift {drift:.2e} (need < 0.2)"),
    )
}

fn moser_suite() -> Check {
    let spec = MoserSuiteSpec::default();
    let ibp = integration_by_parts_suite(&spec).unwrap();
    let heat = heat_suite(&spec).unwrap();
    let detected = adversarial_case(&spec).unwrap().iter().any(|r| !r.holds);
    let bad = |v: &[warpflow::suites::moser::CheckRecord], kind: &str| {
        v.iter().filter(|r| r.check == kind && !r.holds).count()
    };
    let (v1, v4) = (bad(&ibp, "integration_by_parts"), bad(&heat, "h_recursion"));
    let others = heat.iter().filter(|r| !r.holds).count() - v4;
    let probes = heat.iter().filter(|r| r.check == "h_recursion").count();
    (
        v1 == 0 && v4 == 0 && others == 0 && detected,
        format!(
            "{} integration-by-parts checks: {v1} violations; {probes} recursion probes: {v4}; other heat checks: {others}; adversarial detected: {detected}",
            ibp.len()
        ),
    )
}

fn kernel_calibration() -> Check {
    let coarse = calibrate_kernel(0, 30, 128).unwrap();
    let fine = calibrate_kernel(0, 30, 256).unwrap();
    let drift = (fine / coarse - 1.0).abs();
    (
        coarse.is_finite() && coarse > 0.0 && drift < 0.2,
        format!("C* = {coarse:.5} (n = 128), {fine:.5} (n = 256), drift {drift:.2e} (need < 0.2)"),
    )
}

fn scalar_smoothing() -> Check {
    let radius = 0.5;
    let cases = riccati_cases(&[1.0, 0.1, 0.01], radius, 256).unwrap();
    let mut ok = true;
    for c in &cases {
        let horizon = c2(c.covering) * radius * radius;
        let oracle = riccati_blowup(1.0, c.eta);
        ok &= c.report.hypotheses_hold
            && c.report.blowup_time.is_none()
            && c.report.final_time > horizon
            && (c.predicted_blowup / oracle - 1.0).abs() < 1e-12;
    }
    let sweep = amplitude_sweep(&[0.25, 0.5, 1.0], radius, 256).unwrap();
    ok &= sweep
        .iter()
        .all(|r| r.hypotheses_hold && r.reached_horizon && r.max_t_sup_f.is_finite());
    let bound = sweep.iter().map(|r| r.max_t_sup_f).fold(0.0, f64::max);
    (
        ok,
        format!(
            "3 constant-data runs outlive C₂r² = {:.4e}; t·sup f ≤ {bound:.4e} across 3 amplitudes",
            cases
                .iter()
                .map(|c| c.report.guaranteed_horizon)
                .fold(0.0, f64::max)
        ),
    )
}

fn sobolev_volume() -> Check {
    let pts = sobolev_volume_sweep(&[1.0, 0.1, 0.01], 256, 0.5).unwrap();
    let (lo, hi) = pts.iter().fold((f64::INFINITY, 0.0f64), |(l, h), p| {
        (l.min(p.ratio), h.max(p.ratio))
    });
    let grid = Grid::new(256, 4.0).unwrap();
    let prof = Profile::Warped {
        w: fourier(1.0, 0.3, 11),
        a: fourier(0.7, 0.3, 12),
        b: fourier(1.3, 0.3, 13),
    };
    let m: WarpedMetric = build_metric(&prof, grid).unwrap();
    let scale_dev = sobolev_scale_deviation(&m, 128, 0.5, &[2.0, 10.0]).unwrap();
    (
        hi.is_finite() && hi / lo < 1.5 && scale_dev < 1e-6,
        format!(
            "A/(r⁴/Vol)^½ ∈ [{lo:.5}, {hi:.5}] across a0 ∈ {{1, 0.1, 0.01}}; scale deviation {scale_dev:.2e} (need < 1e-6)"
        ),
    )
}

fn covering_comparability() -> Check {
    let metrics = suite_metrics(256).unwrap();
    let radii = [0.25, 0.5, 1.0];
    let recs = covering_records(&metrics, &radii).unwrap();
    let mut ok = true;
    let mut max_n = 0;
    let mut worst_margin: f64 = 0.0;
    for r in &recs {
        let m = &metrics
            .iter()
            .find(|(name, _)| *name == r.metric)
            .unwrap()
            .1;
        let bound = comparability_bound(m.w(), m.a(), m.b(), m.grid().ds(), r.radius);
        ok &= r.verified && r.max_n <= 8 && r.comparability <= bound;
        max_n = max_n.max(r.max_n);
        worst_margin = worst_margin.max(r.comparability / bound);
    }
    (
        ok,
        format!(
            "{} (metric, r) pairs verified exhaustively; max N = {max_n} (need ≤ 8); max ratio/bound {worst_margin:.3}",
            recs.len()
        ),
    )
}

fn output_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if matches!(p.extension().and_then(|x| x.to_str()), Some("csv" | "json")) {
                out.push((
                    p.strip_prefix(dir).unwrap().display().to_string(),
                    std::fs::read(&p).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Check {
    let mut flow = ExperimentConfig::new(ExperimentKind::Flow);
    flow.grid.n = 64;
    flow.profile = Some(Profile::Warped {
        w: fourier(1.0, 0.2, 1),
        a: fourier(0.7, 0.2, 2),
        b: fourier(1.3, 0.2, 3),
    });
    flow.flow.t_end = 0.05;
    flow.flow.track_radius = Some(0.5);
    let mut moser = ExperimentConfig::new(ExperimentKind::MoserVerify);
    moser.seed = Some(7);
    moser.moser.samples = 20;
    moser.moser.heat_problems = 2;
    let mut collapse = ExperimentConfig::new(ExperimentKind::CollapseSweep);
    collapse.seed = Some(3);
    collapse.collapse.n = 64;
    collapse.collapse.t_end = 0.05;
    let mut files = 0;
    let mut identical = true;
    for cfg in [flow, moser, collapse] {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run_experiment(&cfg, d1.path()).unwrap();
        run_experiment(&cfg, d2.path()).unwrap();
        let (x, y) = (output_bytes(d1.path()), output_bytes(d2.path()));
        files += x.len();
        identical &= !x.is_empty() && x == y;
    }
    (
        identical,
        format!("{files} CSV/JSON files byte-identical across repeated runs of 3 configs"),
    )
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

#[test]
fn acceptance_criteria() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            name: "curvature oracle",
            limit: secs(30),
            run: curvature_oracle,
        },
        Criterion {
            name: "exact shrinking sphere",
            limit: secs(10),
            run: exact_solution,
        },
        Criterion {
            name: "parabolic covariance",
            limit: secs(10),
            run: covariance,
        },
        Criterion {
            name: "collapse indifference",
            limit: secs(120),
            run: collapse_indifference,
        },
        Criterion {
            name: "smoothing law",
            limit: secs(180),
            run: smoothing_law,
        },
        Criterion {
            name: "ricci decay",
            limit: secs(180),
            run: ricci_decay,
        },
        Criterion {
            name: "moser inequality suite",
            limit: secs(60),
            run: moser_suite,
        },
        Criterion {
            name: "sup-bound kernel calibration",
            limit: secs(120),
            run: kernel_calibration,
        },
        Criterion {
            name: "scalar smoothing",
            limit: secs(60),
            run: scalar_smoothing,
        },
        Criterion {
            name: "sobolev-volume relation",
            limit: secs(60),
            run: sobolev_volume,
        },
        Criterion {
            name: "covering and comparability",
            limit: secs(30),
            run: covering_comparability,
        },
        Criterion {
            name: "determinism",
            limit: secs(60),
            run: determinism,
        },
    ];
    let mut failed = Vec::new();
    println!();
    for (k, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (holds, detail) = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let in_time = elapsed < c.limit;
        let pass = holds && in_time;
        println!(
            "[{}] {:>2}. {:<30} {:>8.2}s (limit {:>3}s) {}",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            detail
        );
        if !pass {
            failed.push(c.name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
