use warpflow_core::flow::{cfl_dt, dvol_residual, flow_step, run_flow, FlowControls, StopReason};
use warpflow_core::{build_metric, Grid, Profile, Shape, WarpedMetric};
use warpflow_oracles::closed_form::{shrinking_sphere_b_sq, shrinking_sphere_crossing};

fn product(n: usize, a0: f64, b0: f64) -> WarpedMetric {
    build_metric(&Profile::FlatProduct { a0, b0 }, Grid::new(n, 4.0).unwrap()).unwrap()
}

#[test]
fn shrinking_sphere_matches_closed_form() {
    let b0 = 1.5;
    let t_end = 0.4 * b0 * b0 / 2.0;
    let times: Vec<f64> = (1..=8).map(|k| t_end * k as f64 / 8.0).collect();
    let c = FlowControls {
        t_end,
        snapshot_times: times.clone(),
        ..FlowControls::default()
    };
    let run = run_flow(&product(256, 1.0, b0), &c).unwrap();
    assert_eq!(run.report.stop_reason, StopReason::ReachedTEnd);
    for snap in &run.trajectory.snapshots[1..] {
        let exact = shrinking_sphere_b_sq(b0, snap.time());
        for b in snap.b() {
            assert!(((b * b) / exact - 1.0).abs() < 1e-4);
        }
        assert!(snap.w().iter().chain(snap.a()).all(|&v| v == 1.0));
    }
}

#[test]
fn equivalence_crossing_matches_closed_form() {
    let c = FlowControls {
        t_end: 0.4,
        equivalence_limit: 1.05,
        stop_on_equivalence: true,
        ..FlowControls::default()
    };
    let m = product(64, 1.0, 1.0);
    let run = run_flow(&m, &c).unwrap();
    let crossing = shrinking_sphere_crossing(1.0, 1.05);
    assert_eq!(run.report.stop_reason, StopReason::EquivalenceViolated);
    assert!(run.report.final_time >= crossing);
    assert!(run.report.final_time - crossing <= cfl_dt(&m, 0.25) * 1.01);
}

fn seeded(n: usize, seed: u64) -> WarpedMetric {
    let prof = Profile::Warped {
        w: Shape::Fourier {
            base: 1.0,
            amplitude: 0.2,
            modes: 3,
            seed,
        },
        a: Shape::Fourier {
            base: 0.8,
            amplitude: 0.3,
            modes: 3,
            seed: seed + 100,
        },
        b: Shape::Fourier {
            base: 1.5,
            amplitude: 0.3,
            modes: 3,
            seed: seed + 200,
        },
    };
    build_metric(&prof, Grid::new(n, 6.0).unwrap()).unwrap()
}

#[test]
fn parabolic_rescaling_is_covariant() {
    let m = seeded(96, 7);
    let dt = cfl_dt(&m, 0.25);
    for lambda in [2.0, 10.0] {
        let mut g = m.clone();
        let mut gs = m.scaled(lambda);
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
        let worst = dev(g.w(), gs.w())
            .max(dev(g.a(), gs.a()))
            .max(dev(g.b(), gs.b()));
        assert!(worst < 1e-10, "lambda {lambda}: {worst}");
        assert!((gs.time() / (lambda * lambda) / g.time() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn collapsing_the_circle_changes_nothing_dimensionless() {
    let base = seeded(64, 3);
    let c = FlowControls {
        t_end: 0.05,
        track_radius: Some(0.8),
        ..FlowControls::default()
    };
    let reference = run_flow(&base, &c).unwrap();
    for factor in [0.1, 0.01] {
        let run = run_flow(&base.with_circle_scaled(factor), &c).unwrap();
        assert_eq!(run.report.steps, reference.report.steps);
        for (x, y) in run.report.samples.iter().zip(&reference.report.samples) {
            assert!((x.t - y.t).abs() <= 1e-12 * y.t);
            assert!((x.t_sup_rm / y.t_sup_rm - 1.0).abs() < 1e-12 || y.t_sup_rm == 0.0);
            assert!((x.equivalence / y.equivalence - 1.0).abs() < 1e-12);
            let (cx, cy) = (x.max_concentration.unwrap(), y.max_concentration.unwrap());
            assert!((cx / cy - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn volume_form_residual_is_time_discretization() {
    let m = seeded(64, 9);
    let residual = |spacing: f64| {
        let times: Vec<f64> = (1..=4).map(|k| spacing * k as f64).collect();
        let c = FlowControls {
            t_end: 4.0 * spacing,
            snapshot_times: times,
            cfl_safety: 0.1,
            ..FlowControls::default()
        };
        dvol_residual(&run_flow(&m, &c).unwrap().trajectory).unwrap()
    };
    let coarse = residual(0.004);
    let fine = residual(0.002);
    assert!(fine < coarse && coarse / fine > 3.0, "{coarse} {fine}");
}
