use warpflow_core::{build_metric, CurvatureField, Grid, Profile, Shape};
use warpflow_oracles::christoffel::{
    doubly_warped, frame_curvature, FrameCurvature, WARPED_DEPENDENCE,
};

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

/// Max error per field, normalized by the field's max magnitude.
fn errors(prof: &Profile, n: usize, len: f64) -> [f64; 10] {
    let m = build_metric(prof, Grid::new(n, len).unwrap()).unwrap();
    let c = m.curvature();
    let [w, a, b] = prof.shapes().unwrap().map(|s| s.bind(len));
    let (wf, af, bf) = (|s: f64| w.eval(s), |s: f64| a.eval(s), |s: f64| b.eval(s));
    let g = doubly_warped(&wf, &af, &bf);
    let mut err = [0.0f64; 10];
    let mut scale = [0.0f64; 10];
    for i in 0..n {
        let s = m.grid().coord(i);
        let o = oracle_fields(&frame_curvature(
            &g,
            &[s, 0.0, 1.1, 0.0],
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

#[test]
fn curvature_converges_at_second_order_to_the_christoffel_oracle() {
    let len = 2.0 * std::f64::consts::PI;
    for seed in 0..4u64 {
        let prof = Profile::Warped {
            w: fourier(1.0, 0.3, 3 * seed),
            a: fourier(0.6, 0.4, 3 * seed + 1),
            b: fourier(1.2, 0.4, 3 * seed + 2),
        };
        let coarse = errors(&prof, 128, len);
        let fine = errors(&prof, 256, len);
        for k in 0..10 {
            let order = (coarse[k] / fine[k]).log2();
            assert!(
                order >= 1.9,
                "seed {seed} field {k}: order {order} ({} -> {})",
                coarse[k],
                fine[k]
            );
        }
    }
}
