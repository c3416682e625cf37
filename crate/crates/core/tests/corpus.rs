//! Closed-form oracles over the reference immersions.

use approx::assert_abs_diff_eq;
use rectifying::chart::Grid;
use rectifying::geometry::{curvature, first_normal_space, shape_operator, snapshot, CurvatureRoute};
use rectifying::immersion::{
    builtin_by_name, clifford_torus, cylinder, helix, plane, saddle, torus, unit_sphere, Immersion,
};
use rectifying::rectify::position_split;

fn corpus() -> Vec<Immersion> {
    [
        "plane",
        "sphere",
        "cylinder",
        "torus",
        "saddle",
        "helix",
        "cone",
        "clifford_torus",
        "rectifying:c=1,base=ellipse,m=5",
    ]
    .iter()
    .map(|n| builtin_by_name(n).unwrap())
    .collect()
}

fn e(n: usize, i: usize) -> Vec<f64> {
    (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect()
}

#[test]
fn gauss_and_codazzi_hold_across_the_corpus() {
    for imm in corpus() {
        for p in imm.default_grid().points() {
            let snap = snapshot(&imm, &p).unwrap();
            let curv = curvature(&imm, &p).unwrap();
            assert!(curv.gauss_residual() <= 1e-7, "{} at {p:?}", imm.label());
            assert!(snap.codazzi_residual() <= 1e-7, "{} at {p:?}", imm.label());
            assert!(snap.tangency_defect() <= 1e-10, "{} at {p:?}", imm.label());
            assert!(snap.connection_antisymmetry_defect() <= 1e-10, "{} at {p:?}", imm.label());
            assert!(curv.symmetry_defect() <= 1e-9, "{} at {p:?}", imm.label());
        }
    }
}

#[test]
fn second_fundamental_form_matches_finite_differences() {
    let h = 1e-4;
    for imm in corpus() {
        let n = imm.chart_dim();
        for p in imm.default_grid().points().iter().step_by(7) {
            let snap = snapshot(&imm, p).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let at = |di: f64, dj: f64| {
                        let mut q = p.clone();
                        q[i] += di;
                        q[j] += dj;
                        imm.position(&q).unwrap()
                    };
                    let (pp, pm, mp, mm) = (at(h, h), at(h, -h), at(-h, h), at(-h, -h));
                    let second: Vec<f64> = (0..pp.len())
                        .map(|k| (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h))
                        .collect();
                    let fd = snap.project_normal(&second);
                    for (a, b) in fd.iter().zip(&snap.h[i][j]) {
                        assert_abs_diff_eq!(a, b, epsilon = 1e-6);
                    }
                }
            }
        }
    }
}

#[test]
fn sphere_metric_christoffels_and_curvature() {
    let s = unit_sphere(2, 3).unwrap();
    for t in [0.3, 1.0, 2.2] {
        let p = [t, 0.7];
        let snap = snapshot(&s, &p).unwrap();
        assert_abs_diff_eq!(snap.metric[(0, 0)], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(snap.metric[(1, 1)], t.sin().powi(2), epsilon = 1e-14);
        assert_abs_diff_eq!(snap.christoffel[0][1][1], -t.sin() * t.cos(), epsilon = 1e-13);
        assert_abs_diff_eq!(snap.christoffel[1][0][1], t.cos() / t.sin(), epsilon = 1e-12);
        let curv = curvature(&s, &p).unwrap();
        for route in [CurvatureRoute::Intrinsic, CurvatureRoute::Gauss] {
            assert_abs_diff_eq!(curv.sectional_by(route, &e(2, 0), &e(2, 1)).unwrap(), 1.0, epsilon = 1e-12);
        }
        let minus_x: Vec<f64> = snap.position.iter().map(|v| -v).collect();
        let a = shape_operator(&snap, &minus_x).unwrap();
        let trace = a.trace();
        assert_abs_diff_eq!(trace, 2.0, epsilon = 1e-12);
        assert!((a.clone() - a.transpose()).abs().max() < 1e-14);
        let split = position_split(&snap);
        assert!(split.rho <= 1e-10 * (1.0 + split.nu));
    }
}

#[test]
fn torus_gaussian_curvature() {
    let (big, small) = (2.0, 1.0);
    let t = torus(big, small).unwrap();
    for v in [0.2, 1.1, 2.9, 4.0] {
        let p = [0.5, v];
        let k = curvature(&t, &p).unwrap().sectional(&e(2, 0), &e(2, 1)).unwrap();
        assert_abs_diff_eq!(k, v.cos() / (small * (big + small * v.cos())), epsilon = 1e-12);
        let snap = snapshot(&t, &p).unwrap();
        assert_abs_diff_eq!(snap.metric[(0, 0)], (big + small * v.cos()).powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(snap.metric[(1, 1)], small * small, epsilon = 1e-12);
    }
}

#[test]
fn saddle_gaussian_curvature() {
    let g = saddle().unwrap();
    for p in Grid::new(g.domain(), &[4, 3], 0.05).unwrap().points() {
        let (s, u) = (p[0], p[1]);
        let k = curvature(&g, &p).unwrap().sectional(&e(2, 0), &e(2, 1)).unwrap();
        let w = 1.0 + 4.0 * s * s + 4.0 * u * u;
        assert_abs_diff_eq!(k, -4.0 / (w * w), epsilon = 1e-12);
    }
}

#[test]
fn flat_examples() {
    for imm in [plane().unwrap(), cylinder(2.0).unwrap(), clifford_torus().unwrap()] {
        for p in imm.default_grid().points().iter().step_by(5) {
            let k = curvature(&imm, p).unwrap().sectional(&e(2, 0), &e(2, 1)).unwrap();
            assert_abs_diff_eq!(k, 0.0, epsilon = 1e-12);
        }
    }
    let cyl = cylinder(2.0).unwrap();
    let snap = snapshot(&cyl, &[0.4, 0.1]).unwrap();
    let nsp = first_normal_space(&snap);
    assert_eq!(nsp.dim, 1);
    let a = shape_operator(&snap, &nsp.basis[0]).unwrap();
    let mut eig: Vec<f64> = a.symmetric_eigenvalues().iter().map(|v| v.abs()).collect();
    eig.sort_by(f64::total_cmp);
    // principal curvatures 0 and 1/r
    assert_abs_diff_eq!(eig[0], 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(eig[1], 0.5, epsilon = 1e-12);
    let ct = snapshot(&clifford_torus().unwrap(), &[0.3, 1.2]).unwrap();
    assert_eq!(first_normal_space(&ct).dim, 2);
}

#[test]
fn cone_position_is_tangent() {
    let cone = builtin_by_name("cone").unwrap();
    for p in cone.default_grid().points() {
        let snap = snapshot(&cone, &p).unwrap();
        let split = position_split(&snap);
        let norm_x = snap.position.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(split.nu <= 1e-10 * (1.0 + norm_x));
        let k = curvature(&cone, &p).unwrap().sectional(&e(2, 0), &e(2, 1)).unwrap();
        assert_abs_diff_eq!(k, 0.0, epsilon = 1e-12);
    }
}

#[test]
fn helix_metric() {
    let h = helix(3.0, 4.0).unwrap();
    let snap = snapshot(&h, &[1.3]).unwrap();
    assert_abs_diff_eq!(snap.metric[(0, 0)], 25.0, epsilon = 1e-12);
    // |h(∂s, ∂s)| = a for the helix
    let hn: f64 = snap.h[0][0].iter().map(|v| v * v).sum::<f64>().sqrt();
    assert_abs_diff_eq!(hn, 3.0, epsilon = 1e-12);
}
