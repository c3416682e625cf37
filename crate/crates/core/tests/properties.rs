mod common;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rectifying::exprdsl::{eval_spec, parse_expr, parse_immersion, print_expr};
use rectifying::geometry::{curvature, shape_operator, snapshot};
use rectifying::immersion::{
    construct_rectifying, spherical_factor, torus, unit_sphere, BaseFamily, Immersion, DEFAULT_T_RANGE,
};
use rectifying::jets::{Elementary, Jet};
use rectifying::rectify::{
    classify, concurrency_residual, position_split, rectifying_curve_residual, rectifying_residual, ReportOptions,
};

fn base_family() -> impl Strategy<Value = BaseFamily> {
    prop_oneof![
        Just(BaseFamily::GreatCircle),
        (0.3f64..1.3).prop_map(|polar| BaseFamily::SmallCircle { polar }),
        (0.6f64..1.4, 0.3f64..1.0, 0.2f64..1.2).prop_map(|(a, b, d)| BaseFamily::Ellipse { a, b, d }),
        Just(BaseFamily::Sphere),
    ]
}

fn rectifying_example() -> impl Strategy<Value = Immersion> {
    (0.3f64..3.0, base_family(), 0usize..=1).prop_map(|(c, fam, extra)| {
        let m = fam.embedding_dim() + 1 + extra;
        construct_rectifying(c, &fam.factor(m - 1).unwrap(), DEFAULT_T_RANGE).unwrap()
    })
}

fn point_in(imm: &Immersion, frac: &[f64]) -> Vec<f64> {
    imm.domain()
        .iter()
        .zip(frac)
        .map(|(iv, f)| iv.lo + (0.05 + 0.9 * f) * iv.len())
        .collect()
}

fn jet3(vals: [f64; 10]) -> Jet {
    // arbitrary order-3 jet in two variables built from arithmetic only
    let v = Jet::seed(&[vals[0], vals[1]], 3).unwrap();
    let (x, y) = (&v[0], &v[1]);
    let a = &(x * vals[2]) + &(y * vals[3]);
    let b = &(&(x * x) * vals[4]) + &(&(x * y) * vals[5]);
    let c = &(&(&(y * y) * y) * vals[6]) + &(x * vals[7]);
    &(&(&a * &b) + &c) + &(&(y * vals[8]) + vals[9])
}

fn close(a: &Jet, b: &Jet, tol: f64) -> bool {
    a.coefficients()
        .iter()
        .zip(b.coefficients())
        .all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_jets_match_finite_differences(
        expr in common::polynomial(vec!["a", "b", "c", "d"]),
        frac in proptest::collection::vec(-0.9f64..0.9, 4),
    ) {
        let spec = common::scalar_spec(&["a", "b", "c", "d"], &expr);
        let err = common::worst_fd_error(&spec, &frac);
        prop_assert!(err <= common::FD_TOL, "{expr}: {err:e}");
    }

    #[test]
    fn elementary_jets_match_finite_differences(
        expr in common::smooth_expr(vec!["a", "b", "c"]),
        frac in proptest::collection::vec(-0.9f64..0.9, 3),
    ) {
        let spec = common::scalar_spec(&["a", "b", "c"], &expr);
        let err = common::worst_fd_error(&spec, &frac);
        prop_assert!(err <= common::FD_TOL, "{expr}: {err:e}");
    }

    #[test]
    fn jet_addition_and_multiplication_laws(
        p in proptest::array::uniform10(-2.0f64..2.0),
        q in proptest::array::uniform10(-2.0f64..2.0),
        r in proptest::array::uniform10(-2.0f64..2.0),
    ) {
        let mut q = q;
        let mut r = r;
        q[0] = p[0];
        q[1] = p[1];
        r[0] = p[0];
        r[1] = p[1];
        let (a, b, c) = (jet3(p), jet3(q), jet3(r));
        prop_assert!(close(&(&a + &b), &(&b + &a), 1e-12));
        prop_assert!(close(&(&a * &b), &(&b * &a), 1e-12));
        prop_assert!(close(&(&(&a + &b) + &c), &(&a + &(&b + &c)), 1e-12));
        prop_assert!(close(&(&(&a * &b) * &c), &(&a * &(&b * &c)), 1e-12));
        prop_assert!(close(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)), 1e-12));
    }

    #[test]
    fn chain_rule_through_composition(
        p in proptest::array::uniform10(-1.0f64..1.0),
        which in 0usize..6,
    ) {
        let g = jet3(p).scale(0.2).sin();
        let outer = [
            Elementary::Sin,
            Elementary::Cos,
            Elementary::Atan,
            Elementary::Exp,
            Elementary::Sqrt,
            Elementary::Log,
        ][which];
        let shifted = &g + 2.0;
        let direct = shifted.apply(outer).unwrap();
        let f = Jet::variable(0, shifted.value(), 1, 3).unwrap().apply(outer).unwrap();
        let composed = f.compose(&shifted).unwrap();
        prop_assert!(close(&direct, &composed, 1e-9), "{:?}", outer);
    }

    #[test]
    fn expression_print_parse_is_identity(expr in common::smooth_expr(vec!["s", "u2", "k"])) {
        let ast = parse_expr(&expr).unwrap();
        let printed = print_expr(&ast);
        let again = parse_expr(&printed).unwrap();
        prop_assert_eq!(&again, &ast);
        prop_assert_eq!(print_expr(&again), printed);
    }

    #[test]
    fn program_print_parse_is_identity(src in common::program()) {
        let spec = parse_immersion(&src).unwrap();
        let printed = spec.to_source();
        let again = parse_immersion(&printed).unwrap();
        prop_assert_eq!(&again, &spec);
        prop_assert_eq!(again.to_source(), printed);
    }

    #[test]
    fn evaluation_ignores_component_order(src in common::program(), frac in proptest::collection::vec(0.0f64..1.0, 3)) {
        let spec = parse_immersion(&src).unwrap();
        let p: Vec<f64> = spec.domain.iter().zip(&frac).map(|(iv, f)| iv.lo + f * iv.len()).collect();
        let all = eval_spec(&spec, &p, 2).unwrap();
        let mut reversed = spec.clone();
        reversed.components.reverse();
        let rev = eval_spec(&reversed, &p, 2).unwrap();
        for (a, b) in all.iter().zip(rev.iter().rev()) {
            prop_assert_eq!(a.coefficients(), b.coefficients());
        }
    }

    #[test]
    fn parse_errors_point_inside_source(src in common::program(), cut in 0usize..200) {
        // skip the leading comment line
        let body = src.find('\n').unwrap() + 1;
        let cut = (body + cut).min(src.len() - 1);
        if !src.is_char_boundary(cut) {
            return Ok(());
        }
        let broken = format!("{}@{}", &src[..cut], &src[cut..]);
        let err = parse_immersion(&broken).unwrap_err();
        prop_assert!(err.span.end <= broken.len());
        prop_assert!(err.span.start <= err.span.end);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn constructed_examples_are_rectifying_and_concurrent(
        x in rectifying_example(),
        frac in proptest::collection::vec(0.0f64..1.0, 3),
    ) {
        let p = point_in(&x, &frac);
        let snap = snapshot(&x, &p).unwrap();
        prop_assert!(rectifying_residual(&snap) < 1e-8);
        prop_assert!(concurrency_residual(&x, &p).unwrap() < 1e-8);
        let split = position_split(&snap);
        let a = shape_operator(&snap, &split.normal).unwrap();
        prop_assert!(a.abs().max() < 1e-8);
        let s = p[0];
        let x2: f64 = snap.position.iter().map(|v| v * v).sum();
        prop_assert!((split.rho - s).abs() < 1e-8 * (1.0 + s));
        prop_assert!((x2 - s * s - split.nu * split.nu).abs() < 1e-8 * (1.0 + x2));
    }

    #[test]
    fn spherical_factor_metric_is_warped(
        c in 0.3f64..3.0,
        fam in base_family(),
        frac in proptest::collection::vec(0.0f64..1.0, 3),
    ) {
        let m = fam.embedding_dim() + 1;
        let base = fam.factor(m - 1).unwrap();
        let y = spherical_factor(c, &base, DEFAULT_T_RANGE).unwrap();
        let x = construct_rectifying(c, &base, DEFAULT_T_RANGE).unwrap();
        let p = point_in(&x, &frac);
        let s = p[0];
        let gy = snapshot(y.immersion(), &p).unwrap().metric;
        let gx = snapshot(&x, &p).unwrap().metric;
        let gf = snapshot(base.immersion(), &p[1..]).unwrap().metric;
        let w = s * s + c * c;
        prop_assert!((gy[(0, 0)] - c * c / (w * w)).abs() < 1e-8);
        prop_assert!((gx[(0, 0)] - 1.0).abs() < 1e-8);
        for i in 1..p.len() {
            prop_assert!(gy[(0, i)].abs() < 1e-8 && gx[(0, i)].abs() < 1e-8);
            for j in 1..p.len() {
                prop_assert!((gy[(i, j)] - s * s / w * gf[(i - 1, j - 1)]).abs() < 1e-8);
                prop_assert!((gx[(i, j)] - s * s * gf[(i - 1, j - 1)]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn homothety_scales_split_and_keeps_verdicts(x in rectifying_example(), mu_big in any::<bool>()) {
        let mu = if mu_big { 3.0 } else { 0.5 };
        let y = x.scaled(mu);
        let grid = rectifying::chart::Grid::new(x.domain(), &vec![3; x.chart_dim()], 0.05).unwrap();
        let opts = ReportOptions::default();
        let rx = classify(&x, &grid, &opts).unwrap();
        let ry = classify(&y, &grid, &opts).unwrap();
        prop_assert_eq!(&rx.classification.summary, &ry.classification.summary);
        assert_relative_eq!(ry.classification.rho_max, mu * rx.classification.rho_max, max_relative = 1e-12);
        assert_relative_eq!(ry.classification.nu_min, mu * rx.classification.nu_min, max_relative = 1e-12);
        for p in grid.points().iter().take(3) {
            let kx = curvature(&x, p).unwrap();
            let ky = curvature(&y, p).unwrap();
            let n = x.chart_dim();
            if n >= 2 {
                let e: Vec<f64> = (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
                let f: Vec<f64> = (0..n).map(|i| if i == 1 { 1.0 } else { 0.0 }).collect();
                let (a, b) = (kx.sectional(&e, &f).unwrap(), ky.sectional(&e, &f).unwrap());
                prop_assert!((b * mu * mu - a).abs() < 1e-9 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn negative_controls_fail_both_criteria(frac in proptest::collection::vec(0.0f64..1.0, 2), which in 0usize..3) {
        let imm = match which {
            0 => unit_sphere(2, 3).unwrap(),
            1 => torus(2.0, 1.0).unwrap(),
            _ => rectifying::immersion::saddle().unwrap(),
        };
        let p = point_in(&imm, &frac);
        let snap = snapshot(&imm, &p).unwrap();
        let split = position_split(&snap);
        let rect = rectifying_residual(&snap);
        let conc = concurrency_residual(&imm, &p).unwrap();
        // both residuals vanish together or not at all
        prop_assert_eq!(rect < 1e-8, conc < 1e-8);
        if split.nu > 1e-8 {
            let a = shape_operator(&snap, &split.normal).unwrap();
            prop_assert_eq!(a.abs().max() < 1e-8, rect < 1e-8);
        }
    }

    #[test]
    fn curve_test_agrees_with_general_test(c in 0.3f64..3.0, polar in 0.3f64..1.3, frac in 0.0f64..1.0) {
        let name = format!("rectifying_curve:c={c},base=small_circle,polar={polar}");
        let curve = rectifying::immersion::builtin_by_name(&name).unwrap();
        let p = point_in(&curve, &[frac]);
        let a = rectifying_curve_residual(&curve, p[0]).unwrap().residual < 1e-8;
        let b = rectifying_residual(&snapshot(&curve, &p).unwrap()) < 1e-8;
        prop_assert!(a && b);
        let helix = rectifying::immersion::helix(3.0, 4.0).unwrap();
        let q = [1.0 + 3.0 * frac];
        let a = rectifying_curve_residual(&helix, q[0]).unwrap().residual < 1e-8;
        let b = rectifying_residual(&snapshot(&helix, &q).unwrap()) < 1e-8;
        prop_assert_eq!(a, b);
    }
}
