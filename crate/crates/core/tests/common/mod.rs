//! Generators and finite-difference oracles shared by the property suites.
#![allow(dead_code)]

use proptest::prelude::*;
use rectifying::exprdsl::{eval_spec, parse_immersion, ImmersionSpec};
use rectifying::jets::Jet;

pub const FD_STEP: f64 = 1e-4;
pub const FD_TOL: f64 = 1e-5;

fn literal() -> impl Strategy<Value = String> {
    (1u32..=16).prop_map(|k| format!("{}", f64::from(k) / 8.0))
}

/// Smooth expressions over `vars` that stay finite and moderate on
/// `[-1, 1]^n`.
pub fn smooth_expr(vars: Vec<&'static str>) -> BoxedStrategy<String> {
    let leaf = prop_oneof![
        proptest::sample::select(vars).prop_map(str::to_string),
        literal(),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} * {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) / (1.5 + sin({b}))")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("atan({a})")),
            inner.clone().prop_map(|a| format!("exp(sin({a}))")),
            inner.clone().prop_map(|a| format!("sqrt(2 + cos({a}))")),
            inner.clone().prop_map(|a| format!("log(2 + sin({a}))")),
            inner.clone().prop_map(|a| format!("tan(0.5 * sin({a}))")),
            inner.clone().prop_map(|a| format!("pow(2 + sin({a}), 1.5)")),
            inner.clone().prop_map(|a| format!("(sin({a}))^3")),
            inner.prop_map(|a| format!("-{a}")),
        ]
    })
    .boxed()
}

/// Polynomials of total degree at most 6 in `vars`.
pub fn polynomial(vars: Vec<&'static str>) -> BoxedStrategy<String> {
    let n = vars.len();
    let monomial = (
        -20i32..=20,
        proptest::collection::vec(0u32..=3, n).prop_filter("degree <= 6", |e| e.iter().sum::<u32>() <= 6),
    )
        .prop_map(move |(c, exps)| {
            let mut term = format!("{}", f64::from(c) / 4.0);
            for (v, e) in vars.iter().zip(exps) {
                if e == 1 {
                    term.push_str(&format!(" * {v}"));
                } else if e > 1 {
                    term.push_str(&format!(" * {v}^{e}"));
                }
            }
            term
        });
    proptest::collection::vec(monomial, 1..8)
        .prop_map(|terms| terms.join(" + "))
        .boxed()
}

/// `dim n -> n` over `[-1, 1]^n` with `expr` as the first component and
/// zeros after it.
pub fn scalar_spec(vars: &[&str], expr: &str) -> ImmersionSpec {
    let n = vars.len();
    let pad = ", 0".repeat(n - 1);
    let mut src = format!("dim {n} -> {n}\nvars {}\nx = [{expr}{pad}]\n", vars.join(", "));
    for v in vars {
        src.push_str(&format!("{v} in [-1, 1]\n"));
    }
    parse_immersion(&src).unwrap_or_else(|e| panic!("generated source failed to parse: {e}\n{src}"))
}

fn jet_at(spec: &ImmersionSpec, p: &[f64], order: u8) -> Jet {
    eval_spec(spec, p, order).expect("evaluates")[0].clone()
}

fn partial_sets(n: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..order {
        let mut next = Vec::new();
        for f in &frontier {
            let start = f.last().copied().unwrap_or(0);
            for v in start..n {
                let mut g = f.clone();
                g.push(v);
                next.push(g);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Worst `|jet − fd| / max(1, |jet|)` over all partials of order 1..=3.
/// Order-k partials are differenced from order-(k−1) jet partials, so each
/// order is checked against the one below it down to plain values.
pub fn worst_fd_error(spec: &ImmersionSpec, p: &[f64]) -> f64 {
    let n = p.len();
    let base = jet_at(spec, p, 3);
    let mut worst: f64 = 0.0;
    for set in partial_sets(n, 3).into_iter().filter(|s| !s.is_empty()) {
        let (last, lower) = set.split_last().expect("nonempty");
        let mut plus = p.to_vec();
        let mut minus = p.to_vec();
        plus[*last] += FD_STEP;
        minus[*last] -= FD_STEP;
        let order = lower.len() as u8;
        let fp = jet_at(spec, &plus, order).partial(lower).expect("partial");
        let fm = jet_at(spec, &minus, order).partial(lower).expect("partial");
        let fd = (fp - fm) / (2.0 * FD_STEP);
        let exact = base.partial(&set).expect("partial");
        worst = worst.max((exact - fd).abs() / exact.abs().max(1.0));
    }
    worst
}

/// Random well-formed `.imm` programs: constants, renamed variables, and
/// several components.
pub fn program() -> BoxedStrategy<String> {
    (1usize..=3, 0usize..=2, any::<bool>(), 0usize..=2)
        .prop_flat_map(|(n, extra, rename, nconst)| {
            let m = n + extra;
            let vars: Vec<&'static str> = if rename {
                ["p", "q", "w"][..n].to_vec()
            } else {
                ["s", "u2", "u3"][..n].to_vec()
            };
            let consts: Vec<&'static str> = ["k", "kk"][..nconst].to_vec();
            let mut names = vars.clone();
            names.extend(consts.iter().copied());
            names.push("pi");
            (
                Just((n, m, rename, vars.clone(), consts.clone())),
                proptest::collection::vec(smooth_expr(vec!["pi"]), nconst),
                proptest::collection::vec(smooth_expr(names), m),
                proptest::collection::vec((-8i32..0, 1i32..8), n),
            )
        })
        .prop_map(|((n, m, rename, vars, consts), cexprs, comps, bounds)| {
            let mut src = format!("# generated\ndim {n} -> {m}\n");
            if rename {
                src.push_str(&format!("vars {}\n", vars.join(", ")));
            }
            for (c, e) in consts.iter().zip(&cexprs) {
                src.push_str(&format!("const {c} = {e}\n"));
            }
            src.push_str(&format!("x = [{}]\n", comps.join(", ")));
            for (v, (lo, hi)) in vars.iter().zip(bounds) {
                src.push_str(&format!("{v} in [{}, {}]\n", f64::from(lo) / 8.0, f64::from(hi) / 8.0));
            }
            src
        })
        .boxed()
}
