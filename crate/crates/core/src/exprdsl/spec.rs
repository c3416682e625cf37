use std::collections::HashSet;
use std::fmt::Write as _;

use super::ast::{BinOp, Expr, ExprKind, Func, Span};
use super::error::{EvalError, ParseError, ParseErrorKind};
use super::parser::{eval_constant, interval, RESERVED};
use super::print::format_number;
use crate::chart::Interval;
use crate::jets::{Jet, JetError};

#[derive(Debug, Clone)]
pub(crate) enum RawStatement {
    Dim {
        n: usize,
        m: usize,
        n_span: Span,
        m_span: Span,
    },
    Vars(Vec<(String, Span)>),
    Const {
        name: (String, Span),
        value: Expr,
    },
    Components(Vec<Expr>),
    Domain {
        var: (String, Span),
        lo: Expr,
        hi: Expr,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Binding {
    Var(usize),
    Const(f64),
}

/// Default chart variable names: `s` for curves, `s, u2, …, un` otherwise.
pub fn default_var_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| if i == 0 { "s".to_string() } else { format!("u{}", i + 1) })
        .collect()
}

/// A validated immersion definition `x(s, u2, …, un) ∈ E^m`.
#[derive(Debug, Clone)]
pub struct ImmersionSpec {
    pub chart_dim: usize,
    pub ambient_dim: usize,
    pub var_names: Vec<String>,
    /// Named constants in definition order, already evaluated. `pi` is
    /// implicit and not listed.
    pub constants: Vec<(String, f64)>,
    pub components: Vec<Expr>,
    pub domain: Vec<Interval>,
    bindings: Vec<(String, Binding)>,
}

impl PartialEq for ImmersionSpec {
    fn eq(&self, other: &Self) -> bool {
        self.chart_dim == other.chart_dim
            && self.ambient_dim == other.ambient_dim
            && self.var_names == other.var_names
            && self.constants == other.constants
            && self.components == other.components
            && self.domain == other.domain
    }
}

impl ImmersionSpec {
    /// Builds and validates a spec from parts. Identifier spans in
    /// programmatically built trees are meaningless, so errors come back
    /// as plain messages.
    pub fn new(
        var_names: Vec<String>,
        ambient_dim: usize,
        constants: Vec<(String, f64)>,
        components: Vec<Expr>,
        domain: Vec<Interval>,
    ) -> Result<ImmersionSpec, String> {
        let n = var_names.len();
        let spec = ImmersionSpec {
            chart_dim: n,
            ambient_dim,
            bindings: make_bindings(&var_names, &constants),
            var_names,
            constants,
            components,
            domain,
        };
        if n == 0 || ambient_dim < n {
            return Err(format!("need m >= n >= 1, got n = {n}, m = {ambient_dim}"));
        }
        if spec.components.len() != ambient_dim {
            return Err(format!(
                "{} components for ambient dimension {ambient_dim}",
                spec.components.len()
            ));
        }
        if spec.domain.len() != n {
            return Err(format!("{} domain intervals for {n} variables", spec.domain.len()));
        }
        for c in &spec.components {
            let mut bad = None;
            c.visit_idents(&mut |name, _| {
                if bad.is_none() && spec.lookup(name).is_none() {
                    bad = Some(name.to_string());
                }
            });
            if let Some(name) = bad {
                return Err(format!("unknown identifier `{name}`"));
            }
        }
        Ok(spec)
    }

    pub(crate) fn from_statements(
        src: &str,
        statements: Vec<(RawStatement, Span)>,
    ) -> Result<ImmersionSpec, ParseError> {
        let err = |kind, msg: String, span| ParseError::new(kind, msg, span, src);
        let mut dims: Option<(usize, usize, Span, Span)> = None;
        let mut vars: Option<Vec<(String, Span)>> = None;
        let mut consts: Vec<((String, Span), Expr)> = Vec::new();
        let mut comps: Option<(Vec<Expr>, Span)> = None;
        let mut domains: Vec<((String, Span), Expr, Expr, Span)> = Vec::new();

        for (stmt, span) in statements {
            match stmt {
                RawStatement::Dim { n, m, n_span, m_span } => {
                    if dims.is_some() {
                        return Err(err(ParseErrorKind::Semantic, "duplicate `dim`".into(), span));
                    }
                    dims = Some((n, m, n_span, m_span));
                }
                RawStatement::Vars(v) => {
                    if vars.is_some() {
                        return Err(err(ParseErrorKind::Semantic, "duplicate `vars`".into(), span));
                    }
                    vars = Some(v);
                }
                RawStatement::Const { name, value } => consts.push((name, value)),
                RawStatement::Components(c) => {
                    if comps.is_some() {
                        return Err(err(ParseErrorKind::Semantic, "duplicate `x = [...]`".into(), span));
                    }
                    comps = Some((c, span));
                }
                RawStatement::Domain { var, lo, hi } => domains.push((var, lo, hi, span)),
            }
        }

        let end = Span::new(src.len(), src.len());
        let Some((n, m, n_span, m_span)) = dims else {
            return Err(err(ParseErrorKind::Semantic, "missing `dim n -> m` line".into(), end));
        };
        if m < n {
            return Err(err(
                ParseErrorKind::Semantic,
                format!("ambient dimension {m} is smaller than chart dimension {n}"),
                n_span.join(m_span),
            ));
        }

        let var_names: Vec<String> = match vars {
            Some(v) => {
                if v.len() != n {
                    let sp = v[0].1.join(v[v.len() - 1].1);
                    return Err(err(
                        ParseErrorKind::Semantic,
                        format!("`vars` lists {} names for chart dimension {n}", v.len()),
                        sp,
                    ));
                }
                let mut seen = HashSet::new();
                for (name, sp) in &v {
                    check_user_name(name, *sp, src)?;
                    if !seen.insert(name.clone()) {
                        return Err(err(
                            ParseErrorKind::Semantic,
                            format!("duplicate variable `{name}`"),
                            *sp,
                        ));
                    }
                }
                v.into_iter().map(|(s, _)| s).collect()
            }
            None => default_var_names(n),
        };

        let mut constants: Vec<(String, f64)> = Vec::new();
        for ((name, sp), value) in consts {
            check_user_name(&name, sp, src)?;
            if var_names.contains(&name) || constants.iter().any(|(c, _)| *c == name) {
                return Err(err(
                    ParseErrorKind::Semantic,
                    format!("`{name}` is already defined"),
                    sp,
                ));
            }
            let v = eval_constant(&value, &|id| lookup_const(&constants, id), src)?;
            constants.push((name, v));
        }

        let Some((components, comp_span)) = comps else {
            return Err(err(ParseErrorKind::Semantic, "missing `x = [...]` line".into(), end));
        };
        if components.len() != m {
            return Err(err(
                ParseErrorKind::Semantic,
                format!("`x` has {} components but `dim` declares m = {m}", components.len()),
                comp_span,
            ));
        }

        let mut domain: Vec<Option<Interval>> = vec![None; n];
        for ((name, sp), lo, hi, stmt_span) in domains {
            let Some(idx) = var_names.iter().position(|v| *v == name) else {
                return Err(err(
                    ParseErrorKind::UnknownIdentifier,
                    format!("`{name}` is not a chart variable"),
                    sp,
                ));
            };
            if domain[idx].is_some() {
                return Err(err(
                    ParseErrorKind::Semantic,
                    format!("duplicate domain for `{name}`"),
                    stmt_span,
                ));
            }
            let look = |id: &str| lookup_const(&constants, id);
            let a = eval_constant(&lo, &look, src)?;
            let b = eval_constant(&hi, &look, src)?;
            domain[idx] = Some(interval(a, b, lo.span.join(hi.span), src)?);
        }
        let domain: Vec<Interval> = domain
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                d.ok_or_else(|| {
                    err(
                        ParseErrorKind::Semantic,
                        format!("missing domain line `{} in [a, b]`", var_names[i]),
                        end,
                    )
                })
            })
            .collect::<Result<_, _>>()?;

        let spec = ImmersionSpec {
            chart_dim: n,
            ambient_dim: m,
            bindings: make_bindings(&var_names, &constants),
            var_names,
            constants,
            components,
            domain,
        };
        for c in &spec.components {
            let mut bad = None;
            c.visit_idents(&mut |name, sp| {
                if bad.is_none() && spec.lookup(name).is_none() {
                    bad = Some((name.to_string(), sp));
                }
            });
            if let Some((name, sp)) = bad {
                return Err(err(
                    ParseErrorKind::UnknownIdentifier,
                    format!("unknown identifier `{name}`"),
                    sp,
                ));
            }
        }
        Ok(spec)
    }

    fn lookup(&self, name: &str) -> Option<Binding> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, b)| *b)
    }

    /// Evaluates every component as a jet at `point`.
    pub fn eval(&self, point: &[f64], order: u8) -> Result<Vec<Jet>, EvalError> {
        eval_spec(self, point, order)
    }

    /// Renders the spec back to `.imm` source.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        writeln!(out, "dim {} -> {}", self.chart_dim, self.ambient_dim).unwrap();
        if self.var_names != default_var_names(self.chart_dim) {
            writeln!(out, "vars {}", self.var_names.join(", ")).unwrap();
        }
        for (name, v) in &self.constants {
            writeln!(out, "const {name} = {}", format_number(*v)).unwrap();
        }
        if self.components.len() == 1 {
            writeln!(out, "x = [{}]", self.components[0]).unwrap();
        } else {
            writeln!(out, "x = [").unwrap();
            for (i, c) in self.components.iter().enumerate() {
                let sep = if i + 1 < self.components.len() { "," } else { "" };
                writeln!(out, "  {c}{sep}").unwrap();
            }
            writeln!(out, "]").unwrap();
        }
        for (name, iv) in self.var_names.iter().zip(&self.domain) {
            writeln!(
                out,
                "{name} in [{}, {}]",
                format_number(iv.lo),
                format_number(iv.hi)
            )
            .unwrap();
        }
        out
    }
}

fn make_bindings(vars: &[String], constants: &[(String, f64)]) -> Vec<(String, Binding)> {
    let mut b: Vec<(String, Binding)> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), Binding::Var(i)))
        .collect();
    b.extend(constants.iter().map(|(n, v)| (n.clone(), Binding::Const(*v))));
    b.push(("pi".into(), Binding::Const(std::f64::consts::PI)));
    b
}

fn lookup_const(constants: &[(String, f64)], id: &str) -> Option<f64> {
    if id == "pi" {
        return Some(std::f64::consts::PI);
    }
    constants.iter().find(|(n, _)| n == id).map(|(_, v)| *v)
}

fn check_user_name(name: &str, span: Span, src: &str) -> Result<(), ParseError> {
    if RESERVED.contains(&name) || Func::from_name(name).is_some() || name == "pi" {
        return Err(ParseError::new(
            ParseErrorKind::Semantic,
            format!("`{name}` is a reserved name"),
            span,
            src,
        ));
    }
    Ok(())
}

/// Evaluates each component with the chart variables seeded as jet
/// variables at `point`.
pub fn eval_spec(spec: &ImmersionSpec, point: &[f64], order: u8) -> Result<Vec<Jet>, EvalError> {
    if point.len() != spec.chart_dim {
        return Err(EvalError::Dimension {
            expected: spec.chart_dim,
            got: point.len(),
        });
    }
    for (i, (&p, iv)) in point.iter().zip(&spec.domain).enumerate() {
        if !iv.contains_with_slack(p) {
            return Err(EvalError::OutsideDomain {
                var: spec.var_names[i].clone(),
                value: p,
                lo: iv.lo,
                hi: iv.hi,
            });
        }
    }
    let seeds = Jet::seed(point, order).map_err(|source| EvalError::Jet {
        component: 0,
        source,
    })?;
    spec.components
        .iter()
        .enumerate()
        .map(|(component, e)| {
            eval_jet(spec, e, &seeds).map_err(|source| EvalError::Jet { component, source })
        })
        .collect()
}

fn eval_jet(spec: &ImmersionSpec, e: &Expr, seeds: &[Jet]) -> Result<Jet, JetError> {
    let rec = |x: &Expr| eval_jet(spec, x, seeds);
    Ok(match &e.kind {
        ExprKind::Num(v) => seeds[0].constant_like(*v),
        ExprKind::Ident(name) => match spec.lookup(name).expect("identifiers resolved at parse") {
            Binding::Var(i) => seeds[i].clone(),
            Binding::Const(v) => seeds[0].constant_like(v),
        },
        ExprKind::Neg(x) => -rec(x)?,
        ExprKind::Binary(op, l, r) => {
            let (a, b) = (rec(l)?, rec(r)?);
            match op {
                BinOp::Add => &a + &b,
                BinOp::Sub => &a - &b,
                BinOp::Mul => &a * &b,
                BinOp::Div => a.div(&b)?,
            }
        }
        ExprKind::Pow(b, x) => rec(b)?.powf(x.literal_value().expect("literal exponent"))?,
        ExprKind::Call(f, args) => {
            let a = rec(&args[0])?;
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tan => a.tan()?,
                Func::Atan => a.atan(),
                Func::Sqrt => a.sqrt()?,
                Func::Exp => a.exp()?,
                Func::Log => a.ln()?,
                Func::Pow => a.powf(args[1].literal_value().expect("literal exponent"))?,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse_immersion;
    use super::*;

    const HELIX: &str = "dim 1 -> 3; x = [3*cos(s), 3*sin(s), 4*s]; s in [0, 6.5]";

    #[test]
    fn helix_one_liner() {
        let spec = parse_immersion(HELIX).unwrap();
        assert_eq!((spec.chart_dim, spec.ambient_dim), (1, 3));
        assert_eq!(spec.var_names, vec!["s"]);
        assert_eq!(spec.domain[0], Interval::new(0.0, 6.5).unwrap());
        let x = spec.eval(&[0.0], 1).unwrap();
        let vals: Vec<f64> = x.iter().map(|j| j.value()).collect();
        let ders: Vec<f64> = x.iter().map(|j| j.partial(&[0]).unwrap()).collect();
        assert_eq!(vals, vec![3.0, 0.0, 0.0]);
        assert_eq!(ders, vec![0.0, 3.0, 4.0]);
    }

    #[test]
    fn power_rule_component() {
        let spec = parse_immersion("dim 1 -> 1\nx = [s^2]\ns in [0, 3]").unwrap();
        let x = &spec.eval(&[2.0], 2).unwrap()[0];
        assert_eq!(x.value(), 4.0);
        assert_eq!(x.partial(&[0]).unwrap(), 4.0);
        assert_eq!(x.partial(&[0, 0]).unwrap(), 2.0);
    }

    #[test]
    fn unclosed_bracket() {
        let src = "dim 1 -> 1\nx = [cos(u2)";
        let err = parse_immersion(src).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert_eq!(err.message, "unclosed `[`");
        assert_eq!(err.span, Span::new(15, 16));
        assert_eq!((err.line, err.column), (2, 5));
    }

    #[test]
    fn unknown_identifier_span() {
        let src = "dim 1 -> 2\nx = [s, q * s]\ns in [0, 1]";
        let err = parse_immersion(src).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier);
        assert_eq!(&src[err.span.start..err.span.end], "q");
        assert_eq!((err.line, err.column), (2, 9));
    }

    #[test]
    fn constants_aliases_and_comments() {
        let src = "# a cone\ndim 2 -> 3\nvars r, t\nconst k = 2 * pi\nx = [r*cos(t), r*sin(t),\n     r]\nr in [0.5, 2]\nt in [0, k]  # full turn\n";
        let spec = parse_immersion(src).unwrap();
        assert_eq!(spec.var_names, vec!["r", "t"]);
        assert_eq!(spec.constants, vec![("k".to_string(), 2.0 * std::f64::consts::PI)]);
        assert_eq!(spec.domain[1].hi, 2.0 * std::f64::consts::PI);
        let again = parse_immersion(&spec.to_source()).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn semantic_errors() {
        let cases = [
            ("x = [s]\ns in [0,1]", "missing `dim"),
            ("dim 1 -> 2\nx = [s]\ns in [0,1]", "components"),
            ("dim 2 -> 1\nx = [s]", "smaller"),
            ("dim 1 -> 1\nx = [s]", "missing domain"),
            ("dim 1 -> 1\nx = [s]\ns in [1, 1]", "positive length"),
            ("dim 1 -> 1\nx = [s]\ns in [0,1]\ns in [0,2]", "duplicate domain"),
            ("dim 1 -> 1\nconst sin = 2\nx = [s]\ns in [0,1]", "reserved"),
        ];
        for (src, needle) in cases {
            let err = parse_immersion(src).unwrap_err();
            assert!(
                err.message.contains(needle),
                "{src:?}: {err} does not mention {needle:?}"
            );
            assert!(err.span.end <= src.len());
        }
    }

    #[test]
    fn evaluation_errors() {
        let spec = parse_immersion("dim 1 -> 2\nx = [s, log(s - 1)]\ns in [0, 3]").unwrap();
        assert!(matches!(
            spec.eval(&[5.0], 1),
            Err(EvalError::OutsideDomain { .. })
        ));
        assert!(matches!(
            spec.eval(&[0.5], 1),
            Err(EvalError::Jet {
                component: 1,
                source: JetError::Domain { function: "log", .. }
            })
        ));
    }
}
