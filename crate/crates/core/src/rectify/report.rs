use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::analysis::{analyze_grid, PointAnalysis};
use super::Tolerances;
use crate::chart::Grid;
use crate::format::{self, ser_f64, ser_opt_f64, ser_vec_f64, Num};
use crate::geometry::GeometryError;
use crate::immersion::Immersion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "n/a",
        }
    }
}

/// One named residual against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub description: String,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Grid points contributing to `value`.
    pub points: usize,
}

impl Check {
    /// Maximum over the defined values; a check with no defined values is
    /// not applicable.
    fn max_of(
        name: &str,
        description: &str,
        values: impl IntoIterator<Item = Option<f64>>,
        tolerance: f64,
        applicable: bool,
    ) -> Check {
        let mut value = f64::NAN;
        let mut points = 0;
        for v in values.into_iter().flatten() {
            value = if points == 0 { v } else { value.max(v) };
            points += 1;
        }
        Check::new(name, description, value, points, tolerance, applicable)
    }

    fn new(name: &str, description: &str, value: f64, points: usize, tolerance: f64, applicable: bool) -> Check {
        let verdict = if !applicable || points == 0 || value.is_nan() {
            Verdict::NotApplicable
        } else if value <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Check {
            name: name.into(),
            description: description.into(),
            value,
            tolerance,
            verdict,
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub conic: bool,
    pub spherical: bool,
    pub proper: bool,
    pub rectifying: bool,
    pub proper_rectifying: bool,
    pub summary: String,
    #[serde(serialize_with = "ser_f64")]
    pub rho_min: f64,
    #[serde(serialize_with = "ser_f64")]
    pub rho_max: f64,
    #[serde(serialize_with = "ser_f64")]
    pub nu_min: f64,
    #[serde(serialize_with = "ser_f64")]
    pub nu_max: f64,
}

/// Constants fitted from grid data. `b`, `c1`, `c2` need a chart
/// coordinate named `s`: `|x^T| ≈ s + b` and `|x|² ≈ s² + c1 s + c2`
/// (with the `s²` coefficient reported separately).
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FittedConstants {
    #[serde(serialize_with = "ser_opt_f64")]
    pub b: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub b_residual: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub c1: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub c2: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub s_fit_leading: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub s_fit_residual: Option<f64>,
    /// Mean of `|x^N|`.
    #[serde(serialize_with = "ser_opt_f64")]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridDescription {
    pub sizes: Vec<usize>,
    pub bounds: Vec<[Num; 2]>,
    pub points: usize,
}

impl GridDescription {
    pub fn of(grid: &Grid) -> GridDescription {
        GridDescription {
            sizes: grid.sizes(),
            bounds: grid.bounds.iter().map(|iv| [Num(iv.lo), Num(iv.hi)]).collect(),
            points: grid.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointNote {
    #[serde(serialize_with = "ser_vec_f64")]
    pub point: Vec<f64>,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Classify,
    Verify,
}

/// Named residuals, verdicts and fitted constants for one immersion over
/// one grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub kind: ReportKind,
    pub immersion: String,
    pub chart_dim: usize,
    pub ambient_dim: usize,
    pub variables: Vec<String>,
    pub grid: GridDescription,
    pub tolerances: Tolerances,
    pub classification: Classification,
    pub checks: Vec<Check>,
    pub constants: FittedConstants,
    pub degenerate_points: Vec<PointNote>,
    pub passed: bool,
}

/// Tolerances and worker count for report generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub tolerances: Tolerances,
    pub jobs: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            tolerances: Tolerances::default(),
            jobs: 1,
        }
    }
}

fn classification(points: &[PointAnalysis], tol: &Tolerances) -> Classification {
    let small = |v: f64, p: &PointAnalysis| v <= tol.degenerate * (1.0 + p.norm_x);
    let conic = points.iter().all(|p| small(p.nu, p));
    let spherical = points.iter().all(|p| small(p.rho, p));
    let proper = points.iter().all(|p| !small(p.nu, p) && !small(p.rho, p));
    let rectifying = points.iter().all(|p| p.rectifying <= tol.exact);
    let proper_rectifying = proper && rectifying;
    let summary = if proper_rectifying {
        "proper rectifying on sampled grid".to_string()
    } else if proper {
        "not rectifying".to_string()
    } else {
        let shape = if conic {
            "conic"
        } else if spherical {
            "spherical"
        } else {
            "degenerate at some sampled points"
        };
        format!("{shape}, not proper rectifying")
    };
    let fold = |f: fn(&PointAnalysis) -> f64, init: f64, op: fn(f64, f64) -> f64| {
        points.iter().map(f).fold(init, op)
    };
    Classification {
        conic,
        spherical,
        proper,
        rectifying,
        proper_rectifying,
        summary,
        rho_min: fold(|p| p.rho, f64::INFINITY, f64::min),
        rho_max: fold(|p| p.rho, 0.0, f64::max),
        nu_min: fold(|p| p.nu, f64::INFINITY, f64::min),
        nu_max: fold(|p| p.nu, 0.0, f64::max),
    }
}

fn base_checks(imm: &Immersion, points: &[PointAnalysis], tol: &Tolerances, class: &Classification) -> Vec<Check> {
    let (n, m) = (imm.chart_dim(), imm.ambient_dim());
    let violations = points.iter().filter(|p| m <= n + p.im_h_dim).count();
    vec![
        Check::max_of(
            "rectifying",
            "max |<x, h(e_a, e_b)>| / ((1 + |x|)(1 + max |h|))",
            points.iter().map(|p| Some(p.rectifying)),
            tol.exact,
            true,
        ),
        Check::max_of(
            "concurrency",
            "max |nabla_i x^T - d_i|_g / (1 + |d_i|_g)",
            points.iter().map(|p| Some(p.concurrency)),
            tol.exact,
            true,
        ),
        Check::new(
            "codimension_bound",
            "grid points violating m > n + dim Im h",
            violations as f64,
            points.len(),
            0.0,
            class.proper_rectifying,
        ),
        Check::max_of(
            "gauss_equation",
            "max |R_intrinsic - R_gauss| / (1 + max |R|)",
            points.iter().map(|p| Some(p.gauss)),
            tol.third,
            true,
        ),
        Check::max_of(
            "codazzi_equation",
            "max |(nabla_i h)_jk - (nabla_j h)_ik| / (1 + max |nabla h|)",
            points.iter().map(|p| Some(p.codazzi)),
            tol.third,
            true,
        ),
    ]
}

/// Least-squares fit `y ≈ k0 + k1 t + k2 t²`; `None` when `t` does not
/// spread enough to determine a quadratic.
fn quadratic_fit(t: &[f64], y: &[f64]) -> Option<([f64; 3], f64)> {
    let (lo, hi) = t.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    if t.len() < 3 || !(hi - lo > 1e-6 * (1.0 + hi.abs())) {
        return None;
    }
    let design = DMatrix::from_fn(t.len(), 3, |r, c| t[r].powi(c as i32));
    let rhs = DVector::from_column_slice(y);
    let k = design.clone().svd(true, true).solve(&rhs, 1e-14).ok()?;
    let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let residual = (&design * &k - rhs).amax() / scale;
    Some(([k[0], k[1], k[2]], residual))
}

fn population_std(v: &[f64]) -> f64 {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

fn structure_checks(
    imm: &Immersion,
    points: &[PointAnalysis],
    tol: &Tolerances,
    class: &Classification,
) -> (Vec<Check>, FittedConstants) {
    let applicable = class.proper_rectifying;
    let th = |f: fn(&PointAnalysis) -> Option<f64>| points.iter().map(f).collect::<Vec<_>>();
    let mut checks = vec![
        Check::max_of(
            "rho_gradient",
            "max |e_a(|x^T|) - delta_a1|, e_1 = x^T/|x^T|",
            th(|p| p.structure.rho_gradient),
            tol.exact,
            applicable,
        ),
        Check::max_of(
            "norm_squared_gradient",
            "max |e_a(|x|^2) - 2 |x^T| delta_a1| / (1 + |x^T|)",
            th(|p| p.structure.norm_squared_gradient),
            tol.exact,
            applicable,
        ),
    ];

    let rho: Vec<f64> = points.iter().map(|p| p.rho).collect();
    let x2: Vec<f64> = points.iter().map(|p| p.norm_x * p.norm_x).collect();
    let fit = quadratic_fit(&rho, &x2);
    checks.push(Check::new(
        "norm_squared_fit",
        "max residual of |x|^2 ~ k0 + k1 |x^T| + k2 |x^T|^2, relative to 1 + max |x|^2",
        fit.map_or(f64::NAN, |f| f.1),
        points.len(),
        tol.exact,
        applicable,
    ));
    checks.push(Check::new(
        "norm_squared_leading",
        "|k2 - 1| in the same fit",
        fit.map_or(f64::NAN, |f| (f.0[2] - 1.0).abs()),
        points.len(),
        tol.exact,
        applicable,
    ));

    let nu: Vec<f64> = points.iter().map(|p| p.nu).collect();
    checks.push(Check::new(
        "normal_length_constant",
        "standard deviation of |x^N| over the grid",
        population_std(&nu),
        points.len(),
        tol.exact,
        applicable,
    ));
    checks.push(Check::max_of(
        "shape_operator_xN",
        "max operator norm of A_{x^N}",
        th(|p| p.structure.shape_operator_xn),
        tol.exact,
        applicable,
    ));
    checks.push(Check::max_of(
        "curvature_xT",
        "max |R(x^T, e_a; e_b, e_c)| over both curvature routes",
        th(|p| p.structure.curvature_xt),
        tol.third,
        applicable,
    ));
    checks.push(Check::max_of(
        "sectional_curvature_xT",
        "max |K(x^T ^ e_a)|, e_a orthogonal to x^T",
        th(|p| p.structure.sectional_xt),
        tol.third,
        applicable,
    ));
    checks.push(Check::max_of(
        "frame_connection",
        "max |omega_1^j(e_i) - delta_ij / |x^T||, i, j >= 2",
        th(|p| p.structure.frame_connection),
        tol.third,
        applicable,
    ));
    checks.push(Check::max_of(
        "weingarten_identity",
        "max |A_{x^N} d_i - (nabla_i x^T - d_i)|_g / (1 + |d_i|_g)",
        points.iter().map(|p| Some(p.weingarten)),
        tol.exact,
        true,
    ));
    checks.push(Check::max_of(
        "normal_derivative_xN",
        "max |D_i x^N + h(d_i, x^T)| / ((1 + |d_i|_g)(1 + |x|))",
        points.iter().map(|p| Some(p.normal_derivative)),
        tol.exact,
        true,
    ));

    let mut constants = FittedConstants {
        c: class.proper.then(|| nu.iter().sum::<f64>() / nu.len() as f64),
        ..FittedConstants::default()
    };
    if imm.var_names().first().map(String::as_str) == Some("s") {
        let s: Vec<f64> = points.iter().map(|p| p.point[0]).collect();
        let offsets: Vec<f64> = rho.iter().zip(&s).map(|(r, s)| r - s).collect();
        let b = offsets.iter().sum::<f64>() / offsets.len() as f64;
        constants.b = Some(b);
        constants.b_residual = Some(offsets.iter().fold(0.0f64, |m, o| m.max((o - b).abs())));
        if let Some((k, residual)) = quadratic_fit(&s, &x2) {
            constants.c2 = Some(k[0]);
            constants.c1 = Some(k[1]);
            constants.s_fit_leading = Some(k[2]);
            constants.s_fit_residual = Some(residual);
        }
    }
    (checks, constants)
}

fn assemble(
    kind: ReportKind,
    imm: &Immersion,
    grid: &Grid,
    tol: &Tolerances,
    points: &[PointAnalysis],
) -> VerificationReport {
    let class = classification(points, tol);
    let mut checks = base_checks(imm, points, tol, &class);
    let mut constants = FittedConstants::default();
    let mut degenerate_points = Vec::new();
    if kind == ReportKind::Verify {
        let (more, fitted) = structure_checks(imm, points, tol, &class);
        checks.extend(more);
        constants = fitted;
        degenerate_points = points
            .iter()
            .filter_map(|p| {
                p.frame_note.as_ref().map(|note| PointNote {
                    point: p.point.clone(),
                    note: note.clone(),
                })
            })
            .collect();
    }
    let passed = class.proper_rectifying && checks.iter().all(|c| c.verdict != Verdict::Fail);
    VerificationReport {
        kind,
        immersion: imm.label().to_string(),
        chart_dim: imm.chart_dim(),
        ambient_dim: imm.ambient_dim(),
        variables: imm.var_names().to_vec(),
        grid: GridDescription::of(grid),
        tolerances: *tol,
        classification: class,
        checks,
        constants,
        degenerate_points,
        passed,
    }
}

/// Conic / spherical / proper / rectifying verdicts plus the engine
/// self-checks and the codimension bound.
pub fn classify(imm: &Immersion, grid: &Grid, opts: &ReportOptions) -> Result<VerificationReport, GeometryError> {
    let points = analyze_grid(imm, grid, &opts.tolerances, opts.jobs)?;
    Ok(assemble(ReportKind::Classify, imm, grid, &opts.tolerances, &points))
}

/// [`classify`] plus every structure-theorem residual for proper
/// rectifying submanifolds. Structure items are marked not applicable
/// (with their residuals still reported) unless the immersion classifies
/// as proper rectifying.
pub fn structure_report(
    imm: &Immersion,
    grid: &Grid,
    opts: &ReportOptions,
) -> Result<VerificationReport, GeometryError> {
    let points = analyze_grid(imm, grid, &opts.tolerances, opts.jobs)?;
    Ok(assemble(ReportKind::Verify, imm, grid, &opts.tolerances, &points))
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let yn = |b: bool| if b { "yes" } else { "no" };
        let mut out = String::new();
        let kind = match self.kind {
            ReportKind::Classify => "classify",
            ReportKind::Verify => "verify",
        };
        let _ = writeln!(out, "report: {kind}");
        let _ = writeln!(out, "immersion: {}", self.immersion);
        let _ = writeln!(
            out,
            "chart: n = {} ({}), ambient m = {}",
            self.chart_dim,
            self.variables.join(", "),
            self.ambient_dim
        );
        let bounds: Vec<String> = self
            .grid
            .bounds
            .iter()
            .map(|[lo, hi]| format!("[{}, {}]", format::short(lo.0), format::short(hi.0)))
            .collect();
        let sizes: Vec<String> = self.grid.sizes.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(
            out,
            "grid: {} = {} points over {}",
            sizes.join(" x "),
            self.grid.points,
            bounds.join(" x ")
        );
        let t = &self.tolerances;
        let _ = writeln!(
            out,
            "tolerances: exact {}, third {}, negative_floor {}, degenerate {}",
            format::short(t.exact),
            format::short(t.third),
            format::short(t.negative_floor),
            format::short(t.degenerate)
        );
        let c = &self.classification;
        let _ = writeln!(out, "classification: {}", c.summary);
        let _ = writeln!(
            out,
            "  conic {}, spherical {}, proper {}, rectifying {}, proper rectifying {}",
            yn(c.conic),
            yn(c.spherical),
            yn(c.proper),
            yn(c.rectifying),
            yn(c.proper_rectifying)
        );
        let _ = writeln!(
            out,
            "  |x^T| in [{}, {}], |x^N| in [{}, {}]",
            format::short(c.rho_min),
            format::short(c.rho_max),
            format::short(c.nu_min),
            format::short(c.nu_max)
        );
        let _ = writeln!(out, "checks:");
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for ch in &self.checks {
            let _ = writeln!(
                out,
                "  {:<4}  {:<width$}  {:>10}  tol {:>9}  ({} points)  {}",
                ch.verdict.label(),
                ch.name,
                format::short(ch.value),
                format::short(ch.tolerance),
                ch.points,
                ch.description,
            );
        }
        if self.kind == ReportKind::Verify {
            let k = &self.constants;
            let _ = writeln!(out, "constants:");
            for (name, v) in [
                ("b", k.b),
                ("b_residual", k.b_residual),
                ("c1", k.c1),
                ("c2", k.c2),
                ("s_fit_leading", k.s_fit_leading),
                ("s_fit_residual", k.s_fit_residual),
                ("c", k.c),
            ] {
                let _ = writeln!(out, "  {name} {}", format::short_opt(v));
            }
            let _ = writeln!(out, "degenerate points: {}", self.degenerate_points.len());
            for d in &self.degenerate_points {
                let p: Vec<String> = d.point.iter().map(|v| format::short(*v)).collect();
                let _ = writeln!(out, "  ({}): {}", p.join(", "), d.note);
            }
        }
        let _ = writeln!(out, "result: {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::builtin_by_name;

    #[test]
    fn quadratic_fit_recovers_coefficients() {
        let t: Vec<f64> = (0..20).map(|i| 0.1 * i as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| 2.0 - 0.5 * t + t * t).collect();
        let (k, r) = quadratic_fit(&t, &y).unwrap();
        assert!((k[0] - 2.0).abs() < 1e-12 && (k[1] + 0.5).abs() < 1e-12 && (k[2] - 1.0).abs() < 1e-12);
        assert!(r < 1e-13);
        assert!(quadratic_fit(&[1.0; 5], &[2.0; 5]).is_none());
    }

    #[test]
    fn constructed_example_passes() {
        let imm = builtin_by_name("rectifying:c=1,base=circle").unwrap();
        let grid = Grid::new(imm.domain(), &[5, 5], 0.05).unwrap();
        let r = structure_report(&imm, &grid, &ReportOptions::default()).unwrap();
        assert!(r.passed, "{}", r.to_text());
        let k = &r.constants;
        assert!(k.c1.unwrap().abs() < 1e-10);
        assert!((k.c2.unwrap() - 1.0).abs() < 1e-10);
        assert!(k.b.unwrap().abs() < 1e-12);
    }

    #[test]
    fn sphere_is_spherical() {
        let imm = builtin_by_name("sphere").unwrap();
        let grid = Grid::new(imm.domain(), &[4, 4], 0.05).unwrap();
        let r = structure_report(&imm, &grid, &ReportOptions::default()).unwrap();
        assert!(!r.passed);
        assert_eq!(r.classification.summary, "spherical, not proper rectifying");
        assert_eq!(r.check("rho_gradient").unwrap().verdict, Verdict::NotApplicable);
    }
}
