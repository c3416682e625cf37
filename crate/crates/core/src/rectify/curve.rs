//! Frenet apparatus of space curves and the rectifying-plane test.

use std::fmt::Write as _;

use serde::Serialize;

use super::report::{GridDescription, PointNote};
use crate::chart::Grid;
use crate::format::{self, ser_f64};
use crate::geometry::GeometryError;
use crate::immersion::Immersion;
use crate::jets::Jet;
use crate::linalg::{derivative, dot, jet_norm, jet_scale, norm, truncate, values};
use crate::parallel::ordered_map;

/// Curvatures at or below this value leave `n` and `b` undefined.
pub const CURVATURE_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FrenetApparatus {
    pub t: [f64; 3],
    pub n: [f64; 3],
    pub b: [f64; 3],
    pub kappa: f64,
    pub tau: f64,
    /// `|x'|` in the chart parameter.
    pub speed: f64,
}

fn arr(v: &[f64]) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

fn cross(a: &[Jet], b: &[Jet]) -> Vec<Jet> {
    vec![
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

fn check_space_curve(curve: &Immersion) -> Result<(), GeometryError> {
    if curve.chart_dim() != 1 || curve.ambient_dim() != 3 {
        return Err(GeometryError::Dimension(format!(
            "Frenet apparatus needs a curve in E^3, got n = {}, m = {}",
            curve.chart_dim(),
            curve.ambient_dim()
        )));
    }
    Ok(())
}

/// `t, n, b, κ, τ` at parameter `p`, with arclength corrections from
/// `|x'|`.
pub fn frenet(curve: &Immersion, p: f64) -> Result<FrenetApparatus, GeometryError> {
    check_space_curve(curve)?;
    curve.check_regularity(&[p])?;
    let x = curve.evaluate(&[p], 3)?;
    let v = derivative(&x, 0)?;
    let speed = jet_norm(&v)?;
    let t = jet_scale(&v, &speed.recip()?);
    let dt = derivative(&t, 0)?;
    let dt_len = norm(&values(&dt));
    let kappa = dt_len / speed.value();
    if !(kappa > CURVATURE_THRESHOLD) {
        return Err(GeometryError::FrenetUndefined {
            point: vec![p],
            kappa,
        });
    }
    let nrm = jet_scale(&dt, &jet_norm(&dt)?.recip()?);
    let t1 = truncate(&t, 1)?;
    let b = cross(&t1, &nrm);
    let db = derivative(&b, 0)?;
    let tau = -dot(&values(&db), &values(&nrm)) / speed.value();
    Ok(FrenetApparatus {
        t: arr(&values(&t)),
        n: arr(&values(&nrm)),
        b: arr(&values(&b)),
        kappa,
        tau,
        speed: speed.value(),
    })
}

/// Position against the Frenet frame at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveResidual {
    /// `|⟨x, n⟩| / (1 + |x|)`
    pub residual: f64,
    /// `⟨x, n⟩` unnormalized.
    pub normal_component: f64,
    /// `⟨x, t⟩`
    pub lambda: f64,
    /// `⟨x, b⟩`
    pub mu: f64,
}

pub fn rectifying_curve_residual(curve: &Immersion, p: f64) -> Result<CurveResidual, GeometryError> {
    let f = frenet(curve, p)?;
    Ok(curve_residual_from(&curve.position(&[p])?, &f))
}

pub(crate) fn curve_residual_from(x: &[f64], f: &FrenetApparatus) -> CurveResidual {
    let xn = dot(x, &f.n);
    CurveResidual {
        residual: xn.abs() / (1.0 + norm(x)),
        normal_component: xn,
        lambda: dot(x, &f.t),
        mu: dot(x, &f.b),
    }
}

/// Largest `|⟨v_i, v_j⟩ − δ_ij|` over `v = (t, n, b)`.
pub fn orthonormality_defect(f: &FrenetApparatus) -> f64 {
    let v = [&f.t, &f.n, &f.b];
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(v[i], v[j]) - want).abs());
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrenetRow {
    #[serde(serialize_with = "ser_f64")]
    pub s: f64,
    #[serde(serialize_with = "ser_f64")]
    pub kappa: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tau: f64,
    #[serde(serialize_with = "ser_f64")]
    pub lambda: f64,
    #[serde(serialize_with = "ser_f64")]
    pub mu: f64,
    #[serde(serialize_with = "ser_f64")]
    pub normal_component: f64,
    #[serde(serialize_with = "ser_f64")]
    pub residual: f64,
}

/// Frenet data along a sampled curve with the rectifying-curve verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrenetReport {
    pub curve: String,
    pub variable: String,
    pub grid: GridDescription,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    pub rows: Vec<FrenetRow>,
    pub degenerate_points: Vec<PointNote>,
    /// Every sampled point has a Frenet frame and `|⟨x, n⟩|/(1+|x|)` within
    /// tolerance.
    pub rectifying: bool,
    pub verdict: String,
}

pub fn frenet_table(curve: &Immersion, grid: &Grid, tolerance: f64, jobs: usize) -> Result<FrenetReport, GeometryError> {
    check_space_curve(curve)?;
    if grid.is_empty() {
        return Err(GeometryError::EmptyGrid);
    }
    let points = grid.points();
    let results = ordered_map(jobs, &points, |p| -> Result<Result<FrenetRow, PointNote>, GeometryError> {
        match frenet(curve, p[0]) {
            Ok(f) => {
                let r = curve_residual_from(&curve.position(p)?, &f);
                Ok(Ok(FrenetRow {
                    s: p[0],
                    kappa: f.kappa,
                    tau: f.tau,
                    lambda: r.lambda,
                    mu: r.mu,
                    normal_component: r.normal_component,
                    residual: r.residual,
                }))
            }
            Err(e @ GeometryError::FrenetUndefined { .. }) => Ok(Err(PointNote {
                point: p.clone(),
                note: e.to_string(),
            })),
            Err(e) => Err(e),
        }
    });
    let mut rows = Vec::new();
    let mut degenerate_points = Vec::new();
    for r in results {
        match r? {
            Ok(row) => rows.push(row),
            Err(note) => degenerate_points.push(note),
        }
    }
    let rectifying = degenerate_points.is_empty() && rows.iter().all(|r| r.residual <= tolerance);
    Ok(FrenetReport {
        curve: curve.label().to_string(),
        variable: curve.var_names()[0].clone(),
        grid: GridDescription::of(grid),
        tolerance,
        rows,
        degenerate_points,
        rectifying,
        verdict: format!(
            "rectifying curve: {} on sampled grid",
            if rectifying { "yes" } else { "no" }
        ),
    })
}

impl FrenetReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "curve: {}", self.curve);
        let _ = writeln!(
            out,
            "grid: {} points, tolerance {}",
            self.grid.points,
            format::short(self.tolerance)
        );
        let _ = writeln!(
            out,
            "{:>10}  {:>10}  {:>10}  {:>10}  {:>10}  {:>10}  {:>10}",
            self.variable, "kappa", "tau", "lambda", "mu", "<x,n>", "residual"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>10}  {:>10}  {:>10}  {:>10}  {:>10}  {:>10}  {:>10}",
                format::short(r.s),
                format::short(r.kappa),
                format::short(r.tau),
                format::short(r.lambda),
                format::short(r.mu),
                format::short(r.normal_component),
                format::short(r.residual)
            );
        }
        let _ = writeln!(out, "degenerate points: {}", self.degenerate_points.len());
        for d in &self.degenerate_points {
            let _ = writeln!(out, "  {}: {}", format::short(d.point[0]), d.note);
        }
        let _ = writeln!(out, "{}", self.verdict);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::{builtin_by_name, circle, helix, line};
    use approx::assert_abs_diff_eq;

    #[test]
    fn helix_curvature_and_torsion() {
        let h = helix(3.0, 4.0).unwrap();
        for s in [0.3, 1.7, 4.0] {
            let f = frenet(&h, s).unwrap();
            assert_abs_diff_eq!(f.kappa, 0.12, epsilon = 1e-12);
            assert_abs_diff_eq!(f.tau, 0.16, epsilon = 1e-12);
            assert!(orthonormality_defect(&f) < 1e-12);
        }
    }

    #[test]
    fn planar_circle() {
        let f = frenet(&circle(2.0).unwrap(), 1.0).unwrap();
        assert_abs_diff_eq!(f.kappa, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(f.tau, 0.0, epsilon = 1e-14);
        let r = rectifying_curve_residual(&circle(2.0).unwrap(), 1.0).unwrap();
        assert_abs_diff_eq!(r.normal_component, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.residual, 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn straight_line_has_no_frame() {
        let err = frenet(&line().unwrap(), 0.5).unwrap_err();
        assert!(err.to_string().contains("Frenet frame undefined"));
    }

    #[test]
    fn constructed_curve_is_rectifying() {
        let x = builtin_by_name("rectifying_curve:c=1,base=small_circle").unwrap();
        for p in x.default_grid().points() {
            assert!(rectifying_curve_residual(&x, p[0]).unwrap().residual < 1e-12);
        }
    }
}
