//! Everything the reports need at one grid point, computed from a single
//! snapshot.

use super::split::{concurrency_defects, concurrency_from_snapshot, split_jets, SplitJets};
use super::{rectifying_residual, Tolerances};
use crate::chart::Grid;
use crate::geometry::{
    first_normal_space, normal_derivative_from_jets, shape_operator, snapshot, CurvatureData,
    CurvatureRoute, GeometryError, GeometrySnapshot,
};
use crate::immersion::Immersion;
use crate::jets::{dot as jet_dot, Jet};
use crate::linalg::{dot, jet_gram_schmidt, jet_norm, norm, values};
use crate::parallel::ordered_map;

/// Pointwise residuals of the structure structure, in a frame `e₁ = x^T/ρ`.
/// `None` marks quantities undefined at the point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StructurePoint {
    /// `max_a |e_a(ρ) − δ_a1|`
    pub rho_gradient: Option<f64>,
    /// `max_a |e_a(|x|²) − 2ρ δ_a1| / (1 + ρ)`
    pub norm_squared_gradient: Option<f64>,
    /// `‖A_{x^N}‖`
    pub shape_operator_xn: Option<f64>,
    /// `max |R(x^T, e_a; e_b, e_c)|` over both curvature routes.
    pub curvature_xt: Option<f64>,
    /// `max_{a≥2} |K(x^T ∧ e_a)|`
    pub sectional_xt: Option<f64>,
    /// `max_{i,j≥2} |ω_1^j(e_i) − δ_ij/ρ|`
    pub frame_connection: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointAnalysis {
    pub point: Vec<f64>,
    pub position: Vec<f64>,
    pub norm_x: f64,
    pub rho: f64,
    pub nu: f64,
    pub rectifying: f64,
    pub concurrency: f64,
    pub im_h_dim: usize,
    pub gauss: f64,
    pub codazzi: f64,
    /// `A_{x^N}Z − (∇_Z x^T − Z)` over coordinate directions.
    pub weingarten: f64,
    /// `D_Z x^N + h(Z, x^T)` over coordinate directions.
    pub normal_derivative: f64,
    pub structure: StructurePoint,
    /// Why the adapted frame is undefined, if it is.
    pub frame_note: Option<String>,
}

impl PointAnalysis {
    pub fn compute(imm: &Immersion, p: &[f64], tol: &Tolerances) -> Result<PointAnalysis, GeometryError> {
        let snap = snapshot(imm, p)?;
        let split = split_jets(&snap);
        let n = snap.chart_dim();
        let position = snap.position.clone();
        let norm_x = norm(&position);
        let xt = values(&split.tangential);
        let xn = values(&split.normal);
        let (rho, nu) = (norm(&xt), norm(&xn));
        let a = values(&split.a);
        let curv = CurvatureData::from_snapshot(&snap);

        let defects = concurrency_defects(&snap, &split);
        let mut weingarten: f64 = 0.0;
        for (i, d) in defects.iter().enumerate() {
            let w: Vec<f64> = (0..n)
                .map(|k| {
                    (0..n)
                        .map(|j| snap.metric_inv[(k, j)] * dot(&snap.h[i][j], &xn))
                        .sum()
                })
                .collect();
            let diff: Vec<f64> = w.iter().zip(d).map(|(x, y)| x - y).collect();
            let len = snap.metric[(i, i)].sqrt();
            weingarten = weingarten.max(snap.inner(&diff, &diff).sqrt() / (1.0 + len));
        }

        let dn = normal_derivative_from_jets(&snap, &split.normal)?;
        let mut normal_derivative: f64 = 0.0;
        for (i, di) in dn.iter().enumerate() {
            let mut v = di.clone();
            for (k, ak) in a.iter().enumerate() {
                for (c, hc) in v.iter_mut().zip(&snap.h[i][k]) {
                    *c += ak * hc;
                }
            }
            let len = snap.metric[(i, i)].sqrt();
            normal_derivative = normal_derivative.max(norm(&v) / ((1.0 + len) * (1.0 + norm_x)));
        }

        let scale = tol.degenerate * (1.0 + norm_x);
        let mut structure = StructurePoint::default();
        let mut frame_note = None;
        if nu > scale {
            let a_xn = shape_operator(&snap, &xn)?;
            structure.shape_operator_xn =
                Some(a_xn.symmetric_eigenvalues().iter().fold(0.0, |m, v| m.max(v.abs())));
        }
        if rho > scale {
            match adapted(&snap, &split, &curv, &a, rho) {
                Ok(t) => {
                    structure.rho_gradient = t.rho_gradient;
                    structure.norm_squared_gradient = t.norm_squared_gradient;
                    structure.curvature_xt = t.curvature_xt;
                    structure.sectional_xt = t.sectional_xt;
                    structure.frame_connection = t.frame_connection;
                }
                Err(e) => frame_note = Some(e.to_string()),
            }
        } else {
            frame_note = Some(format!("x^T vanishes (|x^T| = {rho:.3e})"));
        }

        Ok(PointAnalysis {
            point: p.to_vec(),
            norm_x,
            rho,
            nu,
            rectifying: rectifying_residual(&snap),
            concurrency: concurrency_from_snapshot(&snap, &split),
            im_h_dim: first_normal_space(&snap).dim,
            gauss: curv.gauss_residual(),
            codazzi: snap.codazzi_residual(),
            weingarten,
            normal_derivative,
            structure,
            frame_note,
            position,
        })
    }
}

/// Orthonormal frame `e₁ = x^T/ρ, e₂, …` as order-1 jets. The coordinate
/// tangent carrying the largest share of `x^T` is the one left out of the
/// Gram–Schmidt input.
fn adapted_frame(snap: &GeometrySnapshot, split: &SplitJets) -> Result<Vec<Vec<Jet>>, GeometryError> {
    let n = snap.chart_dim();
    let tangents = &snap.jets.tangents;
    let drop = (0..n)
        .max_by(|&i, &j| {
            let wi = split.a[i].value().abs() * norm(&snap.tangents[i]);
            let wj = split.a[j].value().abs() * norm(&snap.tangents[j]);
            wi.total_cmp(&wj)
        })
        .expect("n >= 1");
    let mut input = vec![split.tangential.clone()];
    input.extend((0..n).filter(|&k| k != drop).map(|k| tangents[k].clone()));
    let frame = jet_gram_schmidt(&input, n, false)?;
    if frame.len() != n {
        return Err(GeometryError::Dimension(format!(
            "adapted frame has rank {} < {n}",
            frame.len()
        )));
    }
    Ok(frame)
}

fn adapted(
    snap: &GeometrySnapshot,
    split: &SplitJets,
    curv: &CurvatureData,
    a: &[f64],
    rho: f64,
) -> Result<StructurePoint, GeometryError> {
    let n = snap.chart_dim();
    let frame = adapted_frame(snap, split)?;
    let fvals: Vec<Vec<f64>> = frame.iter().map(|e| values(e)).collect();
    // chart components of each adapted frame vector
    let comps: Vec<Vec<f64>> = fvals
        .iter()
        .map(|e| {
            (0..n)
                .map(|l| {
                    (0..n)
                        .map(|k| snap.metric_inv[(l, k)] * dot(e, &snap.tangents[k]))
                        .sum()
                })
                .collect()
        })
        .collect();
    let along = |f: &Jet, e: &[f64]| -> f64 {
        let g = f.gradient();
        e.iter().zip(&g).map(|(x, y)| x * y).sum()
    };

    let rho_jet = jet_norm(&split.tangential)?;
    let x2 = jet_dot(&snap.jets.position, &snap.jets.position);
    let mut rho_gradient: f64 = 0.0;
    let mut norm_squared_gradient: f64 = 0.0;
    for (k, e) in comps.iter().enumerate() {
        let delta = if k == 0 { 1.0 } else { 0.0 };
        rho_gradient = rho_gradient.max((along(&rho_jet, e) - delta).abs());
        norm_squared_gradient =
            norm_squared_gradient.max((along(&x2, e) - 2.0 * rho * delta).abs() / (1.0 + rho));
    }

    let on: Vec<Vec<f64>> = (0..n).map(|b| snap.frame_components(b)).collect();
    let mut curvature_xt: f64 = 0.0;
    for route in [CurvatureRoute::Intrinsic, CurvatureRoute::Gauss] {
        for y in &on {
            for z in &on {
                for w in &on {
                    curvature_xt = curvature_xt.max(curv.evaluate(route, a, y, z, w).abs());
                }
            }
        }
    }

    let (sectional_xt, frame_connection) = if n >= 2 {
        let mut k_max: f64 = 0.0;
        for e in &comps[1..] {
            k_max = k_max.max(curv.sectional(a, e)?.abs());
        }
        // ω_1^j(e_i) = ⟨∇_{e_i} e_1, e_j⟩
        let d_e1: Vec<Vec<f64>> = (0..n)
            .map(|l| frame[0].iter().map(|c| c.gradient()[l]).collect())
            .collect();
        let mut w_max: f64 = 0.0;
        for i in 1..n {
            let mut de = vec![0.0; snap.ambient_dim()];
            for (l, dl) in d_e1.iter().enumerate() {
                for (o, v) in de.iter_mut().zip(dl) {
                    *o += comps[i][l] * v;
                }
            }
            for j in 1..n {
                let want = if i == j { 1.0 / rho } else { 0.0 };
                w_max = w_max.max((dot(&de, &fvals[j]) - want).abs());
            }
        }
        (Some(k_max), Some(w_max))
    } else {
        (None, None)
    };

    Ok(StructurePoint {
        rho_gradient: Some(rho_gradient),
        norm_squared_gradient: Some(norm_squared_gradient),
        shape_operator_xn: None,
        curvature_xt: Some(curvature_xt),
        sectional_xt,
        frame_connection,
    })
}

/// Analyzes every grid point, in grid order, on `jobs` worker threads.
pub fn analyze_grid(
    imm: &Immersion,
    grid: &Grid,
    tol: &Tolerances,
    jobs: usize,
) -> Result<Vec<PointAnalysis>, GeometryError> {
    if grid.is_empty() {
        return Err(GeometryError::EmptyGrid);
    }
    let points = grid.points();
    ordered_map(jobs, &points, |p| PointAnalysis::compute(imm, p, tol))
        .into_iter()
        .collect()
}
