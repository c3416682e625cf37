use nalgebra::DMatrix;

use super::{snapshot, GeometryError, GeometrySnapshot, PLANE_ANGLE_TOL};
use crate::immersion::Immersion;
use crate::linalg::dot;

/// Which of the two independently computed Riemann tensors to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureRoute {
    /// From `Γ` and `∂Γ`.
    Intrinsic,
    /// From `h` by the Gauss equation.
    Gauss,
}

/// `R_ijkl = ⟨R(∂i, ∂j)∂k, ∂l⟩` by both routes, with the metric for
/// sectional curvatures.
#[derive(Debug, Clone)]
pub struct CurvatureData {
    n: usize,
    intrinsic: Vec<f64>,
    gauss: Vec<f64>,
    metric: DMatrix<f64>,
}

impl CurvatureData {
    pub fn from_snapshot(snap: &GeometrySnapshot) -> CurvatureData {
        let n = snap.chart_dim();
        let g = &snap.christoffel;
        let dg = &snap.christoffel_grad;
        let mut intrinsic = vec![0.0; n * n * n * n];
        let mut gauss = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    // R^r_ijk = ∂iΓ^r_jk − ∂jΓ^r_ik + Γ^q_jk Γ^r_iq − Γ^q_ik Γ^r_jq
                    let up: Vec<f64> = (0..n)
                        .map(|r| {
                            let mut v = dg[i][r][j][k] - dg[j][r][i][k];
                            for q in 0..n {
                                v += g[q][j][k] * g[r][i][q] - g[q][i][k] * g[r][j][q];
                            }
                            v
                        })
                        .collect();
                    for l in 0..n {
                        let idx = ((i * n + j) * n + k) * n + l;
                        intrinsic[idx] = (0..n).map(|r| snap.metric[(l, r)] * up[r]).sum();
                        gauss[idx] = dot(&snap.h[i][l], &snap.h[j][k]) - dot(&snap.h[i][k], &snap.h[j][l]);
                    }
                }
            }
        }
        CurvatureData {
            n,
            intrinsic,
            gauss,
            metric: snap.metric.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn tensor(&self, route: CurvatureRoute) -> &[f64] {
        match route {
            CurvatureRoute::Intrinsic => &self.intrinsic,
            CurvatureRoute::Gauss => &self.gauss,
        }
    }

    pub fn component(&self, route: CurvatureRoute, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.tensor(route)[((i * n + j) * n + k) * n + l]
    }

    /// `R(X, Y; Z, W)` for chart-component vectors.
    pub fn evaluate(&self, route: CurvatureRoute, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let n = self.n;
        let t = self.tensor(route);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = x[i] * y[j];
                if a == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        acc += a * z[k] * w[l] * t[((i * n + j) * n + k) * n + l];
                    }
                }
            }
        }
        acc
    }

    /// `max |R_int − R_gauss| / (1 + max |R|)`.
    pub fn gauss_residual(&self) -> f64 {
        let scale = self
            .intrinsic
            .iter()
            .chain(&self.gauss)
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = self
            .intrinsic
            .iter()
            .zip(&self.gauss)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        diff / (1.0 + scale)
    }

    /// Largest violation of `R_ijkl = −R_jikl = −R_ijlk = R_klij` on the
    /// intrinsic tensor.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let r = |i, j, k, l| self.component(CurvatureRoute::Intrinsic, i, j, k, l);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = r(i, j, k, l);
                        worst = worst
                            .max((v + r(j, i, k, l)).abs())
                            .max((v + r(i, j, l, k)).abs())
                            .max((v - r(k, l, i, j)).abs());
                    }
                }
            }
        }
        worst
    }

    /// `K(X ∧ Y) = R(X, Y; Y, X) / (|X|²|Y|² − ⟨X, Y⟩²)` from the intrinsic
    /// tensor.
    pub fn sectional(&self, x: &[f64], y: &[f64]) -> Result<f64, GeometryError> {
        self.sectional_by(CurvatureRoute::Intrinsic, x, y)
    }

    pub fn sectional_by(&self, route: CurvatureRoute, x: &[f64], y: &[f64]) -> Result<f64, GeometryError> {
        let ip = |u: &[f64], v: &[f64]| {
            let mut acc = 0.0;
            for i in 0..self.n {
                for j in 0..self.n {
                    acc += u[i] * self.metric[(i, j)] * v[j];
                }
            }
            acc
        };
        let (xx, yy, xy) = (ip(x, x), ip(y, y), ip(x, y));
        let area2 = xx * yy - xy * xy;
        let sine = if xx > 0.0 && yy > 0.0 {
            (area2.max(0.0) / (xx * yy)).sqrt()
        } else {
            0.0
        };
        if sine < PLANE_ANGLE_TOL {
            return Err(GeometryError::DegeneratePlane { sine });
        }
        Ok(self.evaluate(route, x, y, y, x) / area2)
    }
}

pub fn curvature(imm: &Immersion, p: &[f64]) -> Result<CurvatureData, GeometryError> {
    Ok(CurvatureData::from_snapshot(&snapshot(imm, p)?))
}
