use nalgebra::DMatrix;

use super::GeometryError;
use crate::immersion::Immersion;
use crate::jets::{dot as jet_dot, Jet};
use crate::linalg::{derivative, dot, jet_gram_schmidt, jet_inverse, norm, truncate, values};

/// Order-1 jets retained for quantities differentiated downstream.
#[derive(Debug, Clone)]
pub(crate) struct SnapshotJets {
    pub position: Vec<Jet>,
    pub tangents: Vec<Vec<Jet>>,
    pub metric_inv: Vec<Vec<Jet>>,
}

/// All pointwise geometric data of an immersion at one chart point.
///
/// Index conventions: `tangents[i] = x_i`, `second[i][j] = x_ij`,
/// `third[i][j][k] = x_ijk`, `christoffel[k][i][j] = Γ^k_ij`,
/// `christoffel_grad[l][k][i][j] = ∂_l Γ^k_ij`, `h[i][j] = h(∂_i, ∂_j)`,
/// `h_grad[l][i][j] = ∂_l (h_ij)` as an ambient vector,
/// `connection[i][j][k] = ω_i^j(e_k)`. Row `a` of `frame_coeffs` expresses
/// `e_a` in the coordinate frame.
#[derive(Debug, Clone)]
pub struct GeometrySnapshot {
    pub point: Vec<f64>,
    pub position: Vec<f64>,
    pub tangents: Vec<Vec<f64>>,
    pub second: Vec<Vec<Vec<f64>>>,
    pub third: Vec<Vec<Vec<Vec<f64>>>>,
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    pub christoffel: Vec<Vec<Vec<f64>>>,
    pub christoffel_grad: Vec<Vec<Vec<Vec<f64>>>>,
    pub frame: Vec<Vec<f64>>,
    pub frame_coeffs: DMatrix<f64>,
    pub normal_projector: DMatrix<f64>,
    pub h: Vec<Vec<Vec<f64>>>,
    pub h_grad: Vec<Vec<Vec<Vec<f64>>>>,
    pub connection: Vec<Vec<Vec<f64>>>,
    pub(crate) jets: SnapshotJets,
}

/// Computes the snapshot of `imm` at `p` from order-3 jets.
pub fn snapshot(imm: &Immersion, p: &[f64]) -> Result<GeometrySnapshot, GeometryError> {
    imm.check_regularity(p)?;
    let n = imm.chart_dim();
    let m = imm.ambient_dim();
    let x3 = imm.evaluate(p, 3)?;
    let t2 = (0..n)
        .map(|i| derivative(&x3, i))
        .collect::<Result<Vec<_>, _>>()?;
    let s1 = t2
        .iter()
        .map(|ti| (0..n).map(|j| derivative(ti, j)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let t1 = t2
        .iter()
        .map(|ti| truncate(ti, 1))
        .collect::<Result<Vec<_>, _>>()?;
    let x1 = truncate(&x3, 1)?;

    let g1: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| jet_dot(&t1[i], &t1[j])).collect())
        .collect();
    let ginv1 = jet_inverse(&g1)?;
    // Γ_ijl = ⟨x_ij, x_l⟩
    let lowered: Vec<Vec<Vec<Jet>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|l| jet_dot(&s1[i][j], &t1[l])).collect())
                .collect()
        })
        .collect();
    let gamma1: Vec<Vec<Vec<Jet>>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let mut acc = ginv1[k][0].constant_like(0.0);
                            for l in 0..n {
                                acc = &acc + &(&ginv1[k][l] * &lowered[i][j][l]);
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let h1: Vec<Vec<Vec<Jet>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..m)
                        .map(|a| {
                            let mut acc = s1[i][j][a].clone();
                            for k in 0..n {
                                acc = &acc - &(&gamma1[k][i][j] * &t1[k][a]);
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let frame1 = jet_gram_schmidt(&t1, n, true)?;
    if frame1.len() != n {
        return Err(GeometryError::Dimension(format!(
            "tangent frame has rank {} < {n} at {p:?}",
            frame1.len()
        )));
    }

    let position = values(&x1);
    let tangents: Vec<Vec<f64>> = t1.iter().map(|v| values(v)).collect();
    let second: Vec<Vec<Vec<f64>>> = s1
        .iter()
        .map(|row| row.iter().map(|v| values(v)).collect())
        .collect();
    let third: Vec<Vec<Vec<Vec<f64>>>> = s1
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| (0..n).map(|k| v.iter().map(|c| c.gradient()[k]).collect()).collect())
                .collect()
        })
        .collect();
    let metric = DMatrix::from_fn(n, n, |i, j| g1[i][j].value());
    let metric_inv = DMatrix::from_fn(n, n, |i, j| ginv1[i][j].value());
    let christoffel: Vec<Vec<Vec<f64>>> = gamma1
        .iter()
        .map(|a| a.iter().map(|b| values(b)).collect())
        .collect();
    let christoffel_grad: Vec<Vec<Vec<Vec<f64>>>> = (0..n)
        .map(|l| {
            gamma1
                .iter()
                .map(|a| a.iter().map(|b| b.iter().map(|c| c.gradient()[l]).collect()).collect())
                .collect()
        })
        .collect();
    let h: Vec<Vec<Vec<f64>>> = h1
        .iter()
        .map(|row| row.iter().map(|v| values(v)).collect())
        .collect();
    let h_grad: Vec<Vec<Vec<Vec<f64>>>> = (0..n)
        .map(|l| {
            h1.iter()
                .map(|row| row.iter().map(|v| v.iter().map(|c| c.gradient()[l]).collect()).collect())
                .collect()
        })
        .collect();

    let frame: Vec<Vec<f64>> = frame1.iter().map(|e| values(e)).collect();
    let frame_coeffs = DMatrix::from_fn(n, n, |a, l| {
        (0..n)
            .map(|k| metric_inv[(l, k)] * dot(&frame[a], &tangents[k]))
            .sum()
    });
    let mut normal_projector = DMatrix::<f64>::identity(m, m);
    for e in &frame {
        for r in 0..m {
            for c in 0..m {
                normal_projector[(r, c)] -= e[r] * e[c];
            }
        }
    }
    // ∂_l e_i as ambient vectors
    let frame_grad: Vec<Vec<Vec<f64>>> = frame1
        .iter()
        .map(|e| (0..n).map(|l| e.iter().map(|c| c.gradient()[l]).collect()).collect())
        .collect();
    let connection: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| {
                            (0..n)
                                .map(|l| frame_coeffs[(k, l)] * dot(&frame_grad[i][l], &frame[j]))
                                .sum()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    Ok(GeometrySnapshot {
        point: p.to_vec(),
        position,
        tangents,
        second,
        third,
        metric,
        metric_inv,
        christoffel,
        christoffel_grad,
        frame,
        frame_coeffs,
        normal_projector,
        h,
        h_grad,
        connection,
        jets: SnapshotJets {
            position: x1,
            tangents: t1,
            metric_inv: ginv1,
        },
    })
}

impl GeometrySnapshot {
    pub fn chart_dim(&self) -> usize {
        self.tangents.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.position.len()
    }

    /// `P^⊥ v`
    pub fn project_normal(&self, v: &[f64]) -> Vec<f64> {
        let m = self.ambient_dim();
        (0..m)
            .map(|r| (0..m).map(|c| self.normal_projector[(r, c)] * v[c]).sum())
            .collect()
    }

    /// Length of the tangential part of `v`.
    pub fn tangential_length(&self, v: &[f64]) -> f64 {
        self.frame
            .iter()
            .map(|e| dot(e, v).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Ambient vector `Σ c^i x_i` for chart components `c`.
    pub fn push_forward(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient_dim()];
        for (ci, t) in c.iter().zip(&self.tangents) {
            for (o, v) in out.iter_mut().zip(t) {
                *o += ci * v;
            }
        }
        out
    }

    /// Chart components of frame vector `e_a`.
    pub fn frame_components(&self, a: usize) -> Vec<f64> {
        self.frame_coeffs.row(a).iter().copied().collect()
    }

    /// `g(u, v)` for chart components.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.chart_dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += u[i] * self.metric[(i, j)] * v[j];
            }
        }
        acc
    }

    /// `h(u, v)` for chart components.
    pub fn h_of(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let n = self.chart_dim();
        let mut out = vec![0.0; self.ambient_dim()];
        for i in 0..n {
            for j in 0..n {
                let k = u[i] * v[j];
                if k != 0.0 {
                    for (o, w) in out.iter_mut().zip(&self.h[i][j]) {
                        *o += k * w;
                    }
                }
            }
        }
        out
    }

    /// `h(e_a, e_b)` in the orthonormal frame.
    pub fn h_frame(&self, a: usize, b: usize) -> Vec<f64> {
        self.h_of(&self.frame_components(a), &self.frame_components(b))
    }

    /// Largest `|h(e_a, e_b)|` over frame pairs.
    pub fn h_max_norm(&self) -> f64 {
        let n = self.chart_dim();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                worst = worst.max(norm(&self.h_frame(a, b)));
            }
        }
        worst
    }

    /// `(∇̄_{∂l} h)(∂i, ∂j)` indexed `[l][i][j]`, from the stored `h` and
    /// `∂h` fields.
    pub fn covariant_derivative_h(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        let n = self.chart_dim();
        let m = self.ambient_dim();
        (0..n)
            .map(|l| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let mut v = self.project_normal(&self.h_grad[l][i][j]);
                                for k in 0..n {
                                    let (a, b) = (self.christoffel[k][l][i], self.christoffel[k][l][j]);
                                    for c in 0..m {
                                        v[c] -= a * self.h[k][j][c] + b * self.h[i][k][c];
                                    }
                                }
                                v
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// `max |(∇̄_l h)_ij − (∇̄_i h)_lj| / (1 + max |∇̄h|)`.
    pub fn codazzi_residual(&self) -> f64 {
        let d = self.covariant_derivative_h();
        let n = self.chart_dim();
        let mut scale: f64 = 0.0;
        let mut worst: f64 = 0.0;
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    scale = scale.max(norm(&d[l][i][j]));
                    let diff: Vec<f64> = d[l][i][j].iter().zip(&d[i][l][j]).map(|(a, b)| a - b).collect();
                    worst = worst.max(norm(&diff));
                }
            }
        }
        worst / (1.0 + scale)
    }

    /// `max |⟨h_ij, x_k⟩| / (|x_k| · max |h|)`; zero when `h` vanishes.
    pub fn tangency_defect(&self) -> f64 {
        let hmax = self.h.iter().flatten().map(|v| norm(v)).fold(0.0, f64::max);
        if hmax == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for row in &self.h {
            for hij in row {
                for t in &self.tangents {
                    worst = worst.max(dot(hij, t).abs() / (norm(t) * hmax));
                }
            }
        }
        worst
    }

    /// `max |ω_i^j(e_k) + ω_j^i(e_k)|`.
    pub fn connection_antisymmetry_defect(&self) -> f64 {
        let n = self.chart_dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.connection[i][j][k] + self.connection[j][i][k]).abs());
                }
            }
        }
        worst
    }
}

/// `∇̄h` of `imm` at `p`, indexed `[l][i][j]`.
pub fn covariant_derivative_h(
    imm: &Immersion,
    p: &[f64],
) -> Result<Vec<Vec<Vec<Vec<f64>>>>, GeometryError> {
    Ok(snapshot(imm, p)?.covariant_derivative_h())
}

pub fn codazzi_residual(imm: &Immersion, p: &[f64]) -> Result<f64, GeometryError> {
    Ok(snapshot(imm, p)?.codazzi_residual())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::{builtin_by_name, helix, plane, unit_sphere};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn sphere_metric() {
        let s = snapshot(&unit_sphere(2, 3).unwrap(), &[FRAC_PI_3, 0.0]).unwrap();
        assert_abs_diff_eq!(s.metric[(0, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.metric[(1, 1)], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(s.metric[(0, 1)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn plane_is_flat_and_totally_geodesic() {
        let s = snapshot(&plane().unwrap(), &[0.3, -0.2]).unwrap();
        assert!(s.h.iter().flatten().flatten().all(|v| *v == 0.0));
        assert!(s.christoffel.iter().flatten().flatten().all(|v| *v == 0.0));
        assert_eq!(s.codazzi_residual(), 0.0);
    }

    #[test]
    fn helix_speed_squared() {
        let s = snapshot(&helix(3.0, 4.0).unwrap(), &[1.0]).unwrap();
        assert_abs_diff_eq!(s.metric[(0, 0)], 25.0, epsilon = 1e-13);
    }

    #[test]
    fn second_fundamental_form_is_normal() {
        let imm = builtin_by_name("torus").unwrap();
        let s = snapshot(&imm, &[0.7, 2.0]).unwrap();
        assert!(s.tangency_defect() < 1e-10);
        assert!(s.connection_antisymmetry_defect() < 1e-10);
    }

    #[test]
    fn sphere_h_is_parallel() {
        let s = snapshot(&unit_sphere(2, 3).unwrap(), &[1.1, 0.4]).unwrap();
        for v in s.covariant_derivative_h().iter().flatten().flatten() {
            assert!(norm(v) < 1e-12);
        }
    }
}
