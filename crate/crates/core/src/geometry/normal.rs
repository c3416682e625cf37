use nalgebra::DMatrix;

use super::{snapshot, GeometryError, GeometrySnapshot, NORMAL_LEAKAGE_TOL, NORMAL_RANK_TOL};
use crate::immersion::Immersion;
use crate::jets::Jet;
use crate::linalg::{dot, norm, sign_fix, values};

fn check_normal(snap: &GeometrySnapshot, xi: &[f64]) -> Result<(), GeometryError> {
    let length = norm(xi);
    let leakage = snap.tangential_length(xi);
    if leakage > NORMAL_LEAKAGE_TOL * length.max(1.0) {
        return Err(GeometryError::NotNormal { leakage, length });
    }
    Ok(())
}

/// `A_ξ` in the orthonormal frame: `(A_ξ)_ab = ⟨h(e_a, e_b), ξ⟩`.
pub fn shape_operator(snap: &GeometrySnapshot, xi: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
    if xi.len() != snap.ambient_dim() {
        return Err(GeometryError::Dimension(format!(
            "normal vector has {} components, expected {}",
            xi.len(),
            snap.ambient_dim()
        )));
    }
    let length = norm(xi);
    let leakage = snap.tangential_length(xi);
    if leakage > NORMAL_LEAKAGE_TOL * length {
        return Err(GeometryError::NotNormal { leakage, length });
    }
    let n = snap.chart_dim();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = dot(&snap.h_frame(i, j), xi);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    Ok(a)
}

/// `Im h_p = span{h(X, Y)}` with an orthonormal basis.
#[derive(Debug, Clone)]
pub struct FirstNormalSpace {
    pub basis: Vec<Vec<f64>>,
    pub dim: usize,
    pub singular_values: Vec<f64>,
}

impl FirstNormalSpace {
    /// Length of the orthogonal projection of `v` onto the space.
    pub fn projection_length(&self, v: &[f64]) -> f64 {
        self.basis
            .iter()
            .map(|b| dot(b, v).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// SVD of the `m × n(n+1)/2` matrix whose columns are `h(e_a, e_b)`,
/// `a ≤ b`.
pub fn first_normal_space(snap: &GeometrySnapshot) -> FirstNormalSpace {
    let n = snap.chart_dim();
    let m = snap.ambient_dim();
    let mut cols = Vec::new();
    for a in 0..n {
        for b in a..n {
            cols.push(snap.h_frame(a, b));
        }
    }
    let mat = DMatrix::from_fn(m, cols.len(), |r, c| cols[c][r]);
    let svd = mat.svd(true, false);
    let u = svd.u.expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let cutoff = NORMAL_RANK_TOL.max(NORMAL_RANK_TOL * smax);
    let basis: Vec<Vec<f64>> = order
        .iter()
        .filter(|&&i| svd.singular_values[i] > cutoff)
        .map(|&i| {
            let mut v: Vec<f64> = u.column(i).iter().copied().collect();
            sign_fix(&mut v);
            v
        })
        .collect();
    FirstNormalSpace {
        dim: basis.len(),
        basis,
        singular_values,
    }
}

/// `D_{∂i} ξ = P^⊥(∂_i ξ)` for a normal field given by its jets at the
/// snapshot point (order ≥ 1, in the chart variables).
pub fn normal_derivative_from_jets(
    snap: &GeometrySnapshot,
    field: &[Jet],
) -> Result<Vec<Vec<f64>>, GeometryError> {
    if field.len() != snap.ambient_dim() {
        return Err(GeometryError::Dimension(format!(
            "field has {} components, expected {}",
            field.len(),
            snap.ambient_dim()
        )));
    }
    check_normal(snap, &values(field))?;
    let n = snap.chart_dim();
    Ok((0..n)
        .map(|i| {
            let d: Vec<f64> = field.iter().map(|c| c.gradient()[i]).collect();
            snap.project_normal(&d)
        })
        .collect())
}

/// `D_{∂i} ξ` for each chart direction, where `field(p)` returns the
/// ambient components of `ξ` as jets at `p` of order at least 1.
pub fn normal_covariant_derivative(
    imm: &Immersion,
    p: &[f64],
    field: impl Fn(&[f64]) -> Result<Vec<Jet>, GeometryError>,
) -> Result<Vec<Vec<f64>>, GeometryError> {
    let snap = snapshot(imm, p)?;
    normal_derivative_from_jets(&snap, &field(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::{cylinder, plane, unit_sphere};
    use crate::linalg::scale;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sphere_shape_operator_is_identity() {
        let s = snapshot(&unit_sphere(2, 3).unwrap(), &[0.9, 2.0]).unwrap();
        let a = shape_operator(&s, &scale(&s.position, -1.0)).unwrap();
        assert_abs_diff_eq!(a, DMatrix::identity(2, 2), epsilon = 1e-13);
        assert_abs_diff_eq!(a.trace(), 2.0, epsilon = 1e-13);
        let fns = first_normal_space(&s);
        assert_eq!(fns.dim, 1);
        assert_abs_diff_eq!(dot(&fns.basis[0], &s.position).abs(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn cylinder_principal_curvatures() {
        let s = snapshot(&cylinder(2.0).unwrap(), &[0.4, 0.3]).unwrap();
        let x = &s.position;
        let inward = vec![-x[0] / 2.0, -x[1] / 2.0, 0.0];
        let a = shape_operator(&s, &inward).unwrap();
        let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(ev[0], 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(ev[1], 0.5, epsilon = 1e-13);
    }

    #[test]
    fn tangential_vectors_are_rejected() {
        let s = snapshot(&plane().unwrap(), &[0.1, 0.2]).unwrap();
        assert!(matches!(
            shape_operator(&s, &[1.0, 0.0, 1.0]),
            Err(GeometryError::NotNormal { .. })
        ));
        assert_eq!(first_normal_space(&s).dim, 0);
    }

    #[test]
    fn position_on_sphere_is_normally_parallel() {
        let imm = unit_sphere(2, 3).unwrap();
        let d = normal_covariant_derivative(&imm, &[0.8, 1.0], |p| Ok(imm.evaluate(p, 1)?)).unwrap();
        assert!(d.iter().flatten().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn constant_normal_of_plane() {
        let imm = plane().unwrap();
        let d = normal_covariant_derivative(&imm, &[0.5, 0.5], |p| {
            let seeds = Jet::seed(p, 1)?;
            Ok(vec![0.0, 0.0, 1.0]
                .into_iter()
                .map(|v| seeds[0].constant_like(v))
                .collect())
        })
        .unwrap();
        assert!(d.iter().flatten().all(|v| *v == 0.0));
    }
}
