use crate::geometry::{snapshot, GeometryError, GeometrySnapshot};
use crate::immersion::Immersion;
use crate::jets::{dot as jet_dot, Jet};
use crate::linalg::{dot, jet_combination, norm, values};

/// `x = x^T + x^N` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionSplit {
    pub tangential: Vec<f64>,
    /// Chart components `a^k` of `x^T = a^k x_k`.
    pub chart_components: Vec<f64>,
    pub normal: Vec<f64>,
    pub rho: f64,
    pub nu: f64,
}

/// Order-1 jets of the split, for quantities differentiated along `M`.
#[derive(Debug, Clone)]
pub(crate) struct SplitJets {
    pub a: Vec<Jet>,
    pub tangential: Vec<Jet>,
    pub normal: Vec<Jet>,
}

pub(crate) fn split_jets(snap: &GeometrySnapshot) -> SplitJets {
    let j = &snap.jets;
    let n = snap.chart_dim();
    let xt: Vec<Jet> = j.tangents.iter().map(|t| jet_dot(&j.position, t)).collect();
    let a: Vec<Jet> = (0..n)
        .map(|k| {
            let mut acc = xt[0].constant_like(0.0);
            for (gk, v) in j.metric_inv[k].iter().zip(&xt) {
                acc = &acc + &(gk * v);
            }
            acc
        })
        .collect();
    let tangential = jet_combination(&a, &j.tangents);
    let normal: Vec<Jet> = j.position.iter().zip(&tangential).map(|(x, t)| x - t).collect();
    SplitJets {
        a,
        tangential,
        normal,
    }
}

/// `x^T = Σ g^{ij}⟨x, x_j⟩ x_i`, `x^N = x − x^T`.
pub fn position_split(snap: &GeometrySnapshot) -> PositionSplit {
    let s = split_jets(snap);
    let tangential = values(&s.tangential);
    let normal = values(&s.normal);
    PositionSplit {
        rho: norm(&tangential),
        nu: norm(&normal),
        chart_components: values(&s.a),
        tangential,
        normal,
    }
}

/// `max_{a≤b} |⟨x, h(e_a, e_b)⟩| / ((1 + |x|)(1 + max |h|))`.
pub fn rectifying_residual(snap: &GeometrySnapshot) -> f64 {
    let n = snap.chart_dim();
    let x = &snap.position;
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in a..n {
            worst = worst.max(dot(x, &snap.h_frame(a, b)).abs());
        }
    }
    worst / ((1.0 + norm(x)) * (1.0 + snap.h_max_norm()))
}

/// Chart components of `∇_{∂i} x^T − ∂_i` for each `i`.
pub(crate) fn concurrency_defects(snap: &GeometrySnapshot, split: &SplitJets) -> Vec<Vec<f64>> {
    let n = snap.chart_dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    let mut v = split.a[k].gradient()[i];
                    for j in 0..n {
                        v += snap.christoffel[k][i][j] * split.a[j].value();
                    }
                    if k == i {
                        v -= 1.0;
                    }
                    v
                })
                .collect()
        })
        .collect()
}

pub(crate) fn concurrency_from_snapshot(snap: &GeometrySnapshot, split: &SplitJets) -> f64 {
    let mut unit = vec![0.0; snap.chart_dim()];
    concurrency_defects(snap, split)
        .iter()
        .enumerate()
        .map(|(i, d)| {
            unit.iter_mut().for_each(|u| *u = 0.0);
            unit[i] = 1.0;
            snap.inner(d, d).sqrt() / (1.0 + snap.inner(&unit, &unit).sqrt())
        })
        .fold(0.0, f64::max)
}

/// `max_i |∇_{∂i} x^T − ∂_i|_g / (1 + |∂_i|_g)`; zero iff `x^T` is
/// concurrent at `p`.
pub fn concurrency_residual(imm: &Immersion, p: &[f64]) -> Result<f64, GeometryError> {
    let snap = snapshot(imm, p)?;
    let split = split_jets(&snap);
    Ok(concurrency_from_snapshot(&snap, &split))
}

/// `x^N` as a normal field of order-1 jets, for
/// [`normal_covariant_derivative`](crate::geometry::normal_covariant_derivative).
pub fn normal_position_field(imm: &Immersion) -> impl Fn(&[f64]) -> Result<Vec<Jet>, GeometryError> + '_ {
    move |p| Ok(split_jets(&snapshot(imm, p)?).normal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::{builtin_by_name, plane, unit_sphere};
    use approx::assert_abs_diff_eq;

    #[test]
    fn sphere_position_is_normal() {
        let imm = unit_sphere(2, 3).unwrap();
        let snap = snapshot(&imm, &[1.0, 2.0]).unwrap();
        let s = position_split(&snap);
        assert!(s.rho < 1e-15);
        assert_abs_diff_eq!(s.nu, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rectifying_residual(&snap), 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(concurrency_residual(&imm, &[1.0, 2.0]).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn cone_position_is_tangent() {
        let imm = builtin_by_name("cone").unwrap();
        let snap = snapshot(&imm, &[1.2, 0.5]).unwrap();
        let s = position_split(&snap);
        assert!(s.nu < 1e-14);
        assert_abs_diff_eq!(s.rho, norm(&snap.position), epsilon = 1e-14);
        assert!(concurrency_residual(&imm, &[1.2, 0.5]).unwrap() < 1e-14);
    }

    #[test]
    fn constructed_example_at_s_two() {
        let imm = builtin_by_name("rectifying:c=1").unwrap();
        let snap = snapshot(&imm, &[2.0, 1.0]).unwrap();
        let s = position_split(&snap);
        assert_abs_diff_eq!(s.rho, 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(s.nu, 1.0, epsilon = 1e-13);
        let sum: Vec<f64> = s.tangential.iter().zip(&s.normal).map(|(a, b)| a + b).collect();
        for (a, b) in sum.iter().zip(&snap.position) {
            assert!((a - b).abs() <= 1e-12 * norm(&snap.position));
        }
        assert!(dot(&s.tangential, &s.normal).abs() <= 1e-10 * dot(&snap.position, &snap.position));
    }

    #[test]
    fn plane_through_origin_is_vacuously_rectifying() {
        let snap = snapshot(&plane().unwrap(), &[0.3, 0.4]).unwrap();
        assert_eq!(rectifying_residual(&snap), 0.0);
    }
}
