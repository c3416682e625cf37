//! Small dense helpers on `f64` slices and on vectors of jets.

use crate::jets::{dot as jet_dot, Jet, JetError};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], k: f64) -> Vec<f64> {
    a.iter().map(|x| x * k).collect()
}

/// `a += k · b`
pub fn axpy(a: &mut [f64], k: f64, b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += k * y;
    }
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Flips `v` so that its first component with magnitude above `1e-12` is
/// positive.
pub fn sign_fix(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|c| c.abs() > 1e-12) {
        if *first < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
    }
}

pub fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(Jet::value).collect()
}

/// Componentwise `∂_var` of a vector of jets.
pub fn derivative(v: &[Jet], var: usize) -> Result<Vec<Jet>, JetError> {
    v.iter().map(|j| j.derivative(var)).collect()
}

pub fn truncate(v: &[Jet], order: u8) -> Result<Vec<Jet>, JetError> {
    v.iter().map(|j| j.truncate(order)).collect()
}

pub fn jet_norm(v: &[Jet]) -> Result<Jet, JetError> {
    jet_dot(v, v).sqrt()
}

pub fn jet_scale(v: &[Jet], k: &Jet) -> Vec<Jet> {
    v.iter().map(|j| j * k).collect()
}

/// `a − k · b`
pub fn jet_sub_scaled(a: &[Jet], k: &Jet, b: &[Jet]) -> Vec<Jet> {
    a.iter().zip(b).map(|(x, y)| x - &(k * y)).collect()
}

/// Σ_k coeffs[k] · vectors[k]
pub fn jet_combination(coeffs: &[Jet], vectors: &[Vec<Jet>]) -> Vec<Jet> {
    let mut out: Vec<Jet> = vectors[0].iter().map(|j| j.constant_like(0.0)).collect();
    for (c, v) in coeffs.iter().zip(vectors) {
        for (o, x) in out.iter_mut().zip(v) {
            *o = &*o + &(c * x);
        }
    }
    out
}

/// Inverse of a square matrix of jets by Gauss–Jordan elimination with
/// partial pivoting on the value parts.
pub fn jet_inverse(a: &[Vec<Jet>]) -> Result<Vec<Vec<Jet>>, JetError> {
    let n = a.len();
    let mut m: Vec<Vec<Jet>> = a.to_vec();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| a[0][0].constant_like(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| m[r][col].value().abs().total_cmp(&m[s][col].value().abs()))
            .expect("non-empty range");
        if m[pivot][col].value() == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col].recip()?;
        m[col] = m[col].iter().map(|x| x * &p).collect();
        inv[col] = inv[col].iter().map(|x| x * &p).collect();
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r][col].clone();
            m[r] = jet_sub_scaled(&m[r], &f, &m[col]);
            inv[r] = jet_sub_scaled(&inv[r], &f, &inv[col]);
        }
    }
    Ok(inv)
}

/// Modified Gram–Schmidt in jet arithmetic. Vectors whose remainder after
/// projection is below `1e-8` of their length are skipped; at most `limit`
/// vectors are returned.
pub fn jet_gram_schmidt(
    vectors: &[Vec<Jet>],
    limit: usize,
    fix_signs: bool,
) -> Result<Vec<Vec<Jet>>, JetError> {
    let mut frame: Vec<Vec<Jet>> = Vec::with_capacity(limit);
    for v in vectors {
        if frame.len() == limit {
            break;
        }
        let original = norm(&values(v));
        let mut w = v.clone();
        for e in &frame {
            let k = jet_dot(&w, e);
            w = jet_sub_scaled(&w, &k, e);
        }
        let len = jet_norm(&w)?;
        if len.value() <= 1e-8 * original || len.value() == 0.0 {
            continue;
        }
        let inv = len.recip()?;
        let mut e = jet_scale(&w, &inv);
        if fix_signs {
            let vals = values(&e);
            if let Some(first) = vals.iter().find(|c| c.abs() > 1e-12) {
                if *first < 0.0 {
                    e = e.iter().map(|j| -j).collect();
                }
            }
        }
        frame.push(e);
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_a_jet_matrix() {
        let x = Jet::variable(0, 0.3, 1, 2).unwrap();
        let one = x.constant_like(1.0);
        // [[1, x], [x, 2]]
        let a = vec![vec![one.clone(), x.clone()], vec![x.clone(), one.scale(2.0)]];
        let inv = jet_inverse(&a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut e = a[i][0].constant_like(0.0);
                for k in 0..2 {
                    e = &e + &(&a[i][k] * &inv[k][j]);
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((e.value() - want).abs() < 1e-14);
                assert!(e.coefficients()[1..].iter().all(|c| c.abs() < 1e-13));
            }
        }
    }

    #[test]
    fn gram_schmidt_skips_dependent_vectors() {
        let seeds = Jet::seed(&[0.4, 0.9], 1).unwrap();
        let (s, u) = (&seeds[0], &seeds[1]);
        let zero = s.constant_like(0.0);
        let a = vec![s.clone(), u.clone(), zero.clone()];
        let b = vec![s.scale(2.0), u.scale(2.0), zero.clone()];
        let c = vec![zero.clone(), zero.clone(), zero.constant_like(-1.0)];
        let f = jet_gram_schmidt(&[a, b, c], 3, true).unwrap();
        assert_eq!(f.len(), 2);
        assert!((f[1][2].value() - 1.0).abs() < 1e-15);
    }
}
