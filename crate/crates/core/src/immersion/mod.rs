//! Immersions `x: U ⊂ Rⁿ → Eᵐ` evaluable to jets, a catalog of analytic
//! examples, and the warped-cone constructor of rectifying submanifolds.

mod builtin;
mod construct;

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::chart::{Grid, Interval};
use crate::exprdsl::{default_var_names, EvalError, ImmersionSpec};
use crate::jets::{Jet, JetError};

pub use builtin::{
    base_family_by_name, builtin_by_name, circle, clifford_torus, cone_over, cylinder, graph, helix, line, plane,
    saddle, torus, unit_sphere,
};
pub use construct::{
    construct_rectifying, construct_rectifying_curve, rectifying_curve_spec, rectifying_spec,
    spherical_factor, BaseFamily, BaseMetricFactor, SphericalFactor, DEFAULT_T_RANGE,
};

/// Smallest admissible ratio σ_min/σ_max of the Jacobian.
pub const REGULARITY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImmersionError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point has {got} coordinates, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("point {point:?} lies outside the chart domain")]
    OutsideDomain { point: Vec<f64> },
    #[error("evaluator returned {got} components, expected {expected}")]
    ComponentCount { expected: usize, got: usize },
    #[error("immersion is not regular at {point:?}: singular value ratio {ratio:.3e}")]
    NotRegular { point: Vec<f64>, ratio: f64 },
    #[error("non-finite value at {point:?}")]
    NonFinite { point: Vec<f64> },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub type Evaluator = dyn Fn(&[f64], u8) -> Result<Vec<Jet>, ImmersionError> + Send + Sync;

/// A map from an n-dimensional chart box into Euclidean m-space.
#[derive(Clone)]
pub struct Immersion {
    chart_dim: usize,
    ambient_dim: usize,
    domain: Vec<Interval>,
    var_names: Vec<String>,
    label: String,
    evaluator: Arc<Evaluator>,
}

impl fmt::Debug for Immersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Immersion")
            .field("label", &self.label)
            .field("chart_dim", &self.chart_dim)
            .field("ambient_dim", &self.ambient_dim)
            .field("domain", &self.domain)
            .finish()
    }
}

impl Immersion {
    pub fn new(
        label: impl Into<String>,
        ambient_dim: usize,
        domain: Vec<Interval>,
        evaluator: impl Fn(&[f64], u8) -> Result<Vec<Jet>, ImmersionError> + Send + Sync + 'static,
    ) -> Result<Immersion, ImmersionError> {
        let chart_dim = domain.len();
        if chart_dim == 0 || ambient_dim < chart_dim {
            return Err(ImmersionError::InvalidParameter(format!(
                "need m >= n >= 1, got n = {chart_dim}, m = {ambient_dim}"
            )));
        }
        Ok(Immersion {
            chart_dim,
            ambient_dim,
            domain,
            var_names: default_var_names(chart_dim),
            label: label.into(),
            evaluator: Arc::new(evaluator),
        })
    }

    /// Wraps a closed form written directly in jet arithmetic. The closure
    /// receives one seeded jet per chart coordinate.
    pub fn from_jet_fn(
        label: impl Into<String>,
        ambient_dim: usize,
        domain: Vec<Interval>,
        f: impl Fn(&[Jet]) -> Result<Vec<Jet>, JetError> + Send + Sync + 'static,
    ) -> Result<Immersion, ImmersionError> {
        Immersion::new(label, ambient_dim, domain, move |p, order| {
            let seeds = Jet::seed(p, order)?;
            Ok(f(&seeds)?)
        })
    }

    /// Immersion backed by a parsed `.imm` spec. Regularity is checked when
    /// points are sampled, not here.
    pub fn from_spec(spec: ImmersionSpec) -> Immersion {
        let spec = Arc::new(spec);
        let label = spec
            .components
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let eval_spec = Arc::clone(&spec);
        Immersion {
            chart_dim: spec.chart_dim,
            ambient_dim: spec.ambient_dim,
            domain: spec.domain.clone(),
            var_names: spec.var_names.clone(),
            label: format!("x = [{label}]"),
            evaluator: Arc::new(move |p, order| Ok(eval_spec.eval(p, order)?)),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Immersion {
        self.label = label.into();
        self
    }

    pub fn with_var_names(mut self, names: Vec<String>) -> Immersion {
        assert_eq!(names.len(), self.chart_dim);
        self.var_names = names;
        self
    }

    pub fn with_domain(mut self, domain: Vec<Interval>) -> Immersion {
        assert_eq!(domain.len(), self.chart_dim);
        self.domain = domain;
        self
    }

    pub fn chart_dim(&self) -> usize {
        self.chart_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn default_grid(&self) -> Grid {
        Grid::default_for(&self.domain)
    }

    /// The m component jets at `point`, each in `chart_dim` variables.
    pub fn evaluate(&self, point: &[f64], order: u8) -> Result<Vec<Jet>, ImmersionError> {
        if point.len() != self.chart_dim {
            return Err(ImmersionError::Dimension {
                expected: self.chart_dim,
                got: point.len(),
            });
        }
        if !point
            .iter()
            .zip(&self.domain)
            .all(|(&p, iv)| iv.contains_with_slack(p))
        {
            return Err(ImmersionError::OutsideDomain {
                point: point.to_vec(),
            });
        }
        let jets = (self.evaluator)(point, order)?;
        if jets.len() != self.ambient_dim {
            return Err(ImmersionError::ComponentCount {
                expected: self.ambient_dim,
                got: jets.len(),
            });
        }
        if !jets.iter().all(Jet::is_finite) {
            return Err(ImmersionError::NonFinite {
                point: point.to_vec(),
            });
        }
        Ok(jets)
    }

    pub fn position(&self, point: &[f64]) -> Result<Vec<f64>, ImmersionError> {
        Ok(self.evaluate(point, 0)?.iter().map(Jet::value).collect())
    }

    /// `n × m` matrix whose rows are the coordinate tangent vectors.
    pub fn jacobian(&self, point: &[f64]) -> Result<DMatrix<f64>, ImmersionError> {
        let jets = self.evaluate(point, 1)?;
        Ok(DMatrix::from_fn(self.chart_dim, self.ambient_dim, |i, a| {
            jets[a].gradient()[i]
        }))
    }

    /// σ_min/σ_max of the Jacobian at `point`.
    pub fn regularity_ratio(&self, point: &[f64]) -> Result<f64, ImmersionError> {
        Ok(jacobian_ratio(&self.jacobian(point)?))
    }

    pub fn check_regularity(&self, point: &[f64]) -> Result<(), ImmersionError> {
        let ratio = self.regularity_ratio(point)?;
        if ratio > REGULARITY_THRESHOLD {
            Ok(())
        } else {
            Err(ImmersionError::NotRegular {
                point: point.to_vec(),
                ratio,
            })
        }
    }

    /// The homothety `μ·x`.
    pub fn scaled(&self, factor: f64) -> Immersion {
        let inner = Arc::clone(&self.evaluator);
        Immersion {
            evaluator: Arc::new(move |p, order| {
                Ok(inner(p, order)?.iter().map(|j| j.scale(factor)).collect())
            }),
            label: format!("{factor} * ({})", self.label),
            ..self.clone()
        }
    }
}

pub(crate) fn jacobian_ratio(jac: &DMatrix<f64>) -> f64 {
    let sv = jac.singular_values();
    let max = sv.max();
    let min = sv.min();
    if max > 0.0 && max.is_finite() {
        min / max
    } else {
        0.0
    }
}

/// Max of `|⟨Y, Y⟩ − 1|` over the grid.
pub(crate) fn unit_norm_defect(imm: &Immersion, grid: &Grid) -> Result<f64, ImmersionError> {
    let mut worst: f64 = 0.0;
    for p in grid.points() {
        let y = imm.position(&p)?;
        let n2: f64 = y.iter().map(|v| v * v).sum();
        worst = worst.max((n2 - 1.0).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprdsl::parse_immersion;

    #[test]
    fn rank_deficient_chart_fails_regularity() {
        let spec =
            parse_immersion("dim 2 -> 3\nx = [s + u2, s + u2, 1]\ns in [0, 1]\nu2 in [0, 1]")
                .unwrap();
        let imm = Immersion::from_spec(spec);
        assert!(matches!(
            imm.check_regularity(&[0.5, 0.5]),
            Err(ImmersionError::NotRegular { .. })
        ));
    }

    #[test]
    fn sphere_spec_is_a_spherical_factor() {
        let spec = parse_immersion(
            "dim 2 -> 3\nvars t, u\nx = [sin(t)*cos(u), sin(t)*sin(u), cos(t)]\nt in [0.2, 3]\nu in [0, 6.28]",
        )
        .unwrap();
        let imm = Immersion::from_spec(spec);
        assert_eq!(imm.var_names(), ["t", "u"]);
        assert!(SphericalFactor::new(imm).is_ok());
    }

    #[test]
    fn evaluate_checks_domain_and_dimension() {
        let h = helix(3.0, 4.0).unwrap();
        assert!(matches!(
            h.evaluate(&[100.0], 1),
            Err(ImmersionError::OutsideDomain { .. })
        ));
        assert!(matches!(
            h.evaluate(&[0.0, 1.0], 1),
            Err(ImmersionError::Dimension { .. })
        ));
    }

    #[test]
    fn homothety_scales_positions() {
        let h = helix(3.0, 4.0).unwrap();
        let p = h.position(&[1.0]).unwrap();
        let q = h.scaled(3.0).position(&[1.0]).unwrap();
        for (a, b) in p.iter().zip(&q) {
            assert!((3.0 * a - b).abs() < 1e-15);
        }
    }
}
