//! Pointwise extrinsic and intrinsic geometry of an immersion.
//!
//! Everything is computed from one order-3 jet of the immersion at the
//! chart point. Tangents, metric, Christoffel symbols and the second
//! fundamental form are carried as jets one order lower at each step, so
//! first derivatives of `Γ` and `h` (needed by the curvature tensor and by
//! `∇̄h`) come out of the same pass without finite differencing.

mod curvature;
mod normal;
mod snapshot;

use thiserror::Error;

use crate::immersion::ImmersionError;
use crate::jets::JetError;

pub use curvature::{curvature, CurvatureData, CurvatureRoute};
pub use normal::{
    first_normal_space, normal_covariant_derivative, normal_derivative_from_jets, shape_operator,
    FirstNormalSpace,
};
pub use snapshot::{codazzi_residual, covariant_derivative_h, snapshot, GeometrySnapshot};

/// Relative singular-value cutoff for the rank of `Im h`.
pub const NORMAL_RANK_TOL: f64 = 1e-10;

/// Allowed tangential part of a vector handed in as normal, relative to its
/// length.
pub const NORMAL_LEAKAGE_TOL: f64 = 1e-8;

/// Smallest sine of the angle between two vectors spanning a plane for
/// sectional curvature.
pub const PLANE_ANGLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Immersion(#[from] ImmersionError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("vector is not normal: tangential part {leakage:.3e} of length {length:.3e}")]
    NotNormal { leakage: f64, length: f64 },
    #[error("degenerate 2-plane: sine of angle {sine:.3e}")]
    DegeneratePlane { sine: f64 },
    #[error("Frenet frame undefined at {point:?}: curvature {kappa:.3e}")]
    FrenetUndefined { point: Vec<f64>, kappa: f64 },
    #[error("{0}")]
    Dimension(String),
    #[error("empty sample grid")]
    EmptyGrid,
}
