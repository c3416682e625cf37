//! Rectifying-specific analysis: the position split, the rectifying and
//! concurrency residuals, classification, the structure-theorem report and
//! the Frenet apparatus of space curves.

mod analysis;
mod curve;
mod report;
mod split;

use serde::Serialize;

use crate::format::ser_f64;

pub use analysis::{analyze_grid, PointAnalysis, StructurePoint};
pub use curve::{
    frenet, frenet_table, orthonormality_defect, rectifying_curve_residual, CurveResidual,
    FrenetApparatus, FrenetReport, FrenetRow, CURVATURE_THRESHOLD,
};
pub use report::{
    classify, structure_report, Check, Classification, FittedConstants, GridDescription,
    PointNote, ReportKind, ReportOptions, Verdict, VerificationReport,
};
pub use split::{
    concurrency_residual, normal_position_field, position_split, rectifying_residual,
    PositionSplit,
};

/// Residual thresholds used by every check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Identities that jets reproduce to rounding: first and second order.
    #[serde(serialize_with = "ser_f64")]
    pub exact: f64,
    /// Identities involving third derivatives (curvature, Codazzi).
    #[serde(serialize_with = "ser_f64")]
    pub third: f64,
    /// Values above this count as decisively nonzero.
    #[serde(serialize_with = "ser_f64")]
    pub negative_floor: f64,
    /// `|x^T|` or `|x^N|` at or below `degenerate · (1 + |x|)` counts as
    /// vanishing.
    #[serde(serialize_with = "ser_f64")]
    pub degenerate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            exact: 1e-8,
            third: 1e-7,
            negative_floor: 1e-3,
            degenerate: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("exact", self.exact),
            ("third", self.third),
            ("negative_floor", self.negative_floor),
            ("degenerate", self.degenerate),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("tolerance `{name}` must be positive, got {v}"));
            }
        }
        Ok(())
    }
}
