//! Chart boxes and the deterministic sampling grids laid over them.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval, String> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(format!("interval [{lo}, {hi}] has non-finite bounds"));
        }
        if !(hi > lo) {
            return Err(format!("interval [{lo}, {hi}] must have positive length"));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    /// Membership with a relative slack of `1e-12 · len` for points that
    /// were computed rather than typed.
    pub fn contains_with_slack(&self, v: f64) -> bool {
        let slack = 1e-12 * self.len();
        v >= self.lo - slack && v <= self.hi + slack
    }

    /// The interval with `fraction · len` removed from each end.
    pub fn shrink(&self, fraction: f64) -> Interval {
        let d = fraction * self.len();
        Interval {
            lo: self.lo + d,
            hi: self.hi - d,
        }
    }
}

/// Fraction trimmed from each end of every chart interval before sampling.
pub const DEFAULT_SHRINK: f64 = 0.05;

/// Points per chart dimension when none are requested.
pub const DEFAULT_POINTS: usize = 9;

/// Tensor-product grid with uniformly spaced axes, including endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub axes: Vec<Vec<f64>>,
    pub bounds: Vec<Interval>,
}

impl Grid {
    /// `sizes[i]` uniform points over each domain interval shrunk by
    /// `shrink` at both ends.
    pub fn new(domain: &[Interval], sizes: &[usize], shrink: f64) -> Result<Grid, String> {
        if sizes.len() != domain.len() {
            return Err(format!(
                "grid has {} sizes for a {}-dimensional chart",
                sizes.len(),
                domain.len()
            ));
        }
        if let Some(s) = sizes.iter().find(|&&s| s < 2) {
            return Err(format!("grid size {s} is below the minimum of 2"));
        }
        if !(0.0..0.5).contains(&shrink) {
            return Err(format!("shrink fraction {shrink} outside [0, 0.5)"));
        }
        let bounds: Vec<Interval> = domain.iter().map(|iv| iv.shrink(shrink)).collect();
        let axes = bounds
            .iter()
            .zip(sizes)
            .map(|(iv, &k)| {
                (0..k)
                    .map(|i| {
                        if i + 1 == k {
                            iv.hi
                        } else {
                            iv.lo + iv.len() * (i as f64) / ((k - 1) as f64)
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Grid { axes, bounds })
    }

    /// Default grid: 9 points per dimension, 5% trimmed from each end.
    pub fn default_for(domain: &[Interval]) -> Grid {
        Grid::new(domain, &vec![DEFAULT_POINTS; domain.len()], DEFAULT_SHRINK)
            .expect("default grid parameters are valid")
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All grid points in lexicographic order (first coordinate slowest).
    pub fn points(&self) -> Vec<Vec<f64>> {
        let total = self.len();
        let mut out = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let mut p = vec![0.0; self.axes.len()];
            for (d, axis) in self.axes.iter().enumerate().rev() {
                p[d] = axis[rem % axis.len()];
                rem /= axis.len();
            }
            out.push(p);
        }
        out
    }
}
