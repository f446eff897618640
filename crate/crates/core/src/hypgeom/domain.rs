use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planar (or spatial, for `n = 3`) base domain `Ω`, centred at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// Disk (`n = 2`) or ball (`n = 3`).
    Ball { radius: f64 },
    /// Axis-aligned box with optional rounded corners.
    Box {
        half_widths: Vec<f64>,
        #[serde(default)]
        corner_radius: f64,
    },
}

impl Domain {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Domain::Ball { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::Validation(format!("ball radius must be > 0, got {radius}")));
                }
            }
            Domain::Box {
                half_widths,
                corner_radius,
            } => {
                if half_widths.len() != dim {
                    return Err(Error::Validation(format!(
                        "box needs {dim} half widths, got {}",
                        half_widths.len()
                    )));
                }
                if half_widths.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(Error::Validation("box half widths must be > 0".into()));
                }
                let min_half = half_widths.iter().copied().fold(f64::INFINITY, f64::min);
                if !(*corner_radius >= 0.0 && *corner_radius <= min_half) {
                    return Err(Error::Validation(format!(
                        "corner radius must lie in [0, {min_half}], got {corner_radius}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Signed distance, negative inside.
    pub fn sdf(&self, x: &[f64]) -> f64 {
        match self {
            Domain::Ball { radius } => x.iter().map(|v| v * v).sum::<f64>().sqrt() - radius,
            Domain::Box {
                half_widths,
                corner_radius,
            } => {
                let mut outside = 0.0;
                let mut inside = f64::NEG_INFINITY;
                for (xi, w) in x.iter().zip(half_widths) {
                    let q = xi.abs() - (w - corner_radius);
                    outside += q.max(0.0).powi(2);
                    inside = inside.max(q);
                }
                outside.sqrt() + inside.min(0.0) - corner_radius
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.sdf(x) < 0.0
    }

    /// Parameter `t ∈ [0, 1]` where the segment `outside + t (inside − outside)`
    /// meets `∂Ω`.
    pub fn crossing(&self, outside: &[f64], inside: &[f64]) -> f64 {
        let at = |t: f64| -> f64 {
            let p: Vec<f64> = outside
                .iter()
                .zip(inside)
                .map(|(o, i)| o + t * (i - o))
                .collect();
            self.sdf(&p)
        };
        if at(0.0) <= 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if at(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Half extents of the bounding box.
    pub fn half_extents(&self, dim: usize) -> Vec<f64> {
        match self {
            Domain::Ball { radius } => vec![*radius; dim],
            Domain::Box { half_widths, .. } => half_widths.clone(),
        }
    }

    /// Largest distance from the origin to a point of `∂Ω`.
    pub fn circumradius(&self) -> f64 {
        match self {
            Domain::Ball { radius } => *radius,
            Domain::Box {
                half_widths,
                corner_radius,
            } => {
                let inner: f64 = half_widths
                    .iter()
                    .map(|w| (w - corner_radius).powi(2))
                    .sum::<f64>()
                    .sqrt();
                inner + corner_radius
            }
        }
    }

    /// Whether `∂Ω` is smooth with nonnegative mean curvature. Sharp box
    /// corners fail; rounded corners on a convex box pass.
    pub fn has_nonnegative_mean_curvature(&self) -> bool {
        match self {
            Domain::Ball { .. } => true,
            Domain::Box { corner_radius, .. } => *corner_radius > 0.0,
        }
    }
}
