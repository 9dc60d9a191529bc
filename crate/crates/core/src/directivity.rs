//! Directivity D(y) = a/(s − a) on the future cone.
//!
//! D depends on the combined extension only, is homogeneous of degree zero
//! and subadditive: D(y₁ + y₂) ≤ D(y₁) + D(y₂). For a cone that makes it
//! convex.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spacetime::SpacetimeDirection;

/// Gaps in `[-CONVEXITY_FLOOR, 0)` are round-off and count as zero.
pub const CONVEXITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct DirectivityValue(f64);

impl DirectivityValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<DirectivityValue> for f64 {
    fn from(d: DirectivityValue) -> f64 {
        d.0
    }
}

/// D from a disk radius and duration parameter.
pub fn directivity_from(a: f64, s: f64) -> Result<DirectivityValue> {
    if !(s > 0.0 && a >= 0.0 && a < s) {
        return Err(Error::ConeViolation { a, s });
    }
    Ok(DirectivityValue(a / (s - a)))
}

pub fn directivity(y: &SpacetimeDirection) -> Result<DirectivityValue> {
    directivity_from(y.radius(), y.s)
}

/// D(y₁) + D(y₂) − D(y₁ + y₂), non-negative up to round-off.
pub fn convexity_gap(y1: &SpacetimeDirection, y2: &SpacetimeDirection) -> Result<f64> {
    let d1 = directivity(y1)?.0;
    let d2 = directivity(y2)?.0;
    let d12 = directivity(&(*y1 + *y2))?.0;
    Ok(d1 + d2 - d12)
}
