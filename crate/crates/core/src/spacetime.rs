//! Real and complex spacetime points, the future cone and the tubes over it,
//! and the complex distance r̃ = sqrt(z·z) with its branch disk.
//!
//! Units: the wave speed is 1, so lengths and times share a unit.
//!
//! # Branch of the complex distance
//!
//! For z = x − iy the bilinear square is
//! `z·z = |x|² − |y|² − 2i x·y`, which is a negative real number exactly on
//! the disk `{x : x·y = 0, |x| < |y|}`. That disk is the branch cut of r̃.
//! Off the disk the root with `Re r̃ > 0` is returned, so r̃ → |x| as y → 0.
//! On the disk the value is `−i·sqrt(|y|² − |x|²)`, the limit taken from the
//! side the vector y points to; approaching from the other side gives the
//! conjugate. Evaluation on the disk never errors.

use std::ops::{Add, Neg, Sub};

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type CVec3 = Vector3<Complex64>;

/// A point x = (𝐱, t) of real spacetime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealSpacetimePoint {
    pub x: Vec3,
    pub t: f64,
}

impl RealSpacetimePoint {
    pub fn new(x: Vec3, t: f64) -> Self {
        Self { x, t }
    }

    pub fn origin() -> Self {
        Self::new(Vec3::zeros(), 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|c| c.is_finite())
    }
}

impl Sub for RealSpacetimePoint {
    type Output = RealSpacetimePoint;

    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.t - rhs.t)
    }
}

impl Add for RealSpacetimePoint {
    type Output = RealSpacetimePoint;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.t + rhs.t)
    }
}

/// The imaginary part y = (𝐲, s) of a complex spacetime point.
///
/// `|𝐲|` is the radius of the source disk, `𝐲/|𝐲|` its orientation and `s`
/// the duration parameter. Cone membership is not enforced here; use
/// [`in_future_cone`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeDirection {
    pub y: Vec3,
    pub s: f64,
}

impl SpacetimeDirection {
    pub fn new(y: Vec3, s: f64) -> Self {
        Self { y, s }
    }

    /// Direction with spatial part `radius · ẑ`.
    pub fn along_z(radius: f64, s: f64) -> Self {
        Self::new(Vec3::new(0.0, 0.0, radius), s)
    }

    /// Spatial norm a = |𝐲|.
    pub fn radius(&self) -> f64 {
        self.y.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.s.is_finite() && self.y.iter().all(|c| c.is_finite())
    }
}

impl Add for SpacetimeDirection {
    type Output = SpacetimeDirection;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.y + rhs.y, self.s + rhs.s)
    }
}

impl Neg for SpacetimeDirection {
    type Output = SpacetimeDirection;

    fn neg(self) -> Self {
        Self::new(-self.y, -self.s)
    }
}

/// Sign of the imaginary part when assembling z = x ± iy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImagSign {
    /// z = x + iy, the future tube when y is in the future cone.
    Plus,
    /// z = x − iy, the past tube when y is in the future cone.
    Minus,
}

/// A complex spacetime point z = (𝐳, τ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSpacetimePoint {
    pub z: CVec3,
    pub tau: Complex64,
}

impl ComplexSpacetimePoint {
    /// Builds z = 𝐱 ± i𝐲, τ = t ± is.
    pub fn from_parts(x: &RealSpacetimePoint, y: &SpacetimeDirection, sign: ImagSign) -> Self {
        let k = match sign {
            ImagSign::Plus => 1.0,
            ImagSign::Minus => -1.0,
        };
        let z = CVec3::new(
            Complex64::new(x.x[0], k * y.y[0]),
            Complex64::new(x.x[1], k * y.y[1]),
            Complex64::new(x.x[2], k * y.y[2]),
        );
        Self {
            z,
            tau: Complex64::new(x.t, k * y.s),
        }
    }

    /// Shorthand for `from_parts(x, y, ImagSign::Minus)`.
    pub fn past(x: &RealSpacetimePoint, y: &SpacetimeDirection) -> Self {
        Self::from_parts(x, y, ImagSign::Minus)
    }

    pub fn real_part(&self) -> RealSpacetimePoint {
        RealSpacetimePoint::new(self.z.map(|c| c.re), self.tau.re)
    }

    pub fn imag_part(&self) -> SpacetimeDirection {
        SpacetimeDirection::new(self.z.map(|c| c.im), self.tau.im)
    }
}

/// `|𝐲| < s`, strict.
pub fn in_future_cone(y: &SpacetimeDirection) -> bool {
    y.radius() < y.s
}

/// z = x − iy with y in the future cone.
pub fn in_past_tube(z: &ComplexSpacetimePoint) -> bool {
    in_future_cone(&-z.imag_part())
}

/// z = x + iy with y in the future cone.
pub fn in_future_tube(z: &ComplexSpacetimePoint) -> bool {
    in_future_cone(&z.imag_part())
}

/// Square root on the branch `Re ≥ 0`, with the sign of a zero imaginary
/// part deciding which side of the cut a negative real input belongs to.
pub(crate) fn branch_sqrt(w: Complex64) -> Complex64 {
    let (u, v) = (w.re, w.im);
    if u == 0.0 && v == 0.0 {
        return Complex64::new(0.0, v);
    }
    let m = u.hypot(v);
    let t = ((u.abs() + m) * 0.5).sqrt();
    if u >= 0.0 {
        Complex64::new(t, v / (2.0 * t))
    } else {
        Complex64::new(v.abs() / (2.0 * t), t.copysign(v))
    }
}

/// Bilinear square z·z of z = x − iy, with the imaginary part's zero carrying
/// a negative sign so that on-disk points take the +ŷ side limit.
fn bilinear_square(x: &Vec3, y: &Vec3) -> Complex64 {
    let dot = x.dot(y);
    let im = if dot == 0.0 { -0.0 } else { -2.0 * dot };
    Complex64::new(x.norm_squared() - y.norm_squared(), im)
}

/// r̃(𝐳) = sqrt(𝐳·𝐳) for a complex 3-vector, on the branch `Re r̃ ≥ 0`.
pub fn complex_distance(z: &CVec3) -> Complex64 {
    let x = z.map(|c| c.re);
    let y = z.map(|c| -c.im);
    complex_distance_xy(&x, &y)
}

/// r̃(𝐱 − i𝐲).
pub fn complex_distance_xy(x: &Vec3, y: &Vec3) -> Complex64 {
    branch_sqrt(bilinear_square(x, y))
}

/// The branch disk S(𝐲): radius |𝐲|, orthogonal to 𝐲.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceDisk {
    pub center: Vec3,
    pub radius: f64,
    pub normal: Vec3,
}

impl SourceDisk {
    /// Euclidean distance from `p` to the closed disk.
    pub fn distance_to(&self, p: &Vec3) -> f64 {
        let d = p - self.center;
        let height = d.dot(&self.normal);
        let rho = (d - height * self.normal).norm();
        if rho <= self.radius {
            height.abs()
        } else {
            height.hypot(rho - self.radius)
        }
    }

    pub fn translated(&self, offset: &Vec3) -> Self {
        Self {
            center: self.center + offset,
            ..*self
        }
    }
}

/// Branch disk of r̃(· − i𝐲), centered at the origin.
pub fn source_disk(y: &SpacetimeDirection) -> Result<SourceDisk> {
    let a = y.radius();
    if a == 0.0 {
        return Err(Error::DegenerateDisk);
    }
    Ok(SourceDisk {
        center: Vec3::zeros(),
        radius: a,
        normal: y.y / a,
    })
}

/// Distance from `x` to the singular set of r̃(· − i𝐲): the disk, or the
/// origin when 𝐲 = 0.
pub fn distance_to_branch_set(x: &Vec3, y: &Vec3) -> f64 {
    match source_disk(&SpacetimeDirection::new(*y, 0.0)) {
        Ok(disk) => disk.distance_to(x),
        Err(_) => x.norm(),
    }
}
