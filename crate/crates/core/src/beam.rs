//! Emitting and receiving dishes, their coupling through the holomorphic
//! Green function, the far-zone pulse model and the optimal orientation.
//!
//! An emitter is the future-tube point z_e = x_e + iy_e and a receiver the
//! past-tube point z_r = x_r − iy_r. The coupling is G̃(z_r − z_e), which only
//! depends on x_r − x_e and y_r + y_e.
//!
//! Sign convention for receivers: 𝐲_r points *into* the receiver, i.e. toward
//! the source it listens to. A receiver at 𝐱_r facing an emitter at 𝐱_e
//! therefore has 𝐲_r parallel to 𝐱_r − 𝐱_e, not antiparallel.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{holomorphic_green, KernelConfig};
use crate::spacetime::{
    in_future_cone, ComplexSpacetimePoint, ImagSign, RealSpacetimePoint, SpacetimeDirection, Vec3,
};

/// Center and spacetime extension shared by emitters and receivers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DishParts", into = "DishParts")]
pub struct Dish {
    center: RealSpacetimePoint,
    extension: SpacetimeDirection,
}

#[derive(Serialize, Deserialize)]
struct DishParts {
    center: RealSpacetimePoint,
    extension: SpacetimeDirection,
}

impl TryFrom<DishParts> for Dish {
    type Error = Error;

    fn try_from(p: DishParts) -> Result<Self> {
        Dish::new(p.center, p.extension)
    }
}

impl From<Dish> for DishParts {
    fn from(d: Dish) -> Self {
        Self {
            center: d.center,
            extension: d.extension,
        }
    }
}

impl Dish {
    pub fn new(center: RealSpacetimePoint, extension: SpacetimeDirection) -> Result<Self> {
        if !center.is_finite() || !extension.is_finite() {
            return Err(Error::Config("dish parameters must be finite".into()));
        }
        if !in_future_cone(&extension) {
            return Err(Error::ConeViolation {
                a: extension.radius(),
                s: extension.s,
            });
        }
        Ok(Self { center, extension })
    }

    pub fn center(&self) -> &RealSpacetimePoint {
        &self.center
    }

    pub fn extension(&self) -> &SpacetimeDirection {
        &self.extension
    }

    pub fn radius(&self) -> f64 {
        self.extension.radius()
    }

    pub fn duration_parameter(&self) -> f64 {
        self.extension.s
    }
}

/// Emitting dish z_e = x_e + iy_e in the future tube.
pub type EmitterDish = Dish;

/// Receiving dish z_r = x_r − iy_r in the past tube.
pub type ReceiverDish = Dish;

impl Dish {
    /// z_e = x_e + iy_e.
    pub fn emitter_point(&self) -> ComplexSpacetimePoint {
        ComplexSpacetimePoint::from_parts(&self.center, &self.extension, ImagSign::Plus)
    }

    /// z_r = x_r − iy_r.
    pub fn receiver_point(&self) -> ComplexSpacetimePoint {
        ComplexSpacetimePoint::from_parts(&self.center, &self.extension, ImagSign::Minus)
    }
}

/// G̃(x − z_e): the pulsed beam of `emitter` observed at the real point `x`.
pub fn emitted_field(
    emitter: &EmitterDish,
    x: &RealSpacetimePoint,
    cfg: &KernelConfig,
) -> Result<Complex64> {
    let rel = *x - emitter.center;
    holomorphic_green(&ComplexSpacetimePoint::past(&rel, &emitter.extension), cfg)
}

/// G̃(z_r − z_e) = G̃(x_r − x_e − i(y_r + y_e)).
pub fn coupling(
    emitter: &EmitterDish,
    receiver: &ReceiverDish,
    cfg: &KernelConfig,
) -> Result<Complex64> {
    let rel = receiver.center - emitter.center;
    let ext = receiver.extension + emitter.extension;
    holomorphic_green(&ComplexSpacetimePoint::past(&rel, &ext), cfg)
}

/// T(θ) = s − a cos θ.
pub fn duration(theta: f64, a: f64, s: f64) -> Result<f64> {
    if !(a >= 0.0 && a < s) {
        return Err(Error::ConeViolation { a, s });
    }
    Ok(s - a * theta.cos())
}

/// Scalars of an emitter/receiver pair (or of an emitter and a real point).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamGeometry {
    /// |𝐱_r − 𝐱_e|
    pub r: f64,
    /// t_r − t_e
    pub t: f64,
    /// |𝐲_r + 𝐲_e|
    pub a: f64,
    /// s_r + s_e
    pub s: f64,
    /// Angle between 𝐱_r − 𝐱_e and 𝐲_r + 𝐲_e; 0 when either vanishes.
    pub theta: f64,
}

impl BeamGeometry {
    fn from_parts(rel: &RealSpacetimePoint, ext: &SpacetimeDirection) -> Self {
        let r = rel.x.norm();
        let a = ext.radius();
        let theta = if r == 0.0 || a == 0.0 {
            0.0
        } else {
            rel.x.cross(&ext.y).norm().atan2(rel.x.dot(&ext.y))
        };
        Self {
            r,
            t: rel.t,
            a,
            s: ext.s,
            theta,
        }
    }

    /// Geometry of the pulse from `emitter` as seen at the real point `x`.
    pub fn emission(emitter: &EmitterDish, x: &RealSpacetimePoint) -> Self {
        Self::from_parts(&(*x - emitter.center), &emitter.extension)
    }

    pub fn duration(&self) -> Result<f64> {
        duration(self.theta, self.a, self.s)
    }
}

/// Combined (r, t, a, s, θ) of an emitter and a receiver.
pub fn combined_geometry(emitter: &EmitterDish, receiver: &ReceiverDish) -> BeamGeometry {
    BeamGeometry::from_parts(
        &(receiver.center - emitter.center),
        &(receiver.extension + emitter.extension),
    )
}

/// Far-zone pulse (1/(8iπ² r)) · 1/(t − r − iT(θ)), valid for r ≫ a.
pub fn far_zone_field(g: &BeamGeometry) -> Result<Complex64> {
    if !(g.r > 0.0) {
        return Err(Error::Precondition(format!(
            "far-zone field needs r > 0, got {}",
            g.r
        )));
    }
    let t_dur = g.duration()?;
    let i = Complex64::i();
    Ok(1.0 / (8.0 * i * PI * PI * g.r) / Complex64::new(g.t - g.r, -t_dur))
}

/// Peak coupling 1/(8π² r (s − a)) of synchronized, aligned dishes.
pub fn peak_coupling(r: f64, a: f64, s: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Precondition(format!("peak coupling needs r > 0, got {r}")));
    }
    if !(a >= 0.0 && a < s) {
        return Err(Error::ConeViolation { a, s });
    }
    Ok(1.0 / (8.0 * PI * PI * r * (s - a)))
}

/// Orientation and timing that maximize the far-zone coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    pub emitter: SpacetimeDirection,
    pub receiver: SpacetimeDirection,
    /// Synchronized delay t_r − t_e = r.
    pub delay: f64,
}

impl Alignment {
    /// Dishes realizing this alignment, with the emitter firing at `t_e`.
    pub fn dishes(&self, x_e: &Vec3, x_r: &Vec3, t_e: f64) -> Result<(EmitterDish, ReceiverDish)> {
        Ok((
            Dish::new(RealSpacetimePoint::new(*x_e, t_e), self.emitter)?,
            Dish::new(RealSpacetimePoint::new(*x_r, t_e + self.delay), self.receiver)?,
        ))
    }
}

/// Points both dishes along û = (𝐱_r − 𝐱_e)/r and synchronizes them at t = r.
pub fn optimal_alignment(
    x_e: &Vec3,
    x_r: &Vec3,
    a_e: f64,
    a_r: f64,
    s_e: f64,
    s_r: f64,
) -> Result<Alignment> {
    let sep = x_r - x_e;
    let r = sep.norm();
    if r == 0.0 {
        return Err(Error::CoincidentCenters);
    }
    for (a, s) in [(a_e, s_e), (a_r, s_r)] {
        if !(a >= 0.0 && a < s) {
            return Err(Error::ConeViolation { a, s });
        }
    }
    let u = sep / r;
    Ok(Alignment {
        emitter: SpacetimeDirection::new(u * a_e, s_e),
        receiver: SpacetimeDirection::new(u * a_r, s_r),
        delay: r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dish(x: [f64; 3], t: f64, y: [f64; 3], s: f64) -> Dish {
        Dish::new(
            RealSpacetimePoint::new(Vec3::from(x), t),
            SpacetimeDirection::new(Vec3::from(y), s),
        )
        .unwrap()
    }

    fn rel_err(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn dish_requires_cone() {
        let err = Dish::new(
            RealSpacetimePoint::origin(),
            SpacetimeDirection::along_z(1.0, 1.0),
        );
        assert!(matches!(err, Err(Error::ConeViolation { .. })));
    }

    #[test]
    fn emitter_and_receiver_tubes() {
        use crate::spacetime::{in_future_tube, in_past_tube};
        let d = dish([1.0, 2.0, 3.0], 0.5, [0.0, 0.3, 0.0], 1.0);
        assert!(in_future_tube(&d.emitter_point()));
        assert!(in_past_tube(&d.receiver_point()));
    }

    #[test]
    fn emitted_field_at_origin_matches_green() {
        let cfg = KernelConfig::default();
        let e = dish([0.0; 3], 0.0, [0.0, 0.0, 0.5], 1.0);
        let x = RealSpacetimePoint::new(Vec3::new(0.0, 0.0, 2.0), 2.0);
        let g = emitted_field(&e, &x, &cfg).unwrap();
        assert!(rel_err(g, Complex64::new(4.0, 1.0) / (34.0 * PI * PI)) < 1e-14);
    }

    #[test]
    fn emitted_field_translation_invariance() {
        let cfg = KernelConfig::default();
        let e = dish([0.1, -0.2, 0.3], 0.7, [0.2, 0.1, 0.4], 1.3);
        let x = RealSpacetimePoint::new(Vec3::new(2.0, 1.0, 5.0), 6.0);
        let offset = RealSpacetimePoint::new(Vec3::new(-3.0, 8.0, 1.5), 2.25);
        let moved = dish(
            (e.center.x + offset.x).into(),
            e.center.t + offset.t,
            e.extension.y.into(),
            e.extension.s,
        );
        let a = emitted_field(&e, &x, &cfg).unwrap();
        let b = emitted_field(&moved, &(x + offset), &cfg).unwrap();
        assert!(rel_err(b, a) < 1e-12);
    }

    #[test]
    fn delayed_emitter_peaks_late() {
        let cfg = KernelConfig::default();
        let e = dish([0.0; 3], 5.0, [0.0, 0.0, 0.5], 1.0);
        let dt = 1e-3;
        let (t_peak, _) = (0..20_000)
            .map(|k| 5.0 + k as f64 * dt)
            .map(|t| {
                let x = RealSpacetimePoint::new(Vec3::new(0.0, 0.0, 10.0), t);
                (t, emitted_field(&e, &x, &cfg).unwrap().norm())
            })
            .fold((0.0, 0.0), |best, p| if p.1 > best.1 { p } else { best });
        assert!((t_peak - 15.0).abs() <= dt, "{t_peak}");
    }

    #[test]
    fn duration_values() {
        assert_eq!(duration(0.0, 1.0, 2.0).unwrap(), 1.0);
        assert_eq!(duration(PI, 1.0, 2.0).unwrap(), 3.0);
        assert_relative_eq!(duration(PI / 2.0, 0.9, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(matches!(duration(0.0, 1.0, 1.0), Err(Error::ConeViolation { .. })));
    }

    #[test]
    fn duration_increases_with_angle() {
        let (a, s) = (0.8, 1.0);
        let mut prev = duration(0.0, a, s).unwrap();
        assert_relative_eq!(prev, s - a);
        for k in 1..=1000 {
            let t = duration(PI * k as f64 / 1000.0, a, s).unwrap();
            assert!(t > prev);
            prev = t;
        }
        assert_relative_eq!(prev, s + a);
    }

    #[test]
    fn far_zone_on_axis_peak() {
        let g = BeamGeometry {
            r: 10.0,
            t: 10.0,
            a: 1.0,
            s: 2.0,
            theta: 0.0,
        };
        let f = far_zone_field(&g).unwrap();
        assert_relative_eq!(f.re, 1.0 / (80.0 * PI * PI), max_relative = 1e-15);
        assert_eq!(f.im, 0.0);
        assert_relative_eq!(f.re, 1.266_51e-3, max_relative = 1e-5);
        assert!(far_zone_field(&BeamGeometry { r: 0.0, ..g }).is_err());
    }

    #[test]
    fn combined_geometry_cases() {
        let e = dish([0.0; 3], 0.0, [0.0, 0.0, 1.0], 2.0);
        let r = dish([0.0, 0.0, 10.0], 10.0, [0.0, 0.0, 0.5], 1.0);
        let g = combined_geometry(&e, &r);
        assert_eq!((g.r, g.t, g.a, g.s, g.theta), (10.0, 10.0, 1.5, 3.0, 0.0));

        let r = dish([0.0, 0.0, 10.0], 10.0, [0.0, 0.0, -1.0], 1.5);
        let g = combined_geometry(&e, &r);
        assert_eq!(g.a, 0.0);
        assert_eq!(g.theta, 0.0);

        let r = dish([10.0, 0.0, 0.0], 0.0, [0.0, 0.0, 0.5], 1.0);
        assert_relative_eq!(combined_geometry(&e, &r).theta, PI / 2.0);
    }

    #[test]
    fn coupling_is_symmetric_in_extensions() {
        let cfg = KernelConfig::default();
        let e = dish([0.0; 3], 0.0, [0.1, 0.2, 0.6], 1.0);
        let r = dish([1.0, -2.0, 8.0], 9.0, [0.0, 0.3, 0.2], 0.7);
        let swapped_e = dish([0.0; 3], 0.0, [0.0, 0.3, 0.2], 0.7);
        let swapped_r = dish([1.0, -2.0, 8.0], 9.0, [0.1, 0.2, 0.6], 1.0);
        let a = coupling(&e, &r, &cfg).unwrap();
        let b = coupling(&swapped_e, &swapped_r, &cfg).unwrap();
        assert!(rel_err(b, a) < 1e-14);
    }

    #[test]
    fn tiny_receiver_approaches_point_observation() {
        let cfg = KernelConfig::default();
        let e = dish([0.0; 3], 0.0, [0.0, 0.2, 0.5], 1.0);
        let x = RealSpacetimePoint::new(Vec3::new(0.5, 1.0, 6.0), 6.2);
        let r = Dish::new(x, SpacetimeDirection::new(Vec3::new(1e-6, 0.0, 0.0), 1e-5)).unwrap();
        let c = coupling(&e, &r, &cfg).unwrap();
        let f = emitted_field(&e, &x, &cfg).unwrap();
        assert!(rel_err(c, f) < 1e-3);
    }

    #[test]
    fn peak_coupling_values() {
        assert_relative_eq!(
            peak_coupling(10.0, 1.0, 2.0).unwrap(),
            1.0 / (80.0 * PI * PI),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            peak_coupling(1.0, 0.0, 1.0).unwrap(),
            1.0 / (8.0 * PI * PI),
            max_relative = 1e-15
        );
        assert!(matches!(
            peak_coupling(1.0, 2.0, 2.0),
            Err(Error::ConeViolation { .. })
        ));
    }

    #[test]
    fn alignment_along_axis() {
        let al = optimal_alignment(
            &Vec3::zeros(),
            &Vec3::new(0.0, 0.0, 10.0),
            1.0,
            1.0,
            2.0,
            2.0,
        )
        .unwrap();
        assert_eq!(al.emitter.y, Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(al.receiver.y, Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(al.delay, 10.0);
        assert!(matches!(
            optimal_alignment(&Vec3::zeros(), &Vec3::zeros(), 1.0, 1.0, 2.0, 2.0),
            Err(Error::CoincidentCenters)
        ));
    }

    #[test]
    fn aligned_beats_anti_aligned() {
        let cfg = KernelConfig::default();
        let xe = Vec3::new(1.0, 2.0, 3.0);
        let xr = Vec3::new(-20.0, 50.0, 90.0);
        let al = optimal_alignment(&xe, &xr, 0.5, 0.7, 1.0, 1.2).unwrap();
        let (e, r) = al.dishes(&xe, &xr, 0.0).unwrap();
        let best = coupling(&e, &r, &cfg).unwrap().norm();
        let ext = r.extension();
        let flipped = Dish::new(*r.center(), SpacetimeDirection::new(-ext.y, ext.s)).unwrap();
        let worse = coupling(&e, &flipped, &cfg).unwrap().norm();
        assert!(worse < best);
    }
}
