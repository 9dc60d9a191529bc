//! Cauchy kernel, extended Coulomb potential, holomorphic Green function,
//! and the two numerical probes of the extended source distribution
//! (outward flux through a sphere and the finite-difference Laplacian).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, NeumaierSum};
use crate::spacetime::{
    complex_distance, complex_distance_xy, distance_to_branch_set, ComplexSpacetimePoint, CVec3,
    SpacetimeDirection, Vec3,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative threshold below which a denominator counts as singular.
pub const DEFAULT_SINGULARITY_EPS: f64 = 1e-12;

/// Step of the normal derivative in [`source_flux`], relative to the sphere radius.
pub const FLUX_GRADIENT_STEP: f64 = 1e-5;

/// Tolerance between two quadrature levels before [`FluxEstimate::converged`] is cleared.
pub const FLUX_REFINEMENT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    /// Singularity threshold, multiplied by `max(1, |𝐲|)`.
    pub singularity_eps: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            singularity_eps: DEFAULT_SINGULARITY_EPS,
        }
    }
}

impl KernelConfig {
    fn threshold(&self, a: f64) -> f64 {
        self.singularity_eps * a.max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Ok,
    OutsideDomain,
}

/// Kernel evaluation with an explicit validity tag, for samplers that mask
/// rather than abort.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    pub validity: Validity,
}

impl KernelValue {
    pub fn ok(value: Complex64) -> Self {
        Self {
            value,
            validity: Validity::Ok,
        }
    }

    pub fn outside() -> Self {
        Self {
            value: Complex64::new(f64::NAN, f64::NAN),
            validity: Validity::OutsideDomain,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.validity == Validity::Ok
    }
}

impl From<Result<Complex64>> for KernelValue {
    fn from(r: Result<Complex64>) -> Self {
        match r {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => Self::ok(v),
            _ => Self::outside(),
        }
    }
}

/// Positive-frequency part of δ(t) continued to the lower half plane: 1/(2πiτ).
pub fn cauchy_kernel(tau: Complex64) -> Result<Complex64> {
    if !(tau.im < 0.0) {
        return Err(Error::Domain(format!(
            "Cauchy kernel needs Im(tau) < 0, got {}",
            tau.im
        )));
    }
    Ok(1.0 / (2.0 * PI * I * tau))
}

fn spatial_radius(z: &CVec3) -> f64 {
    z.map(|c| c.im).norm()
}

/// φ̃(𝐳) = −1/(4π r̃(𝐳)).
pub fn extended_coulomb(z: &CVec3, cfg: &KernelConfig) -> Result<Complex64> {
    let r = complex_distance(z);
    let eps = cfg.threshold(spatial_radius(z));
    if r.norm() < eps {
        return Err(Error::Singularity {
            what: "complex distance",
            magnitude: r.norm(),
            epsilon: eps,
        });
    }
    Ok(-1.0 / (4.0 * PI * r))
}

fn coulomb_xy(x: &Vec3, y: &Vec3) -> Complex64 {
    -1.0 / (4.0 * PI * complex_distance_xy(x, y))
}

/// G̃(𝐳, τ) = 1/(8iπ² r̃ (τ − r̃)).
///
/// Requires `s + Im r̃ > 0` with s = −Im τ; every point of the past tube
/// satisfies it.
pub fn holomorphic_green(z: &ComplexSpacetimePoint, cfg: &KernelConfig) -> Result<Complex64> {
    let r = complex_distance(&z.z);
    let s = -z.tau.im;
    if !(s + r.im > 0.0) {
        return Err(Error::Domain(format!(
            "s + Im r~ = {} must be positive",
            s + r.im
        )));
    }
    let eps = cfg.threshold(spatial_radius(&z.z));
    let lag = z.tau - r;
    if r.norm() < eps {
        return Err(Error::Singularity {
            what: "complex distance",
            magnitude: r.norm(),
            epsilon: eps,
        });
    }
    if lag.norm() < eps {
        return Err(Error::Singularity {
            what: "tau - r~",
            magnitude: lag.norm(),
            epsilon: eps,
        });
    }
    Ok(1.0 / (8.0 * I * PI * PI * r * lag))
}

/// Outward flux of ∇φ̃ through a sphere, at two quadrature levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxEstimate {
    /// Flux at the finer level.
    pub value: Complex64,
    /// Flux at the requested level.
    pub coarse: Complex64,
    /// Levels agree to [`FLUX_REFINEMENT_TOL`].
    pub converged: bool,
}

/// Flux of ∇φ̃(· − i𝐲) out of the sphere of radius `radius` centered on the
/// origin. The quadrature is Gauss–Legendre in cos θ (`n_quadrature` nodes)
/// times the trapezoid rule in φ (`2·n_quadrature` nodes), and is repeated at
/// twice the resolution; the normal derivative is a central difference.
pub fn source_flux(
    y: &SpacetimeDirection,
    radius: f64,
    n_quadrature: usize,
) -> Result<FluxEstimate> {
    let a = y.radius();
    let h = FLUX_GRADIENT_STEP * radius;
    if !(radius - h > a) {
        return Err(Error::Precondition(format!(
            "sphere radius {radius} must exceed disk radius {a}"
        )));
    }
    if n_quadrature < 16 {
        return Err(Error::Precondition(format!(
            "n_quadrature = {n_quadrature} is below 16"
        )));
    }
    let coarse = sphere_flux(&y.y, radius, n_quadrature);
    let value = sphere_flux(&y.y, radius, 2 * n_quadrature);
    Ok(FluxEstimate {
        value,
        coarse,
        converged: (value - coarse).norm() <= FLUX_REFINEMENT_TOL,
    })
}

fn sphere_flux(y: &Vec3, radius: f64, n: usize) -> Complex64 {
    let h = FLUX_GRADIENT_STEP * radius;
    let (nodes, weights) = gauss_legendre(n);
    let n_phi = 2 * n;
    let dphi = 2.0 * PI / n_phi as f64;
    let mut re = NeumaierSum::default();
    let mut im = NeumaierSum::default();
    for (&ct, &w) in nodes.iter().zip(&weights) {
        let st = (1.0 - ct * ct).max(0.0).sqrt();
        for k in 0..n_phi {
            let phi = k as f64 * dphi;
            let normal = Vec3::new(st * phi.cos(), st * phi.sin(), ct);
            let outer = coulomb_xy(&(normal * (radius + h)), y);
            let inner = coulomb_xy(&(normal * (radius - h)), y);
            let dn = (outer - inner) / (2.0 * h);
            let term = dn * (w * dphi * radius * radius);
            re.add(term.re);
            im.add(term.im);
        }
    }
    Complex64::new(re.total(), im.total())
}

/// Seven-point central-difference Laplacian of φ̃(· − i𝐲) at 𝐱.
///
/// The stencil must stay clear of the branch disk: `𝐱` has to be farther
/// than `10·h` from it.
pub fn laplacian_residual(x: &Vec3, y: &Vec3, h: f64) -> Result<Complex64> {
    if !(h > 0.0) {
        return Err(Error::Precondition(format!("step h = {h} must be positive")));
    }
    let d = distance_to_branch_set(x, y);
    if !(d > 10.0 * h) {
        return Err(Error::Precondition(format!(
            "point is {d} from the branch disk, needs more than {}",
            10.0 * h
        )));
    }
    let center = coulomb_xy(x, y);
    let mut sum = Complex64::new(0.0, 0.0);
    for axis in 0..3 {
        let mut step = Vec3::zeros();
        step[axis] = h;
        sum += coulomb_xy(&(x + step), y) + coulomb_xy(&(x - step), y);
    }
    Ok((sum - 6.0 * center) / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::RealSpacetimePoint;
    use approx::assert_relative_eq;

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() <= tol * b.norm().max(f64::MIN_POSITIVE),
            "{a} vs {b}"
        );
    }

    #[test]
    fn cauchy_kernel_values() {
        let v = cauchy_kernel(Complex64::new(0.0, -1.0)).unwrap();
        assert_close(v, Complex64::new(1.0 / (2.0 * PI), 0.0), 1e-15);
        let v = cauchy_kernel(Complex64::new(1.0, -1.0)).unwrap();
        assert_close(v, Complex64::new(1.0, -1.0) / (4.0 * PI), 1e-15);
        assert!(matches!(
            cauchy_kernel(Complex64::new(1.0, 1.0)),
            Err(Error::Domain(_))
        ));
        assert!(cauchy_kernel(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn cauchy_kernel_scaling() {
        let tau = Complex64::new(0.7, -1.3);
        for lambda in [0.5, 2.0, 1e3] {
            let lhs = cauchy_kernel(tau * lambda).unwrap();
            let rhs = cauchy_kernel(tau).unwrap() / lambda;
            assert_close(lhs, rhs, 4.0 * f64::EPSILON);
        }
    }

    fn cvec(x: Vec3, y: Vec3) -> CVec3 {
        CVec3::new(
            Complex64::new(x[0], -y[0]),
            Complex64::new(x[1], -y[1]),
            Complex64::new(x[2], -y[2]),
        )
    }

    #[test]
    fn coulomb_values() {
        let cfg = KernelConfig::default();
        let real = extended_coulomb(&cvec(Vec3::new(0.0, 0.0, 1.0), Vec3::zeros()), &cfg).unwrap();
        assert_close(real, Complex64::new(-1.0 / (4.0 * PI), 0.0), 1e-15);
        let ext = extended_coulomb(
            &cvec(Vec3::new(0.0, 0.0, 2.0), Vec3::new(0.0, 0.0, 1.0)),
            &cfg,
        )
        .unwrap();
        assert_close(ext, -Complex64::new(2.0, 1.0) / (20.0 * PI), 1e-15);

        let rim = extended_coulomb(
            &cvec(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0)),
            &cfg,
        );
        assert!(matches!(rim, Err(Error::Singularity { .. })));
    }

    #[test]
    fn green_worked_example() {
        let z = ComplexSpacetimePoint::past(
            &RealSpacetimePoint::new(Vec3::new(0.0, 0.0, 2.0), 2.0),
            &SpacetimeDirection::along_z(0.5, 1.0),
        );
        let g = holomorphic_green(&z, &KernelConfig::default()).unwrap();
        let expected = Complex64::new(4.0, 1.0) / (34.0 * PI * PI);
        assert_close(g, expected, 1e-14);
        assert_relative_eq!(g.re, 0.011_920_2, epsilon = 1e-7);
        assert_relative_eq!(g.im, 0.002_980_04, epsilon = 1e-8);
    }

    #[test]
    fn green_rejects_real_points_and_future_tube() {
        let cfg = KernelConfig::default();
        let x = RealSpacetimePoint::new(Vec3::new(1.0, 2.0, 0.0), 3.0);
        let zero = ComplexSpacetimePoint::past(&x, &SpacetimeDirection::new(Vec3::zeros(), 0.0));
        assert!(matches!(holomorphic_green(&zero, &cfg), Err(Error::Domain(_))));
        let fut = ComplexSpacetimePoint::from_parts(
            &x,
            &SpacetimeDirection::along_z(0.5, 1.0),
            crate::spacetime::ImagSign::Plus,
        );
        assert!(matches!(holomorphic_green(&fut, &cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn green_pole_on_light_cone_of_axis() {
        // on axis τ − r̃ = (t − r) − i(s − a), so s → a at t = r hits the pole
        let cfg = KernelConfig::default();
        let z = ComplexSpacetimePoint {
            z: cvec(Vec3::new(0.0, 0.0, 3.0), Vec3::new(0.0, 0.0, 1.0)),
            tau: Complex64::new(3.0, -1.0 - 1e-14),
        };
        assert!(matches!(
            holomorphic_green(&z, &cfg),
            Err(Error::Singularity { what: "tau - r~", .. })
        ));
    }

    #[test]
    fn conjugation_reflection() {
        let cfg = KernelConfig::default();
        let x = Vec3::new(0.4, -1.2, 2.5);
        let y = Vec3::new(0.3, 0.1, -0.6);
        let r = complex_distance_xy(&x, &y);
        let r_conj = complex_distance_xy(&x, &-y);
        assert_eq!(r_conj, r.conj());
        // G̃ at conjugated spatial argument and conjugated τ: conj(1/(8iπ² r̃(τ−r̃))) = −G̃(z̄)
        let z = ComplexSpacetimePoint {
            z: cvec(x, y),
            tau: Complex64::new(1.7, -1.0),
        };
        let g = holomorphic_green(&z, &cfg).unwrap();
        let zbar_raw = 1.0 / (8.0 * I * PI * PI * r_conj * (z.tau.conj() - r_conj));
        assert_close(zbar_raw, -g.conj(), 1e-14);
    }

    #[test]
    fn kernel_value_masks_errors() {
        let v: KernelValue = Err(Error::DegenerateDisk).into();
        assert!(!v.is_ok());
        assert!(v.value.re.is_nan());
        let v: KernelValue = Ok(Complex64::new(1.0, 2.0)).into();
        assert!(v.is_ok());
    }

    #[test]
    fn flux_of_point_source() {
        let y = SpacetimeDirection::along_z(1e-6, 1.0);
        let f = source_flux(&y, 1.0, 16).unwrap();
        assert!(f.converged);
        assert_close(f.value, Complex64::new(1.0, 0.0), 1e-3);
    }

    #[test]
    fn flux_preconditions() {
        let y = SpacetimeDirection::along_z(1.0, 2.0);
        assert!(matches!(source_flux(&y, 0.9, 16), Err(Error::Precondition(_))));
        assert!(matches!(source_flux(&y, 2.0, 8), Err(Error::Precondition(_))));
    }

    #[test]
    fn laplacian_of_real_coulomb_converges_quadratically() {
        let x = Vec3::new(1.0, 0.0, 0.0);
        let y = Vec3::zeros();
        let r1 = laplacian_residual(&x, &y, 1e-2).unwrap().norm();
        let r2 = laplacian_residual(&x, &y, 5e-3).unwrap().norm();
        let ratio = r1 / r2;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn laplacian_off_axis_point_is_small() {
        let x = Vec3::new(0.0, 0.0, 3.0);
        let y = Vec3::new(0.0, 0.0, 1.0);
        let h = 1e-3;
        let res = laplacian_residual(&x, &y, h).unwrap();
        let phi = coulomb_xy(&x, &y);
        assert!(res.norm() < 1e-6 * phi.norm() / (h * h), "{res}");
    }

    #[test]
    fn laplacian_rejects_points_near_disk() {
        let y = Vec3::new(0.0, 0.0, 1.0);
        assert!(matches!(
            laplacian_residual(&Vec3::new(0.5, 0.0, 0.0), &y, 1e-3),
            Err(Error::Precondition(_))
        ));
        assert!(laplacian_residual(&Vec3::new(0.5, 0.0, 0.005), &y, 1e-3).is_err());
    }
}
