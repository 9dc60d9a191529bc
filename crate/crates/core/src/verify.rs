//! Invariant suites behind `holobeam verify`.
//!
//! Each suite draws from its own ChaCha stream derived from the run seed, so
//! suites can run concurrently and still reproduce exactly.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Rotation3, Unit};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::beam::{
    coupling, duration, emitted_field, far_zone_field, optimal_alignment, peak_coupling,
    BeamGeometry, Dish,
};
use crate::directivity::{convexity_gap, directivity, directivity_from, CONVEXITY_FLOOR};
use crate::grid::{
    sample_grid, FieldKind, GridSpec, OutputSpec, ScenarioConfig, SliceMode, DEFAULT_BUDGET,
};
use crate::io::{read_binary, read_csv, write_binary, write_csv};
use crate::kernels::{
    cauchy_kernel, holomorphic_green, laplacian_residual, source_flux, KernelConfig,
};
use crate::spacetime::{
    complex_distance_xy, distance_to_branch_set, ComplexSpacetimePoint, RealSpacetimePoint,
    SpacetimeDirection, Vec3,
};

pub const DEFAULT_SEED: u64 = 42;

pub const SUITES: &[&str] = &[
    "branch",
    "on_axis",
    "kernels",
    "harmonicity",
    "flux",
    "causality",
    "far_zone",
    "coupling",
    "alignment",
    "convexity",
    "infrastructure",
];

#[derive(Debug, Clone)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, label: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            label: label.to_string(),
            passed,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<15} {:<42} {:<4}  {}",
                self.name,
                c.label,
                if c.passed { "PASS" } else { "FAIL" },
                c.detail
            )?;
        }
        Ok(())
    }
}

/// Process exit status for a verification run: 0 when every check passed, 2 otherwise.
pub fn exit_code(reports: &[SuiteReport]) -> u8 {
    if reports.iter().all(SuiteReport::passed) {
        0
    } else {
        2
    }
}

/// Runs the suites whose names are listed (all of them for `None`).
pub fn run(seed: u64, only: Option<&str>) -> Option<Vec<SuiteReport>> {
    let names: Vec<(usize, &'static str)> = SUITES
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, n)| only.is_none_or(|o| o == *n))
        .collect();
    if names.is_empty() {
        return None;
    }
    Some(
        names
            .into_par_iter()
            .map(|(k, name)| run_suite(name, suite_seed(seed, k)).expect("known suite"))
            .collect(),
    )
}

fn suite_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn run_suite(name: &str, seed: u64) -> Option<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Some(match name {
        "branch" => branch(&mut rng),
        "on_axis" => on_axis(&mut rng),
        "kernels" => kernels(&mut rng),
        "harmonicity" => harmonicity(&mut rng),
        "flux" => flux(),
        "causality" => causality(),
        "far_zone" => far_zone(),
        "coupling" => coupling_suite(&mut rng),
        "alignment" => alignment(&mut rng),
        "convexity" => convexity(&mut rng),
        "infrastructure" => infrastructure(),
        _ => return None,
    })
}

// ---------------------------------------------------------------- sampling

pub fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(rho * phi.cos(), rho * phi.sin(), z)
}

/// Random (x, y) with |x| log-uniform over [1e-3, 10] and |y| in [0, 3].
pub fn random_pair<R: Rng>(rng: &mut R) -> (Vec3, Vec3) {
    let r = 10f64.powf(rng.gen_range(-3.0..1.0));
    let a = rng.gen_range(0.0..3.0);
    (random_unit(rng) * r, random_unit(rng) * a)
}

/// Random point of the future cone, with ratios |𝐲|/s crowding toward 1.
pub fn random_cone_point<R: Rng>(rng: &mut R) -> SpacetimeDirection {
    let s = rng.gen_range(1e-3..5.0);
    let v: f64 = rng.gen();
    let ratio = 1.0 - v * v * v;
    let a = (ratio * s).min(s * (1.0 - 1e-12));
    SpacetimeDirection::new(random_unit(rng) * a, s)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

// ---------------------------------------------------------------- measurement helpers

/// Location of the maximum of `f` on `t0 + k·dt`, k < n. Ties keep the first.
pub fn argmax_on_grid(t0: f64, dt: f64, n: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    (0..n)
        .map(|k| t0 + k as f64 * dt)
        .map(|t| (t, f(t)))
        .fold((f64::NAN, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b })
}

/// Full width at half maximum of samples `ys` on a uniform grid of step `dt`,
/// with linear interpolation of both half-crossings.
pub fn fwhm(ys: &[f64], dt: f64) -> Option<f64> {
    let (imax, &ymax) = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    let half = ymax / 2.0;
    let left = (1..=imax).rev().find(|&i| ys[i - 1] < half)?;
    let right = (imax..ys.len() - 1).find(|&i| ys[i + 1] < half)?;
    let lx = (left - 1) as f64 + (half - ys[left - 1]) / (ys[left] - ys[left - 1]);
    let rx = right as f64 + (ys[right] - half) / (ys[right] - ys[right + 1]);
    Some((rx - lx) * dt)
}

/// Least-squares slope of log y against log x.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Vertices of the icosphere obtained by `level` midpoint subdivisions of the
/// icosahedron (12, 42, 162, 642, 2562, … vertices).
pub fn icosphere(level: u32) -> Vec<Vec3> {
    use std::collections::HashMap;
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        (-1.0, p, 0.0),
        (1.0, p, 0.0),
        (-1.0, -p, 0.0),
        (1.0, -p, 0.0),
        (0.0, -1.0, p),
        (0.0, 1.0, p),
        (0.0, -1.0, -p),
        (0.0, 1.0, -p),
        (p, 0.0, -1.0),
        (p, 0.0, 1.0),
        (-p, 0.0, -1.0),
        (-p, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |i: usize, j: usize, verts: &mut Vec<Vec3>| -> usize {
            let key = (i.min(j), i.max(j));
            *cache.entry(key).or_insert_with(|| {
                verts.push(((verts[i] + verts[j]) * 0.5).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    verts
}

/// Rotates `dirs` rigidly so that `dirs[0]` lands on `target`.
pub fn rotate_first_onto(dirs: &[Vec3], target: &Vec3) -> Vec<Vec3> {
    let rot = Rotation3::rotation_between(&dirs[0], target).unwrap_or_else(|| {
        // antiparallel: half turn about any axis orthogonal to dirs[0]
        let axis = dirs[0].cross(&Vec3::x()).try_normalize(1e-6).unwrap_or(Vec3::y());
        Rotation3::from_axis_angle(&Unit::new_normalize(axis), PI)
    });
    dirs.iter().map(|d| rot * d).collect()
}

// ---------------------------------------------------------------- suites

fn branch(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut rep = SuiteReport::new("branch");
    let n = 1_000_000;
    let (mut min_re, mut max_sq, mut max_contr) = (f64::INFINITY, 0.0f64, f64::NEG_INFINITY);
    let mut conj_ok = true;
    for _ in 0..n {
        let (x, y) = random_pair(rng);
        let rt = complex_distance_xy(&x, &y);
        let w = Complex64::new(x.norm_squared() - y.norm_squared(), -2.0 * x.dot(&y));
        min_re = min_re.min(rt.re / x.norm().max(y.norm()));
        max_sq = max_sq.max((rt * rt - w).norm() / w.norm());
        let slack = 1e-12 * y.norm() + 4.0 * f64::EPSILON * x.norm();
        max_contr = max_contr.max((rt - x.norm()).norm() - y.norm() - slack);
        conj_ok &= complex_distance_xy(&x, &-y) == rt.conj();
    }
    rep.check("Re r~ > 0 (1e6 samples)", min_re > 0.0, format!("min Re r~/scale = {min_re:.3e}"));
    rep.check("r~^2 = z.z", max_sq <= 1e-12, format!("max rel = {max_sq:.2e}"));
    rep.check("|r~ - r| <= |y|", max_contr <= 0.0, format!("max excess = {max_contr:.2e}"));
    rep.check("conjugation symmetry", conj_ok, "exact".into());

    let (mut max_rot, mut max_cont) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let (x, y) = random_pair(rng);
        let a = y.norm();
        let d = distance_to_branch_set(&x, &y);
        if d < 1e-2 * a.max(1e-3) {
            continue;
        }
        let axis = Unit::new_normalize(random_unit(rng));
        let rot = Rotation3::from_axis_angle(&axis, rng.gen_range(0.0..2.0 * PI));
        let base = complex_distance_xy(&x, &y);
        max_rot = max_rot.max(rel(complex_distance_xy(&(rot * x), &(rot * y)), base));

        let h = random_unit(rng) * 1e-6 * a.max(1e-3);
        let moved = complex_distance_xy(&(x + h), &y);
        let bound = 10.0 * (a / d).max(1.0) * h.norm();
        max_cont = max_cont.max((moved - base).norm() / bound);
    }
    rep.check("rotation equivariance", max_rot <= 1e-10, format!("max rel = {max_rot:.2e}"));
    rep.check(
        "continuity off the disk",
        max_cont <= 1.0,
        format!("max |dr~|/bound = {max_cont:.3}"),
    );
    rep
}

fn on_axis(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut rep = SuiteReport::new("on_axis");
    let (mut front, mut back) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let u = random_unit(rng);
        let a = 10f64.powf(rng.gen_range(-3.0..1.0));
        let r = a * (1.0 + 10f64.powf(rng.gen_range(-2.0..3.0)));
        let x = u * r;
        let r_exact = x.norm();
        front = front.max(rel(complex_distance_xy(&x, &(u * a)), Complex64::new(r_exact, -a)));
        back = back.max(rel(complex_distance_xy(&x, &(-u * a)), Complex64::new(r_exact, a)));
    }
    rep.check("theta = 0: r~ = r - ia", front <= 1e-14, format!("max rel = {front:.2e}"));
    rep.check("theta = pi: r~ = r + ia", back <= 1e-14, format!("max rel = {back:.2e}"));
    rep
}

fn kernels(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut rep = SuiteReport::new("kernels");
    let cfg = KernelConfig::default();

    let mut scale_err = 0.0f64;
    for _ in 0..1000 {
        let tau = Complex64::new(rng.gen_range(-5.0..5.0), -rng.gen_range(1e-3..5.0));
        let lambda = 10f64.powf(rng.gen_range(-3.0..3.0));
        let lhs = cauchy_kernel(tau * lambda).unwrap();
        let rhs = cauchy_kernel(tau).unwrap() / lambda;
        scale_err = scale_err.max(rel(lhs, rhs));
    }
    rep.check(
        "Cauchy kernel scaling",
        scale_err <= 8.0 * f64::EPSILON,
        format!("max rel = {scale_err:.2e}"),
    );

    // G̃(x − iλy) → 1/(8iπ² r (t − r)) as λ → 0, away from t = r
    let mut monotone = true;
    let mut last_err = f64::NAN;
    for _ in 0..100 {
        let x = random_unit(rng) * rng.gen_range(0.5..5.0);
        let r = x.norm();
        let t = r + rng.gen_range(0.2..2.0) * if rng.gen() { 1.0 } else { -1.0 };
        let y = random_cone_point(rng);
        let limit = 1.0 / (8.0 * Complex64::i() * PI * PI * r * (t - r));
        let errs: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&l| {
                let yl = SpacetimeDirection::new(y.y * l, y.s * l);
                let p = ComplexSpacetimePoint::past(&RealSpacetimePoint::new(x, t), &yl);
                rel(holomorphic_green(&p, &cfg).unwrap(), limit)
            })
            .collect();
        monotone &= errs.windows(2).all(|w| w[1] < w[0]);
        last_err = errs[3];
    }
    rep.check(
        "G~ converges to real-point limit",
        monotone && last_err < 1e-2,
        format!("last rel err = {last_err:.2e}"),
    );

    let mut fz = 0.0f64;
    for _ in 0..200 {
        let a = rng.gen_range(0.1..1.0);
        let s = a + rng.gen_range(0.2..2.0);
        let r = 100.0 * a;
        let e = Dish::new(
            RealSpacetimePoint::origin(),
            SpacetimeDirection::new(random_unit(rng) * a, s),
        )
        .unwrap();
        let x = RealSpacetimePoint::new(random_unit(rng) * r, r + rng.gen_range(-1.0..1.0) * s);
        let exact = emitted_field(&e, &x, &cfg).unwrap();
        let far = far_zone_field(&BeamGeometry::emission(&e, &x)).unwrap();
        fz = fz.max(rel(far, exact) / (a / r));
    }
    rep.check(
        "far zone at r = 100a within 5a/r",
        fz < 5.0,
        format!("max rel err / (a/r) = {fz:.3}"),
    );
    rep
}

/// Aggregate convergence order of the 7-point Laplacian of φ̃ over `points`.
/// Returns the two orders from h = d/20 → d/40 → d/80 (d = distance to the
/// disk) and the median per-point order of the first halving.
pub fn harmonicity_orders(points: &[(Vec3, Vec3)]) -> (f64, f64, f64) {
    let mut norms = [0.0f64; 3];
    let mut per_point = Vec::with_capacity(points.len());
    for (x, y) in points {
        let d = distance_to_branch_set(x, y);
        let res: Vec<f64> = [20.0, 40.0, 80.0]
            .iter()
            .map(|k| {
                let h = d / k;
                laplacian_residual(x, y, h).unwrap().norm() * d * complex_distance_xy(x, y).norm()
            })
            .collect();
        for (n, r) in norms.iter_mut().zip(&res) {
            *n += r * r;
        }
        per_point.push((res[0] / res[1]).log2());
    }
    per_point.sort_by(f64::total_cmp);
    (
        (norms[0] / norms[1]).sqrt().log2(),
        (norms[1] / norms[2]).sqrt().log2(),
        per_point[per_point.len() / 2],
    )
}

fn harmonicity(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut rep = SuiteReport::new("harmonicity");
    let points: Vec<(Vec3, Vec3)> = (0..100)
        .map(|_| loop {
            let y = random_unit(rng) * rng.gen_range(0.2..2.0);
            let x = random_unit(rng) * rng.gen_range(0.0..4.0);
            let d = distance_to_branch_set(&x, &y);
            if d > 0.1 * y.norm() {
                break (x, y);
            }
        })
        .collect();
    let (o1, o2, med) = harmonicity_orders(&points);
    let ok = |o: f64| (1.5..=2.5).contains(&o);
    rep.check(
        "Laplacian order 2 (100 points)",
        ok(o1) && ok(o2),
        format!("orders {o1:.3}, {o2:.3}; median per-point {med:.3}"),
    );
    rep
}

fn flux() -> SuiteReport {
    let mut rep = SuiteReport::new("flux");
    let y = SpacetimeDirection::new(Vec3::new(0.3, 0.0, 0.4), 1.0);
    let near = source_flux(&y, 5.0, 32).unwrap();
    let far = source_flux(&y, 50.0, 32).unwrap();
    rep.check(
        "quadrature converged",
        near.converged && far.converged && (near.value - near.coarse).norm() < 1e-6,
        format!("level diff = {:.2e}", (near.value - near.coarse).norm()),
    );
    rep.check(
        "R independence",
        (near.value - far.value).norm() < 1e-4,
        format!("|F(5) - F(50)| = {:.2e}", (near.value - far.value).norm()),
    );
    let golden = Complex64::new(1.0, 0.0);
    rep.check(
        "total strength = 1",
        (near.value - golden).norm() < 1e-6,
        format!("F = {:.10} {:+.2e}i", near.value.re, near.value.im),
    );
    let point = source_flux(&SpacetimeDirection::along_z(1e-6, 1.0), 1.0, 16).unwrap();
    rep.check(
        "point-source limit",
        (point.value - golden).norm() < 1e-3,
        format!("F = {:.10}", point.value.re),
    );
    rep
}

fn causality() -> SuiteReport {
    let mut rep = SuiteReport::new("causality");
    let cfg = KernelConfig::default();
    let (a, s) = (0.5, 1.0);
    let e = Dish::new(RealSpacetimePoint::origin(), SpacetimeDirection::along_z(a, s)).unwrap();
    let dt = 1e-3;
    for r in [5.0, 10.0, 20.0] {
        let obs = Vec3::new(0.0, 0.0, r);
        let (tp, _) = argmax_on_grid(r - 3.0, dt, 6001, |t| {
            emitted_field(&e, &RealSpacetimePoint::new(obs, t), &cfg).unwrap().norm()
        });
        rep.check(
            &format!("peak at t = r = {r}"),
            (tp - r).abs() <= dt,
            format!("t_peak = {tp:.4}"),
        );
        let off = Vec3::new(r * (PI / 3.0).sin(), 0.0, r * (PI / 3.0).cos());
        let (tp, _) = argmax_on_grid(r - 3.0, dt, 6001, |t| {
            emitted_field(&e, &RealSpacetimePoint::new(off, t), &cfg).unwrap().norm()
        });
        rep.check(
            &format!("off-axis peak near t = {r}"),
            (tp - r).abs() <= dt + a * a / r,
            format!("t_peak = {tp:.4}"),
        );
    }

    let g = |t: f64| BeamGeometry {
        r: 10.0,
        t,
        a,
        s,
        theta: 0.0,
    };
    let dt = 1e-4;
    let ys: Vec<f64> = (0..60_001)
        .map(|k| far_zone_field(&g(7.0 + k as f64 * dt)).unwrap().norm_sqr())
        .collect();
    let width = fwhm(&ys, dt).unwrap_or(f64::NAN);
    let expected = 2.0 * (s - a);
    rep.check(
        "FWHM = 2(s - a)",
        ((width - expected) / expected).abs() <= 0.02,
        format!("FWHM = {width:.5}"),
    );

    let mut prev = duration(0.0, a, s).unwrap();
    let mut increasing = (prev - (s - a)).abs() < 1e-15;
    for k in 1..=1000 {
        let t = duration(PI * k as f64 / 1000.0, a, s).unwrap();
        increasing &= t > prev;
        prev = t;
    }
    increasing &= (prev - (s + a)).abs() < 1e-15;
    rep.check("T(theta) increasing, T(0)=s-a, T(pi)=s+a", increasing, String::new());
    rep
}

/// Relative error of the far-zone pulse against the exact field on the beam
/// axis at t = r.
pub fn far_zone_axis_error(a: f64, s: f64, r: f64) -> f64 {
    let cfg = KernelConfig::default();
    let e = Dish::new(RealSpacetimePoint::origin(), SpacetimeDirection::along_z(a, s)).unwrap();
    let x = RealSpacetimePoint::new(Vec3::new(0.0, 0.0, r), r);
    let exact = emitted_field(&e, &x, &cfg).unwrap();
    let far = far_zone_field(&BeamGeometry::emission(&e, &x)).unwrap();
    rel(far, exact)
}

fn far_zone() -> SuiteReport {
    let mut rep = SuiteReport::new("far_zone");
    let (a, s) = (0.5, 1.0);
    let ratios: Vec<f64> = (0..=12).map(|k| 10f64.powf(1.0 + k as f64 / 6.0)).collect();
    let errs: Vec<f64> = ratios.iter().map(|q| far_zone_axis_error(a, s, q * a)).collect();
    let slope = log_log_slope(&ratios, &errs);
    rep.check(
        "log-log slope -1 over r/a in [10,1000]",
        (slope + 1.0).abs() <= 0.1,
        format!("slope = {slope:.4}"),
    );
    rep
}

fn coupling_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut rep = SuiteReport::new("coupling");
    let cfg = KernelConfig::default();

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (a_e, a_r) = (rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0));
        let (s_e, s_r) = (a_e + rng.gen_range(0.1..1.0), a_r + rng.gen_range(0.1..1.0));
        let a = a_e + a_r;
        let r = 100.0 * a;
        let x_e = random_unit(rng) * rng.gen_range(0.0..10.0);
        let x_r = x_e + random_unit(rng) * r;
        let al = optimal_alignment(&x_e, &x_r, a_e, a_r, s_e, s_r).unwrap();
        let (e, rd) = al.dishes(&x_e, &x_r, rng.gen_range(-5.0..5.0)).unwrap();
        let c = coupling(&e, &rd, &cfg).unwrap().norm();
        let p = peak_coupling(r, a, s_e + s_r).unwrap();
        worst = worst.max(((c - p) / p).abs() / (a / r));
    }
    rep.check(
        "|coupling| = peak value at r = 100a",
        worst < 5.0,
        format!("max rel err / (a/r) = {worst:.2e}"),
    );

    let mut sym = 0.0f64;
    let mut lim = 0.0f64;
    for _ in 0..100 {
        let ye = random_cone_point(rng);
        let yr = random_cone_point(rng);
        let xe = RealSpacetimePoint::new(random_unit(rng), rng.gen_range(-1.0..1.0));
        let xr = RealSpacetimePoint::new(random_unit(rng) * 8.0, rng.gen_range(0.0..10.0));
        let c1 = coupling(&Dish::new(xe, ye).unwrap(), &Dish::new(xr, yr).unwrap(), &cfg);
        let c2 = coupling(&Dish::new(xe, yr).unwrap(), &Dish::new(xr, ye).unwrap(), &cfg);
        if let (Ok(c1), Ok(c2)) = (c1, c2) {
            sym = sym.max(rel(c2, c1));
        }
        let tiny = SpacetimeDirection::new(random_unit(rng) * 1e-6, 1e-5);
        let e = Dish::new(xe, ye).unwrap();
        let c = coupling(&e, &Dish::new(xr, tiny).unwrap(), &cfg).unwrap();
        let f = emitted_field(&e, &xr, &cfg).unwrap();
        lim = lim.max(rel(c, f));
    }
    rep.check("swap symmetry of extensions", sym <= 1e-12, format!("max rel = {sym:.2e}"));
    rep.check("tiny receiver -> point observation", lim < 1e-3, format!("max rel = {lim:.2e}"));
    rep
}

/// Scans emitter × receiver orientations over `dirs` and returns the index
/// pair of the largest |coupling| (ties resolved toward the smaller pair).
pub fn orientation_scan(
    x_e: &Vec3,
    x_r: &Vec3,
    dirs: &[Vec3],
    (a_e, s_e): (f64, f64),
    (a_r, s_r): (f64, f64),
) -> ((usize, usize), f64) {
    let cfg = KernelConfig::default();
    let delay = (x_r - x_e).norm();
    dirs.par_iter()
        .enumerate()
        .map(|(i, de)| {
            let e = Dish::new(
                RealSpacetimePoint::new(*x_e, 0.0),
                SpacetimeDirection::new(de * a_e, s_e),
            )
            .unwrap();
            let mut best = ((i, 0), f64::NEG_INFINITY);
            for (j, dr) in dirs.iter().enumerate() {
                let r = Dish::new(
                    RealSpacetimePoint::new(*x_r, delay),
                    SpacetimeDirection::new(dr * a_r, s_r),
                )
                .unwrap();
                let c = coupling(&e, &r, &cfg).map(|c| c.norm()).unwrap_or(f64::NEG_INFINITY);
                if c > best.1 {
                    best = ((i, j), c);
                }
            }
            best
        })
        .reduce(
            || ((usize::MAX, usize::MAX), f64::NEG_INFINITY),
            |p, q| {
                if q.1 > p.1 || (q.1 == p.1 && q.0 < p.0) {
                    q
                } else {
                    p
                }
            },
        )
}

fn alignment(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut rep = SuiteReport::new("alignment");
    let cfg = KernelConfig::default();
    let sphere = icosphere(3);
    let (a_e, s_e, a_r, s_r) = (1.0, 1.5, 0.8, 1.2);
    let x_e = random_unit(rng) * 3.0;
    let x_r = x_e + random_unit(rng) * 100.0 * (a_e + a_r);
    let u = (x_r - x_e).normalize();
    let dirs = rotate_first_onto(&sphere, &u);
    let (argmax, best) = orientation_scan(&x_e, &x_r, &dirs, (a_e, s_e), (a_r, s_r));
    rep.check(
        &format!("argmax of {}x{} scan is aligned", dirs.len(), dirs.len()),
        argmax == (0, 0),
        format!("argmax = {argmax:?}, |c| = {best:.6e}"),
    );
    let al = optimal_alignment(&x_e, &x_r, a_e, a_r, s_e, s_r).unwrap();
    let (e, r) = al.dishes(&x_e, &x_r, 0.0).unwrap();
    let closed = coupling(&e, &r, &cfg).unwrap().norm();
    rep.check(
        "closed form attains scan maximum",
        (closed - best).abs() <= 1e-12 * best && closed >= best * (1.0 - 1e-12),
        format!("|c| = {closed:.6e}"),
    );
    let anti = Dish::new(*r.center(), SpacetimeDirection::new(-al.receiver.y, s_r)).unwrap();
    let worse = coupling(&e, &anti, &cfg).unwrap().norm();
    rep.check(
        "anti-aligned receiver is weaker",
        worse < closed,
        format!("ratio = {:.4}", worse / closed),
    );
    rep
}

fn convexity(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut rep = SuiteReport::new("convexity");
    let mut min_gap = f64::INFINITY;
    let mut zero_iff = true;
    for k in 0..1_000_000u32 {
        let mut y1 = random_cone_point(rng);
        let y2 = random_cone_point(rng);
        if k % 10 == 0 {
            y1.y = Vec3::zeros();
        }
        min_gap = min_gap.min(convexity_gap(&y1, &y2).unwrap());
        let d = directivity(&y1).unwrap().value();
        zero_iff &= (d == 0.0) == (y1.radius() == 0.0);
    }
    rep.check(
        "gap >= -1e-12 (1e6 pairs)",
        min_gap >= -CONVEXITY_FLOOR,
        format!("min gap = {min_gap:.3e}"),
    );
    rep.check("D = 0 iff a = 0", zero_iff, String::new());

    let (mut homog, mut mono) = (0.0f64, true);
    for _ in 0..10_000 {
        let y = random_cone_point(rng);
        let (a, s) = (y.radius(), y.s);
        let lambda = 10f64.powf(rng.gen_range(-3.0..3.0));
        let d = directivity_from(a, s).unwrap().value();
        let dl = directivity_from(lambda * a, lambda * s).unwrap().value();
        if d > 0.0 {
            homog = homog.max(((dl - d) / d).abs() / (s / (s - a)));
        }
        let a2 = a + (s - a) * 0.5;
        mono &= directivity_from(a2, s).unwrap() > directivity_from(a, s).unwrap();
        if a > 0.0 {
            mono &= directivity_from(a, s * 1.5).unwrap() < directivity_from(a, s).unwrap();
        }
    }
    rep.check(
        "degree-0 homogeneity",
        homog <= 8.0 * f64::EPSILON,
        format!("max rel / cond = {homog:.2e}"),
    );
    rep.check("monotone in a and s", mono, String::new());

    let (mut prop, mut tight, mut schwarz) = (0.0f64, true, f64::NEG_INFINITY);
    for _ in 0..1000 {
        let y = random_cone_point(rng);
        let lambda = rng.gen_range(0.1..10.0);
        let y2 = SpacetimeDirection::new(y.y * lambda, y.s * lambda);
        let d = directivity(&y).unwrap().value();
        let cond = y.s / (y.s - y.radius());
        prop = prop.max((convexity_gap(&y, &y2).unwrap() - d).abs() / d.max(1e-300) / cond);

        let gaps: Vec<f64> = [1e-1, 1e-3, 1e-5]
            .iter()
            .map(|&s1| convexity_gap(&SpacetimeDirection::new(Vec3::zeros(), s1), &y).unwrap())
            .collect();
        tight &= gaps.windows(2).all(|w| w[1] <= w[0]);

        let other = random_cone_point(rng);
        let par = SpacetimeDirection::new(y.y.normalize() * other.radius(), other.s);
        let g_par = convexity_gap(&y, &par).unwrap();
        // absolute rounding scale of D at each of the points entering the gaps
        let spread = |v: &SpacetimeDirection| {
            directivity(v).unwrap().value() * v.s / (v.s - v.radius())
        };
        let slack = 1e-12 * (1.0 + g_par)
            + 64.0
                * f64::EPSILON
                * (spread(&y) + spread(&par) + spread(&other) + spread(&(y + par)) + spread(&(y + other)));
        schwarz = schwarz.max((g_par - convexity_gap(&y, &other).unwrap()) / slack);
    }
    rep.check(
        "proportional pair: gap = D",
        prop <= 64.0 * f64::EPSILON,
        format!("max rel / cond = {prop:.2e}"),
    );
    rep.check("gap -> 0 as point dish s -> 0", tight, String::new());
    rep.check(
        "parallel orientation minimizes gap",
        schwarz <= 1.0,
        format!("max excess / slack = {schwarz:.2e}"),
    );
    rep
}

fn infrastructure() -> SuiteReport {
    let mut rep = SuiteReport::new("infrastructure");
    let cfg = ScenarioConfig {
        kind: FieldKind::Emitted,
        emitter: Dish::new(
            RealSpacetimePoint::origin(),
            SpacetimeDirection::new(Vec3::new(0.0, 0.3, 0.4), 1.0),
        )
        .unwrap(),
        receiver: None,
        grid: GridSpec {
            origin: [-1.0, -1.0, 0.0, 0.0],
            spacing: [0.5, 0.5, 0.5, 0.25],
            counts: [5, 5, 5, 8],
            slice_mode: SliceMode::Full4d,
        },
        output: OutputSpec::default(),
    };
    let g1 = sample_grid(&cfg, DEFAULT_BUDGET).unwrap();
    let g2 = sample_grid(&cfg, DEFAULT_BUDGET).unwrap();
    let bytes = |g: &_| {
        let (mut c, mut b) = (Vec::new(), Vec::new());
        write_csv(g, &mut c).unwrap();
        write_binary(g, &mut b).unwrap();
        (c, b)
    };
    let (c1, b1) = bytes(&g1);
    let (c2, b2) = bytes(&g2);
    rep.check("deterministic output bytes", c1 == c2 && b1 == b2, String::new());

    let kernel = KernelConfig::default();
    let n = cfg.grid.len() as usize;
    let mut reversed = vec![Complex64::default(); n];
    for i in (0..n).rev() {
        reversed[i] = cfg.evaluate(cfg.grid.coords(i), &kernel).value;
    }
    let same = reversed
        .iter()
        .zip(&g1.values)
        .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
    rep.check("evaluation order independence", same, String::new());

    let from_bin = read_binary(&b1[..]).unwrap();
    rep.check("binary round trip bit-exact", from_bin.bit_eq(&g1), String::new());
    let from_csv = read_csv(&c1[..], cfg.grid).unwrap();
    rep.check("CSV round trip", from_csv.bit_eq(&g1), format!("{} masked", g1.masked_count()));
    rep
}
