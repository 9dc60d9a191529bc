//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export has a plain Rust counterpart returning [`holobeam::Result`];
//! the `#[wasm_bindgen]` wrappers only turn errors into JS exceptions.

use holobeam::{
    coupling, directivity_from, emitted_field, far_zone_field, peak_coupling, BeamGeometry, Dish,
    FieldKind, GridSpec, KernelConfig, RealSpacetimePoint, ScenarioConfig, SliceMode,
    SpacetimeDirection, Vec3,
};
use nalgebra::Rotation3;
use wasm_bindgen::prelude::*;

fn emitter_on_z(a: f64, s: f64) -> holobeam::Result<Dish> {
    Dish::new(RealSpacetimePoint::origin(), SpacetimeDirection::along_z(a, s))
}

/// Samples `n` times in `[t0, t1]` at distance `r` and polar angle `theta`
/// (radians) from an emitter on the z axis. Returns `[t, |field|, |far zone|]`
/// triples; masked samples are NaN.
pub fn beam_profile(a: f64, s: f64, r: f64, theta: f64, t0: f64, t1: f64, n: usize) -> holobeam::Result<Vec<f64>> {
    let e = emitter_on_z(a, s)?;
    let cfg = KernelConfig::default();
    let x = Vec3::new(r * theta.sin(), 0.0, r * theta.cos());
    let dt = if n > 1 { (t1 - t0) / (n - 1) as f64 } else { 0.0 };
    let mut out = Vec::with_capacity(3 * n);
    for k in 0..n {
        let t = t0 + k as f64 * dt;
        let p = RealSpacetimePoint::new(x, t);
        out.push(t);
        out.push(emitted_field(&e, &p, &cfg).map_or(f64::NAN, |v| v.norm()));
        out.push(far_zone_field(&BeamGeometry::emission(&e, &p)).map_or(f64::NAN, |v| v.norm()));
    }
    Ok(out)
}

/// log10 |field| on an `n × n` grid over the xz plane, `x, z ∈ [-extent, extent]`,
/// at time `t`. Row-major with z as the row index, starting at the bottom.
pub fn field_slice(a: f64, s: f64, t: f64, extent: f64, n: u64) -> holobeam::Result<Vec<f64>> {
    let step = if n > 1 { 2.0 * extent / (n - 1) as f64 } else { 1.0 };
    let scenario = ScenarioConfig {
        kind: FieldKind::Emitted,
        emitter: emitter_on_z(a, s)?,
        receiver: None,
        grid: GridSpec {
            origin: [-extent, 0.0, -extent, t],
            spacing: [step, 1.0, step, 1.0],
            counts: [n, 1, n, 1],
            slice_mode: SliceMode::FixedTime3d,
        },
        output: Default::default(),
    };
    scenario.validate()?;
    scenario.grid.validate(holobeam::grid::DEFAULT_BUDGET)?;
    let cfg = KernelConfig::default();
    let mut out = Vec::with_capacity((n * n) as usize);
    for iz in 0..n {
        for ix in 0..n {
            let p = [-extent + ix as f64 * step, 0.0, -extent + iz as f64 * step, t];
            let v = scenario.evaluate(p, &cfg);
            out.push(if v.is_ok() { v.value.norm().log10() } else { f64::NAN });
        }
    }
    Ok(out)
}

/// |coupling| normalized by its peak value as the receiver's extension is
/// tilted away from the link by `n` angles in `[0, π]`. The emitter faces the
/// receiver, which sits on the z axis at distance `r` with delay `t = r`.
/// Returns `[angle, ratio]` pairs.
pub fn tilt_scan(a_e: f64, s_e: f64, a_r: f64, s_r: f64, r: f64, n: usize) -> holobeam::Result<Vec<f64>> {
    let e = emitter_on_z(a_e, s_e)?;
    let peak = peak_coupling(r, a_e + a_r, s_e + s_r)?;
    let cfg = KernelConfig::default();
    let mut out = Vec::with_capacity(2 * n);
    for k in 0..n {
        let angle = if n > 1 { std::f64::consts::PI * k as f64 / (n - 1) as f64 } else { 0.0 };
        let y = Rotation3::from_axis_angle(&Vec3::y_axis(), angle) * Vec3::new(0.0, 0.0, a_r);
        let rd = Dish::new(
            RealSpacetimePoint::new(Vec3::new(0.0, 0.0, r), r),
            SpacetimeDirection::new(y, s_r),
        )?;
        out.push(angle);
        out.push(coupling(&e, &rd, &cfg).map_or(f64::NAN, |v| v.norm() / peak));
    }
    Ok(out)
}

fn js<T>(r: holobeam::Result<T>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = beamProfile)]
pub fn beam_profile_js(a: f64, s: f64, r: f64, theta: f64, t0: f64, t1: f64, n: usize) -> Result<Vec<f64>, JsError> {
    js(beam_profile(a, s, r, theta, t0, t1, n))
}

#[wasm_bindgen(js_name = fieldSlice)]
pub fn field_slice_js(a: f64, s: f64, t: f64, extent: f64, n: u32) -> Result<Vec<f64>, JsError> {
    js(field_slice(a, s, t, extent, u64::from(n)))
}

#[wasm_bindgen(js_name = tiltScan)]
pub fn tilt_scan_js(a_e: f64, s_e: f64, a_r: f64, s_r: f64, r: f64, n: usize) -> Result<Vec<f64>, JsError> {
    js(tilt_scan(a_e, s_e, a_r, s_r, r, n))
}

#[wasm_bindgen]
pub fn directivity(a: f64, s: f64) -> Result<f64, JsError> {
    js(directivity_from(a, s).map(|d| d.value()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_peaks_at_arrival() {
        let v = beam_profile(0.5, 1.0, 10.0, 0.0, 8.0, 12.0, 401).unwrap();
        let best = v.chunks(3).max_by(|p, q| p[1].total_cmp(&q[1])).unwrap();
        assert!((best[0] - 10.0).abs() < 1e-9);
        assert!(((best[2] - best[1]) / best[1]).abs() < 0.1);
    }

    #[test]
    fn slice_is_symmetric_and_forward() {
        let n = 41;
        let v = field_slice(0.5, 1.0, 4.0, 5.0, n).unwrap();
        assert_eq!(v.len(), (n * n) as usize);
        let at = |ix: u64, iz: u64| v[(iz * n + ix) as usize];
        for iz in 0..n {
            for ix in 0..n / 2 {
                let (l, r) = (at(ix, iz), at(n - 1 - ix, iz));
                assert!(l.is_nan() && r.is_nan() || (l - r).abs() < 1e-12);
            }
        }
        // z = ±4 on the axis at t = 4: forward/backward ratio (s + a)/(s - a)
        assert!((at(20, 36) - at(20, 4) - 3f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn tilt_scan_is_maximal_when_aligned() {
        let v = tilt_scan(0.5, 1.0, 0.5, 1.0, 100.0, 37).unwrap();
        assert!((v[1] - 1.0).abs() < 5.0 * 1.0 / 100.0);
        assert!(v.chunks(2).all(|p| p[1] <= v[1]));
    }

    #[test]
    fn errors_surface() {
        assert!(beam_profile(2.0, 1.0, 10.0, 0.0, 0.0, 1.0, 3).is_err());
        assert!(field_slice(0.5, 1.0, 0.0, 1.0, 0).is_err());
        assert!(tilt_scan(0.5, 1.0, 0.5, 1.0, -1.0, 3).is_err());
    }
}
