//! Sampling of the field kinds over rectilinear spacetime grids.

use std::path::PathBuf;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beam::{coupling, emitted_field, far_zone_field, BeamGeometry, Dish};
use crate::error::{Error, Result};
use crate::kernels::{holomorphic_green, KernelConfig, KernelValue};
use crate::spacetime::{ComplexSpacetimePoint, RealSpacetimePoint, Vec3};

/// Default cap on the number of grid samples.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceMode {
    Full4d,
    #[serde(rename = "fixed_time_3d")]
    FixedTime3d,
    #[serde(rename = "axis_profile_1d")]
    AxisProfile1d,
}

impl SliceMode {
    pub fn code(self) -> u8 {
        match self {
            SliceMode::Full4d => 0,
            SliceMode::FixedTime3d => 1,
            SliceMode::AxisProfile1d => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(SliceMode::Full4d),
            1 => Some(SliceMode::FixedTime3d),
            2 => Some(SliceMode::AxisProfile1d),
            _ => None,
        }
    }
}

/// Rectilinear grid over (x, y, z, t). Storage is row-major with t fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: [f64; 4],
    pub spacing: [f64; 4],
    pub counts: [u64; 4],
    pub slice_mode: SliceMode,
}

impl GridSpec {
    /// Single sample at `p`.
    pub fn point(p: [f64; 4]) -> Self {
        Self {
            origin: p,
            spacing: [1.0; 4],
            counts: [1; 4],
            slice_mode: SliceMode::AxisProfile1d,
        }
    }

    /// `n` samples along t at fixed 𝐱.
    pub fn time_profile(x: &Vec3, t0: f64, dt: f64, n: u64) -> Self {
        Self {
            origin: [x[0], x[1], x[2], t0],
            spacing: [1.0, 1.0, 1.0, dt],
            counts: [1, 1, 1, n],
            slice_mode: SliceMode::AxisProfile1d,
        }
    }

    pub fn len(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self, budget: u64) -> Result<()> {
        if self.origin.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        if self.spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidGrid("spacing entries must be positive".into()));
        }
        if self.counts.contains(&0) {
            return Err(Error::InvalidGrid("counts must be at least 1".into()));
        }
        match self.slice_mode {
            SliceMode::Full4d => {}
            SliceMode::FixedTime3d if self.counts[3] != 1 => {
                return Err(Error::InvalidGrid(
                    "fixed_time_3d needs exactly one time sample".into(),
                ))
            }
            SliceMode::AxisProfile1d if self.counts.iter().filter(|&&c| c > 1).count() > 1 => {
                return Err(Error::InvalidGrid(
                    "axis_profile_1d varies at most one axis".into(),
                ))
            }
            _ => {}
        }
        let samples = self.len();
        if samples > budget as u128 {
            return Err(Error::BudgetExceeded { samples, budget });
        }
        Ok(())
    }

    /// Spacetime coordinates of the sample at storage index `i`.
    pub fn coords(&self, i: usize) -> [f64; 4] {
        let mut rest = i as u64;
        let mut out = [0.0; 4];
        for axis in (0..4).rev() {
            let n = self.counts[axis];
            let k = rest % n;
            rest /= n;
            out[axis] = self.origin[axis] + k as f64 * self.spacing[axis];
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// G̃(x − iy_e), the emitter's extension placed at the origin.
    Green,
    /// G̃(x − z_e).
    Emitted,
    /// G̃(z_r − z_e) with the receiver centered on the grid point.
    Coupling,
    /// Far-zone pulse of the emitter.
    FarZone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    #[serde(alias = "bin")]
    RawBinary,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// A sampling scenario, as read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: FieldKind,
    pub emitter: Dish,
    #[serde(default)]
    pub receiver: Option<Dish>,
    pub grid: GridSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, self.receiver.is_some()) {
            (FieldKind::Coupling, false) => {
                Err(Error::Config("kind \"coupling\" needs a receiver".into()))
            }
            (FieldKind::Coupling, true) | (_, false) => Ok(()),
            (_, true) => Err(Error::Config(
                "a receiver is only allowed with kind \"coupling\"".into(),
            )),
        }
    }

    /// Field value at one spacetime point `[x, y, z, t]`.
    pub fn evaluate(&self, p: [f64; 4], cfg: &KernelConfig) -> KernelValue {
        let x = RealSpacetimePoint::new(Vec3::new(p[0], p[1], p[2]), p[3]);
        let e = &self.emitter;
        let value = match self.kind {
            FieldKind::Green => {
                holomorphic_green(&ComplexSpacetimePoint::past(&x, e.extension()), cfg)
            }
            FieldKind::Emitted => emitted_field(e, &x, cfg),
            FieldKind::Coupling => match &self.receiver {
                Some(rd) => {
                    Dish::new(x, *rd.extension()).and_then(|moved| coupling(e, &moved, cfg))
                }
                None => return KernelValue::outside(),
            },
            FieldKind::FarZone => far_zone_field(&BeamGeometry::emission(e, &x)),
        };
        value.into()
    }
}

/// Description of how a grid was produced, written next to it.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GridMetadata {
    pub description: String,
    pub kind: Option<FieldKind>,
    pub emitter: Option<Dish>,
    pub receiver: Option<Dish>,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
    /// `true` where the point hit a singularity or left the kernel domain.
    pub mask: Vec<bool>,
    pub metadata: GridMetadata,
}

impl FieldGrid {
    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Equality of spec, mask and the bit patterns of every value.
    pub fn bit_eq(&self, other: &FieldGrid) -> bool {
        self.spec == other.spec
            && self.mask == other.mask
            && self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| {
                a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
            })
    }
}

/// Evaluates the scenario at every grid point. Points are evaluated in
/// parallel and stored by index; singular points are masked.
pub fn sample_grid(cfg: &ScenarioConfig, budget: u64) -> Result<FieldGrid> {
    cfg.validate()?;
    cfg.grid.validate(budget)?;
    let kernel = KernelConfig::default();
    let n = cfg.grid.len() as usize;
    let samples: Vec<KernelValue> = (0..n)
        .into_par_iter()
        .map(|i| cfg.evaluate(cfg.grid.coords(i), &kernel))
        .collect();
    let mask = samples.iter().map(|v| !v.is_ok()).collect();
    let values = samples.into_iter().map(|v| v.value).collect();
    let metadata = GridMetadata {
        description: format!("{:?} field sampled on a {:?} grid", cfg.kind, cfg.grid.counts),
        kind: Some(cfg.kind),
        emitter: Some(cfg.emitter),
        receiver: cfg.receiver,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok(FieldGrid {
        spec: cfg.grid,
        values,
        mask,
        metadata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::SpacetimeDirection;
    use std::f64::consts::PI;

    fn emitter() -> Dish {
        Dish::new(
            RealSpacetimePoint::origin(),
            SpacetimeDirection::along_z(0.5, 1.0),
        )
        .unwrap()
    }

    fn scenario(kind: FieldKind, grid: GridSpec) -> ScenarioConfig {
        ScenarioConfig {
            kind,
            emitter: emitter(),
            receiver: None,
            grid,
            output: OutputSpec::default(),
        }
    }

    #[test]
    fn single_point_green() {
        let cfg = scenario(FieldKind::Green, GridSpec::point([0.0, 0.0, 2.0, 2.0]));
        let g = sample_grid(&cfg, DEFAULT_BUDGET).unwrap();
        assert_eq!(g.values.len(), 1);
        let expected = Complex64::new(4.0, 1.0) / (34.0 * PI * PI);
        assert!((g.values[0] - expected).norm() < 1e-14 * expected.norm());
        assert_eq!(g.masked_count(), 0);
    }

    #[test]
    fn coords_are_row_major_time_fastest() {
        let spec = GridSpec {
            origin: [0.0, 10.0, 20.0, 30.0],
            spacing: [1.0, 2.0, 3.0, 0.5],
            counts: [2, 3, 1, 4],
            slice_mode: SliceMode::Full4d,
        };
        assert_eq!(spec.coords(0), [0.0, 10.0, 20.0, 30.0]);
        assert_eq!(spec.coords(1), [0.0, 10.0, 20.0, 30.5]);
        assert_eq!(spec.coords(4), [0.0, 12.0, 20.0, 30.0]);
        assert_eq!(spec.coords(12), [1.0, 10.0, 20.0, 30.0]);
        assert_eq!(spec.coords(23), [1.0, 14.0, 20.0, 31.5]);
    }

    #[test]
    fn grid_validation() {
        let mut spec = GridSpec::point([0.0; 4]);
        spec.counts = [10, 10, 10, 10];
        spec.slice_mode = SliceMode::Full4d;
        assert!(matches!(
            spec.validate(100),
            Err(Error::BudgetExceeded { samples: 10_000, .. })
        ));
        spec.slice_mode = SliceMode::FixedTime3d;
        assert!(matches!(spec.validate(DEFAULT_BUDGET), Err(Error::InvalidGrid(_))));
        spec.slice_mode = SliceMode::AxisProfile1d;
        assert!(spec.validate(DEFAULT_BUDGET).is_err());
        spec.counts = [1, 1, 1, 0];
        assert!(spec.validate(DEFAULT_BUDGET).is_err());
        spec.counts = [1, 1, 1, 5];
        spec.spacing[3] = 0.0;
        assert!(spec.validate(DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn axis_profile_peaks_at_arrival() {
        let dt = 0.01;
        let spec = GridSpec::time_profile(&Vec3::new(0.0, 0.0, 7.0), 0.0, dt, 1500);
        let g = sample_grid(&scenario(FieldKind::Emitted, spec), DEFAULT_BUDGET).unwrap();
        let (imax, _) = g
            .values
            .iter()
            .enumerate()
            .fold((0, 0.0), |b, (i, v)| if v.norm() > b.1 { (i, v.norm()) } else { b });
        assert!((g.spec.coords(imax)[3] - 7.0).abs() <= dt);
    }

    #[test]
    fn far_grid_has_no_masked_points() {
        let spec = GridSpec {
            origin: [5.0, 5.0, 5.0, 0.0],
            spacing: [0.5, 0.5, 0.5, 0.25],
            counts: [4, 4, 4, 8],
            slice_mode: SliceMode::Full4d,
        };
        for kind in [FieldKind::Green, FieldKind::Emitted, FieldKind::FarZone] {
            let g = sample_grid(&scenario(kind, spec), DEFAULT_BUDGET).unwrap();
            assert_eq!(g.masked_count(), 0);
        }
    }

    #[test]
    fn singular_points_are_masked() {
        // the rim of the source disk is where r̃ vanishes
        let spec = GridSpec {
            origin: [0.25, 0.0, 0.0, 0.0],
            spacing: [0.25, 1.0, 1.0, 1.0],
            counts: [3, 1, 1, 1],
            slice_mode: SliceMode::AxisProfile1d,
        };
        let g = sample_grid(&scenario(FieldKind::Emitted, spec), DEFAULT_BUDGET).unwrap();
        assert_eq!(g.mask, vec![false, true, false]);
        assert!(g.values[1].re.is_nan());

        let at_center = scenario(FieldKind::FarZone, GridSpec::point([0.0; 4]));
        let g = sample_grid(&at_center, DEFAULT_BUDGET).unwrap();
        assert_eq!(g.mask, vec![true]);
    }

    #[test]
    fn receiver_iff_coupling() {
        let mut cfg = scenario(FieldKind::Coupling, GridSpec::point([0.0, 0.0, 9.0, 9.0]));
        assert!(cfg.validate().is_err());
        cfg.receiver = Some(emitter());
        assert!(cfg.validate().is_ok());
        let g = sample_grid(&cfg, DEFAULT_BUDGET).unwrap();
        assert_eq!(g.masked_count(), 0);
        cfg.kind = FieldKind::Emitted;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn config_json_round_trip() {
        let text = r#"{
            "kind": "coupling",
            "emitter": {"center": {"x": [0, 0, 0], "t": 0}, "extension": {"y": [0, 0, 1], "s": 2}},
            "receiver": {"center": {"x": [0, 0, 10], "t": 10}, "extension": {"y": [0, 0, 1], "s": 2}},
            "grid": {"origin": [0, 0, 10, 10], "spacing": [1, 1, 1, 0.1], "counts": [1, 1, 1, 3],
                     "slice_mode": "axis_profile_1d"},
            "output": {"path": "out.bin", "format": "raw_binary"}
        }"#;
        let cfg = ScenarioConfig::from_json(text).unwrap();
        assert_eq!(cfg.output.format, OutputFormat::RawBinary);
        let again = ScenarioConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn config_rejects_invalid_dish() {
        let text = r#"{
            "kind": "emitted",
            "emitter": {"center": {"x": [0, 0, 0], "t": 0}, "extension": {"y": [0, 0, 2], "s": 1}},
            "grid": {"origin": [0, 0, 0, 0], "spacing": [1, 1, 1, 1], "counts": [1, 1, 1, 1],
                     "slice_mode": "full4d"}
        }"#;
        assert!(ScenarioConfig::from_json(text).is_err());
    }
}
