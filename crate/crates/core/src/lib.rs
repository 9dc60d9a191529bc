//! Holomorphic Green function of the wave equation in four spacetime
//! dimensions, and the complex-source pulsed beams built from it.
//!
//! * [`spacetime`]: spacetime points, the future cone and tubes, and the
//!   branch-correct complex distance r̃.
//! * [`kernels`]: Cauchy kernel, extended Coulomb potential, G̃, and the
//!   flux/Laplacian probes of the extended source.
//! * [`beam`]: emitting and receiving dishes, coupling, far-zone pulses,
//!   peak coupling and optimal alignment.
//! * [`directivity`]: the convex directivity D(y).
//! * [`grid`], [`io`]: grid sampling and CSV / `PBGF0001` files.
//! * [`verify`]: invariant suites run by `holobeam verify`.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beam;
pub mod directivity;
pub mod error;
pub mod grid;
pub mod io;
pub mod kernels;
mod quadrature;
pub mod spacetime;
pub mod verify;

pub use beam::{
    combined_geometry, coupling, duration, emitted_field, far_zone_field, optimal_alignment,
    peak_coupling, Alignment, BeamGeometry, Dish, EmitterDish, ReceiverDish,
};
pub use directivity::{convexity_gap, directivity, directivity_from, DirectivityValue};
pub use error::{Error, Result};
pub use grid::{sample_grid, FieldGrid, FieldKind, GridSpec, ScenarioConfig, SliceMode};
pub use kernels::{
    cauchy_kernel, extended_coulomb, holomorphic_green, laplacian_residual, source_flux,
    KernelConfig, KernelValue,
};
pub use num_complex::Complex64;
pub use quadrature::gauss_legendre;
pub use spacetime::{
    complex_distance, complex_distance_xy, in_future_cone, in_future_tube, in_past_tube,
    distance_to_branch_set, source_disk, ComplexSpacetimePoint, ImagSign, RealSpacetimePoint, SourceDisk,
    SpacetimeDirection, Vec3,
};
