//! Weighted arithmetic and harmonic means, their prism geometry, and a
//! discontinuity-adapted midpoint reconstruction.
//!
//! The crate has three layers that build on each other:
//!
//! - [`means`]: validated weight and sample vectors, the two classical
//!   weighted means, the exact closed form for their gap, and a sign-guarded
//!   harmonic mean for data that may change sign.
//! - [`geometry`]: the means realized as surface intersections over the unit
//!   cell. Each weighted sample produces one parabolic sheet per coordinate
//!   axis plus a cap; all sheets cross in a single point whose height encodes
//!   the harmonic mean, while one hyperplane reads off both means.
//! - [`reconstruction`]: fourth-order midpoint prediction on nonuniform
//!   grids, split into an affine part plus a coupling times a weighted mean
//!   of curvature indicators. Swapping that mean from arithmetic to guarded
//!   harmonic keeps fourth order on smooth data and kills the overshoot at a
//!   jump.
//!
//! The default `std` feature only gates transcendental functions and
//! `std::error::Error`; with `default-features = false, features = ["libm"]`
//! the crate builds without the standard library (allocation is required).
//!
//! ```
//! use hk_core::{build_scene, mean_gap, CapVariant, PositiveSample, WeightVector};
//!
//! let a = PositiveSample::new(&[14.0, 10.0])?;
//! let w = WeightVector::new(&[0.7, 0.3])?;
//!
//! let report = mean_gap(&a, &w)?;
//! assert!((report.h_w - 12.5).abs() < 1e-12);
//! assert!((report.m_w - 12.8).abs() < 1e-12);
//! assert!((report.gap_direct - report.gap_closed_form).abs() < 1e-14);
//!
//! // The same pair as a scene: every surface passes through one point
//! // whose base coordinates are w_i H / a_i.
//! let scene = build_scene(&a, &w, CapVariant::Plane)?;
//! assert!((scene.x_bar[0] - 0.7 * 12.5 / 14.0).abs() < 1e-12);
//! # Ok::<(), hk_core::Error>(())
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("hk-core needs `std` (default) or `libm` for transcendental functions");

pub mod error;
pub mod geometry;
pub mod means;
pub mod reconstruction;
mod sum;

pub use error::{Error, Result};
pub use geometry::{
    analytic_intersection, build_scene, corollary_scene, numeric_intersection, parabola_pair,
    prism_heights, sample_surfaces, CapVariant, FigureData, Marker, NewtonReport, ParabolaCase,
    ParabolaPair, PrismScene, ScalarEntry, SurfaceTrack,
};
pub use means::{
    guarded_harmonic, mean_gap, min_bound, scaled_uniform_harmonic, weighted_arithmetic,
    weighted_harmonic, MeanGapReport, PositiveSample, SignPolicy, WeightVector,
};
pub use reconstruction::{
    compare_operators, convergence_order, decompose, pph_midpoint, reconstruct, Decomposition,
    GridFunction, Operator, OrderRow, ReconReport, Stencil,
};
