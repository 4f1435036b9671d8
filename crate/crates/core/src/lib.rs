//! Simulation of a three-pinhole interferometer whose pinholes carry
//! different polarization states, and recovery of the three-state geometric
//! phase Δ3 from the ridge pattern.
//!
//! The numerical core is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix the precision. File formats, configuration and the
//! experiment runners work in `f64`.

// `!(x > 0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod interferometer;
pub mod io;
pub mod raster;
pub mod ridge;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};

pub type JonesVector64 = states::JonesVector<f64>;
pub type JonesVector32 = states::JonesVector<f32>;
pub type StokesPoint64 = states::StokesPoint<f64>;
pub type StokesPoint32 = states::StokesPoint<f32>;
pub type Vec2d = geometry::Vec2<f64>;
pub type Vec2f = geometry::Vec2<f32>;
pub type PinholeGeometry64 = geometry::PinholeGeometry<f64>;
pub type PinholeGeometry32 = geometry::PinholeGeometry<f32>;
pub type ObservationGrid64 = interferometer::ObservationGrid<f64>;
pub type ObservationGrid32 = interferometer::ObservationGrid<f32>;
pub type SourceConfig64 = interferometer::SourceConfig<f64>;
pub type SourceConfig32 = interferometer::SourceConfig<f32>;
pub type Interferogram64 = interferometer::Interferogram<f64>;
pub type Interferogram32 = interferometer::Interferogram<f32>;
pub type RidgeAnalysis64 = ridge::RidgeAnalysis<f64>;
pub type RidgeAnalysis32 = ridge::RidgeAnalysis<f32>;
