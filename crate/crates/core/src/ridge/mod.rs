//! Inverse pipeline: isolate each fringe family, demodulate its offset,
//! rebuild the ridge lines and read Δ3 off the ridge triangles.

pub mod demod;
pub mod filter;
pub mod lattice;
pub mod pipeline;

pub use demod::{demodulate_phase, DemodWindow, Demodulation, Taper};
pub use filter::{
    derivative_gain, directional_derivative, isolate_fringe, isolation_gain, FilteredField, SampledField,
};
pub use lattice::{
    area_law, build_ridge_family, delta3_from_class_area, delta3_from_phases, elemental_triangles, intersect,
    recover_delta3, ridge_triangles, shoelace_area, triangle_for_lines, Region, RidgeLineFamily, RidgeTriangle,
    TriangleSet,
};
pub use pipeline::{analyze, AnalysisOptions, FringeEstimate, RidgeAnalysis};
