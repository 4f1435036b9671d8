//! End-to-end extraction from one interferogram.

use crate::error::{Error, Result};
use crate::geometry::{Pair, PinholeGeometry};
use crate::interferometer::Interferogram;
use crate::ridge::demod::{demodulate_phase, DemodWindow, Taper};
use crate::ridge::filter::{isolate_fringe, isolation_gain};
use crate::ridge::lattice::{
    build_ridge_family, delta3_from_class_area, delta3_from_phases, ridge_triangles, Region, RidgeLineFamily,
    TriangleSet,
};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisOptions {
    /// Pixels excluded at each edge before demodulating.
    pub margin: usize,
    pub taper: Taper,
    /// Estimated visibilities below this report [`Error::ZeroAmplitude`].
    pub min_visibility: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            margin: 2,
            taper: Taper::Hann,
            min_visibility: 1e-3,
        }
    }
}

/// Demodulated fringe `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FringeEstimate<T> {
    pub pair: Pair,
    pub delta: T,
    /// Amplitude of the filtered cosine.
    pub amplitude: T,
    /// `|⟨ψ_i|ψ_j⟩|` estimated from the amplitude, the filter gain and the
    /// mean intensity.
    pub visibility: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RidgeAnalysis<T> {
    pub fringes: [FringeEstimate<T>; 3],
    pub families: [RidgeLineFamily<T>; 3],
    pub triangles: TriangleSet<T>,
    /// Phase-sum route, in `[0, 2π)`.
    pub delta3_phase: T,
    /// Area route labelled by the phase route; `None` when neither elemental
    /// class could be measured.
    pub delta3_area: Option<T>,
    pub area_n0: Option<T>,
    pub area_n1: Option<T>,
}

/// Runs filtering, demodulation, ridge reconstruction and triangle
/// enumeration. Fails with [`Error::ZeroAmplitude`] naming the first pair
/// whose fringe is missing.
pub fn analyze<T: Real>(
    img: &Interferogram<T>,
    geom: &PinholeGeometry<T>,
    wavenumber: T,
    options: &AnalysisOptions,
) -> Result<RidgeAnalysis<T>> {
    let grid = img.grid;
    let window = DemodWindow::interior(grid.nx, grid.ny, options.margin, options.taper);
    let mean = img.mean();
    if !(mean > T::zero()) {
        return Err(Error::EmptyImage);
    }
    // P_ij oscillates with amplitude 2|⟨ψ_i|ψ_j⟩|·C²/L² and the mean is 3C²/L²
    let unit = T::two() * mean / T::lit(3.0);

    let mut fringes = Vec::with_capacity(3);
    for pair in Pair::CYCLIC {
        let k = geom.k_vector(pair, wavenumber, grid.distance);
        let field = isolate_fringe(img, geom, pair)?;
        let demod = demodulate_phase(&field, k, &window).map_err(|e| match e {
            Error::ZeroAmplitude(_, _, v) => Error::ZeroAmplitude(pair.i(), pair.j(), v),
            other => other,
        })?;
        let gain = isolation_gain(geom, pair, k, &grid);
        let visibility = demod.amplitude / gain.abs() / unit;
        if visibility.to_f64_lossy() < options.min_visibility {
            return Err(Error::ZeroAmplitude(pair.i(), pair.j(), visibility.to_f64_lossy()));
        }
        fringes.push(FringeEstimate {
            pair,
            delta: demod.delta,
            amplitude: demod.amplitude,
            visibility,
        });
    }
    let fringes: [FringeEstimate<T>; 3] = [fringes[0], fringes[1], fringes[2]];

    let region = Region::from_grid(&grid);
    let families = fringes.map(|f| {
        build_ridge_family(f.pair, geom.k_vector(f.pair, wavenumber, grid.distance), f.delta, &region)
    });
    let triangles = ridge_triangles(&families, &region);
    let delta3_phase = delta3_from_phases(fringes[0].delta, fringes[1].delta, fringes[2].delta);
    let area_n0 = triangles.class_area(0);
    let area_n1 = triangles.class_area(1);
    let s0 = geom.area();
    let delta3_area = match (area_n0, area_n1) {
        (Some(a), _) => Some(delta3_from_class_area(a, 0, s0, wavenumber, grid.distance)),
        (None, Some(a)) => Some(delta3_from_class_area(a, 1, s0, wavenumber, grid.distance)),
        (None, None) => None,
    };
    Ok(RidgeAnalysis {
        fringes,
        families,
        triangles,
        delta3_phase,
        delta3_area,
        area_n0,
        area_n1,
    })
}
