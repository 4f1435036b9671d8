//! Forward model for the three-pinhole interferometer.
//!
//! Grid convention: `samples[[row, col]]` with `col` increasing along `+x`
//! (rightward) and `row` increasing along `+y` (upward); `[[0, 0]]` is the
//! lower-left corner. The grid is centered on `center`, measured from the
//! optical axis through the pinholes' circumcenter.

use ndarray::{Array2, Zip};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{Pair, PinholeGeometry, Vec2};
use crate::scalar::Real;
use crate::states::{inner_product, JonesVector};

/// Sampling of the observation plane `z = L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservationGrid<T> {
    pub distance: T,
    pub nx: usize,
    pub ny: usize,
    pub dx: T,
    pub dy: T,
    pub center: Vec2<T>,
}

impl<T: Real> ObservationGrid<T> {
    pub fn new(distance: T, nx: usize, ny: usize, dx: T, dy: T, center: Vec2<T>) -> Result<Self> {
        let grid = Self {
            distance,
            nx,
            ny,
            dx,
            dy,
            center,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// 640×480 detector with 9 µm × 8 µm pixels at distance `distance`.
    pub fn ccd(distance: T) -> Self {
        Self {
            distance,
            nx: 640,
            ny: 480,
            dx: T::lit(9e-6),
            dy: T::lit(8e-6),
            center: Vec2::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance > T::zero()) || !self.distance.is_finite() {
            return Err(Error::InvalidGrid(format!("distance L must be positive, got {}", self.distance)));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2x2 pixels, got {}x{}",
                self.nx, self.ny
            )));
        }
        if !(self.dx > T::zero() && self.dy > T::zero()) {
            return Err(Error::InvalidGrid("pixel pitch must be positive".into()));
        }
        if !(self.center.x.is_finite() && self.center.y.is_finite()) {
            return Err(Error::InvalidGrid("grid center must be finite".into()));
        }
        Ok(())
    }

    pub fn x(&self, col: usize) -> T {
        self.center.x + (T::from_usize_lossy(col) - T::from_usize_lossy(self.nx - 1) / T::two()) * self.dx
    }

    pub fn y(&self, row: usize) -> T {
        self.center.y + (T::from_usize_lossy(row) - T::from_usize_lossy(self.ny - 1) / T::two()) * self.dy
    }

    /// Transverse position `r` of a pixel center.
    pub fn point(&self, row: usize, col: usize) -> Vec2<T> {
        Vec2::new(self.x(col), self.y(row))
    }

    /// Lower-left and upper-right pixel centers.
    pub fn bounds(&self) -> (Vec2<T>, Vec2<T>) {
        (self.point(0, 0), self.point(self.ny - 1, self.nx - 1))
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.ny, self.nx)
    }

    pub fn to_f64(&self) -> ObservationGrid<f64> {
        ObservationGrid {
            distance: self.distance.to_f64_lossy(),
            nx: self.nx,
            ny: self.ny,
            dx: self.dx.to_f64_lossy(),
            dy: self.dy.to_f64_lossy(),
            center: Vec2::new(self.center.x.to_f64_lossy(), self.center.y.to_f64_lossy()),
        }
    }
}

/// Wavenumber, per-pinhole phases and states, and the overall amplitude `C`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceConfig<T> {
    pub wavenumber: T,
    pub phases: [T; 3],
    pub states: [JonesVector<T>; 3],
    pub amplitude: T,
}

impl<T: Real> SourceConfig<T> {
    pub fn new(wavenumber: T, phases: [T; 3], states: [JonesVector<T>; 3]) -> Result<Self> {
        let src = Self {
            wavenumber,
            phases,
            states,
            amplitude: T::one(),
        };
        src.validate()?;
        Ok(src)
    }

    pub fn from_wavelength(wavelength: T, phases: [T; 3], states: [JonesVector<T>; 3]) -> Result<Self> {
        if !(wavelength > T::zero()) {
            return Err(Error::InvalidSource(format!("wavelength must be positive, got {wavelength}")));
        }
        Self::new(T::TAU() / wavelength, phases, states)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavenumber > T::zero()) || !self.wavenumber.is_finite() {
            return Err(Error::InvalidSource(format!("wavenumber must be positive, got {}", self.wavenumber)));
        }
        if !(self.amplitude >= T::zero()) || !self.amplitude.is_finite() {
            return Err(Error::InvalidSource(format!("amplitude C must be non-negative, got {}", self.amplitude)));
        }
        if self.phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSource("phases must be finite".into()));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> T {
        T::TAU() / self.wavenumber
    }

    /// `φ_ij = φ_i − φ_j`.
    pub fn phase_difference(&self, pair: Pair) -> T {
        self.phases[pair.i() - 1] - self.phases[pair.j() - 1]
    }

    pub fn overlap(&self, pair: Pair) -> Complex<T> {
        inner_product(&self.states[pair.i() - 1], &self.states[pair.j() - 1])
    }
}

/// Sampled intensity `p(x, y)` on an observation grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Interferogram<T> {
    pub grid: ObservationGrid<T>,
    pub samples: Array2<T>,
}

impl<T: Real> Interferogram<T> {
    pub fn new(grid: ObservationGrid<T>, samples: Array2<T>) -> Result<Self> {
        if samples.dim() != grid.shape() {
            return Err(Error::InvalidGrid(format!(
                "sample array is {:?}, grid expects {:?}",
                samples.dim(),
                grid.shape()
            )));
        }
        Ok(Self { grid, samples })
    }

    pub fn max(&self) -> T {
        self.samples.iter().fold(T::zero(), |m, &v| m.max(v))
    }

    pub fn mean(&self) -> T {
        self.samples.iter().copied().sum::<T>() / T::from_usize_lossy(self.samples.len())
    }

    /// Multiplies every sample by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.mapv(|v| v * factor),
        }
    }
}

fn validate_inputs<T: Real>(src: &SourceConfig<T>, grid: &ObservationGrid<T>) -> Result<()> {
    grid.validate()?;
    src.validate()
}

fn synthesize<T: Real, F>(grid: &ObservationGrid<T>, f: F) -> Array2<T>
where
    F: Fn(Vec2<T>) -> T + Sync,
{
    let mut samples = Array2::zeros(grid.shape());
    Zip::indexed(&mut samples).par_for_each(|(row, col), out| {
        *out = f(grid.point(row, col));
    });
    samples
}

/// Norm-squared of the full spherical-wave superposition, using the exact
/// source-to-pixel distances.
pub fn exact_intensity<T: Real>(
    geom: &PinholeGeometry<T>,
    src: &SourceConfig<T>,
    grid: &ObservationGrid<T>,
) -> Result<Interferogram<T>> {
    validate_inputs(src, grid)?;
    let l = grid.distance;
    // every pixel sits at z = L, so no source is closer than L
    if l < T::lit(1e-6) {
        return Err(Error::GeometryOverlap {
            pinhole: 1,
            distance: l.to_f64_lossy(),
        });
    }
    let sources = geom.positions();
    let k = src.wavenumber;
    let c = src.amplitude;
    let samples = synthesize(grid, |r| {
        let mut h = Complex::new(T::zero(), T::zero());
        let mut v = Complex::new(T::zero(), T::zero());
        for (j, a) in sources.iter().enumerate() {
            let rho = r - *a;
            let rho2 = rho.dot(rho);
            let dist = (l * l + rho2).sqrt();
            // k|R − a_j| minus the common kL, written to avoid cancellation
            let phase = k * rho2 / (dist + l) + src.phases[j];
            let w = Complex::from_polar(c / dist, phase);
            h += w * src.states[j].h();
            v += w * src.states[j].v();
        }
        h.norm_sqr() + v.norm_sqr()
    });
    Interferogram::new(*grid, samples)
}

struct FringeTerm<T> {
    k: Vec2<T>,
    offset: T,
    visibility: T,
}

fn fringe_term<T: Real>(
    geom: &PinholeGeometry<T>,
    src: &SourceConfig<T>,
    grid: &ObservationGrid<T>,
    pair: Pair,
) -> FringeTerm<T> {
    let overlap = src.overlap(pair);
    FringeTerm {
        k: geom.k_vector(pair, src.wavenumber, grid.distance),
        offset: overlap.arg() - src.phase_difference(pair),
        visibility: overlap.norm(),
    }
}

impl<T: Real> FringeTerm<T> {
    /// `P_ij / 2 = 1 + |⟨ψ_i|ψ_j⟩| cos(k_ij·r − φ_ij + arg⟨ψ_i|ψ_j⟩)`
    fn half_value(&self, r: Vec2<T>) -> T {
        T::one() + self.visibility * (self.k.dot(r) + self.offset).cos()
    }
}

/// Paraxial far-field intensity `(C²/L²)(−3 + Σ_cyclic P_ij)`.
pub fn paraxial_intensity<T: Real>(
    geom: &PinholeGeometry<T>,
    src: &SourceConfig<T>,
    grid: &ObservationGrid<T>,
) -> Result<Interferogram<T>> {
    validate_inputs(src, grid)?;
    let terms = Pair::CYCLIC.map(|p| fringe_term(geom, src, grid, p));
    let scale = src.amplitude * src.amplitude / (grid.distance * grid.distance);
    let three = T::lit(3.0);
    let samples = synthesize(grid, |r| {
        let sum: T = terms.iter().map(|t| T::two() * t.half_value(r)).sum();
        // clamp rounding below zero
        (scale * (sum - three)).max(T::zero())
    });
    Interferogram::new(*grid, samples)
}

/// The two-pinhole fringe `P_ij` alone, scaled by `C²/L²`.
pub fn pair_fringe<T: Real>(
    geom: &PinholeGeometry<T>,
    src: &SourceConfig<T>,
    i: usize,
    j: usize,
    grid: &ObservationGrid<T>,
) -> Result<Interferogram<T>> {
    let pair = Pair::new(i, j)?;
    validate_inputs(src, grid)?;
    let term = fringe_term(geom, src, grid, pair);
    let scale = src.amplitude * src.amplitude / (grid.distance * grid.distance);
    let samples = synthesize(grid, |r| scale * T::two() * term.half_value(r));
    Interferogram::new(*grid, samples)
}

/// Margins of the paraxial validity condition `|r − a_j| ≪ (L³/k)^{1/4} ≪ L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidityReport<T> {
    /// `(L³/k)^{1/4}` in meters.
    pub scale: T,
    /// Largest `|r − a_j|` over the grid corners and the three pinholes.
    pub max_offset: T,
    /// `max_offset / scale`.
    pub offset_ratio: T,
    /// `scale / L`.
    pub scale_ratio: T,
    pub threshold: T,
    pub pass: bool,
}

pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.1;

pub fn check_paraxial_validity<T: Real>(
    geom: &PinholeGeometry<T>,
    grid: &ObservationGrid<T>,
    wavenumber: T,
    threshold: T,
) -> ValidityReport<T> {
    let l = grid.distance;
    let scale = (l * l * l / wavenumber).powf(T::lit(0.25));
    let (lo, hi) = grid.bounds();
    let corners = [lo, hi, Vec2::new(lo.x, hi.y), Vec2::new(hi.x, lo.y)];
    let max_offset = corners
        .iter()
        .flat_map(|c| geom.positions().map(|a| (*c - a).norm()))
        .fold(T::zero(), T::max);
    let offset_ratio = max_offset / scale;
    let scale_ratio = scale / l;
    ValidityReport {
        scale,
        max_offset,
        offset_ratio,
        scale_ratio,
        threshold,
        pass: offset_ratio < threshold && scale_ratio < threshold,
    }
}

/// Largest `|a − b|` over the grid divided by the peak of `b`.
pub fn max_relative_deviation<T: Real>(a: &Interferogram<T>, b: &Interferogram<T>) -> T {
    let peak = b.max();
    let worst = Zip::from(&a.samples)
        .and(&b.samples)
        .fold(T::zero(), |m, &x, &y| m.max((x - y).abs()));
    worst / peak
}
