//! Directional finite-difference filters.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::geometry::{Pair, PinholeGeometry, Vec2};
use crate::interferometer::{Interferogram, ObservationGrid};
use crate::scalar::Real;

/// Real field on an observation grid; may take negative values.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredField<T> {
    pub grid: ObservationGrid<T>,
    pub samples: Array2<T>,
}

/// Anything sampled on an [`ObservationGrid`].
pub trait SampledField<T> {
    fn grid(&self) -> &ObservationGrid<T>;
    fn samples(&self) -> ArrayView2<'_, T>;
}

impl<T> SampledField<T> for Interferogram<T> {
    fn grid(&self) -> &ObservationGrid<T> {
        &self.grid
    }
    fn samples(&self) -> ArrayView2<'_, T> {
        self.samples.view()
    }
}

impl<T> SampledField<T> for FilteredField<T> {
    fn grid(&self) -> &ObservationGrid<T> {
        &self.grid
    }
    fn samples(&self) -> ArrayView2<'_, T> {
        self.samples.view()
    }
}

impl<T: Real> FilteredField<T> {
    pub fn rms(&self) -> T {
        let n = T::from_usize_lossy(self.samples.len());
        (self.samples.iter().map(|&v| v * v).sum::<T>() / n).sqrt()
    }
}

/// Derivative along one axis of a 1-D lane: central differences inside,
/// second-order one-sided differences at both ends.
fn diff_lane<T: Real>(get: impl Fn(usize) -> T, n: usize, h: T, mut put: impl FnMut(usize, T)) {
    let two_h = T::two() * h;
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    put(0, (-three * get(0) + four * get(1) - get(2)) / two_h);
    for i in 1..n - 1 {
        put(i, (get(i + 1) - get(i - 1)) / two_h);
    }
    put(n - 1, (three * get(n - 1) - four * get(n - 2) + get(n - 3)) / two_h);
}

/// `(b·∇) field` by finite differences: `b_x ∂/∂x + b_y ∂/∂y`.
pub fn directional_derivative<T: Real, F: SampledField<T>>(field: &F, b: Vec2<T>) -> Result<FilteredField<T>> {
    let grid = *field.grid();
    let src = field.samples();
    let (ny, nx) = src.dim();
    if nx < 3 || ny < 3 {
        return Err(Error::GridTooSmall { nx, ny });
    }
    let mut out = Array2::zeros((ny, nx));
    if b.x != T::zero() {
        for row in 0..ny {
            diff_lane(|c| src[[row, c]], nx, grid.dx, |c, d| out[[row, c]] += b.x * d);
        }
    }
    if b.y != T::zero() {
        for col in 0..nx {
            diff_lane(|r| src[[r, col]], ny, grid.dy, |r, d| out[[r, col]] += b.y * d);
        }
    }
    Ok(FilteredField { grid, samples: out })
}

/// Interior response of the central-difference operator `b·∇` to
/// `e^{i q·r}`, divided by `i`: `b_x sin(q_x dx)/dx + b_y sin(q_y dy)/dy`.
pub fn derivative_gain<T: Real>(b: Vec2<T>, q: Vec2<T>, grid: &ObservationGrid<T>) -> T {
    b.x * (q.x * grid.dx).sin() / grid.dx + b.y * (q.y * grid.dy).sin() / grid.dy
}

/// Isolates the oscillating part of `P_ij` by applying `b_i·∇` then `b_j·∇`.
/// The `P_jk` family is annihilated by `b_i ⊥ k_jk` and `P_ki` by `b_j ⊥ k_ki`.
pub fn isolate_fringe<T: Real, F: SampledField<T>>(
    img: &F,
    geom: &PinholeGeometry<T>,
    pair: Pair,
) -> Result<FilteredField<T>> {
    let first = directional_derivative(img, geom.b_vector(pair.i()))?;
    directional_derivative(&first, geom.b_vector(pair.j()))
}

/// Net interior gain of [`isolate_fringe`] on `cos(k_ij·r + ψ)`; positive for
/// any non-degenerate geometry at sub-Nyquist fringe frequencies.
pub fn isolation_gain<T: Real>(geom: &PinholeGeometry<T>, pair: Pair, k_ij: Vec2<T>, grid: &ObservationGrid<T>) -> T {
    -derivative_gain(geom.b_vector(pair.i()), k_ij, grid) * derivative_gain(geom.b_vector(pair.j()), k_ij, grid)
}
