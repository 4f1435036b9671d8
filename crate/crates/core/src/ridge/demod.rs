//! Complex demodulation of a single known-frequency fringe.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::ridge::filter::FilteredField;
use crate::scalar::{canonical, CompensatedSum, Real};

/// Window weighting applied inside the demodulation rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Taper {
    Rectangular,
    /// Separable Hann taper; suppresses leakage from non-integer periods
    /// and from residual neighbouring families.
    #[default]
    Hann,
}

/// Rectangular pixel region `[row_start, row_end) × [col_start, col_end)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DemodWindow {
    pub row_start: usize,
    pub row_end: usize,
    pub col_start: usize,
    pub col_end: usize,
    pub taper: Taper,
}

impl DemodWindow {
    /// Whole grid minus `margin` pixels on each side (where one-sided
    /// boundary differences live).
    pub fn interior(nx: usize, ny: usize, margin: usize, taper: Taper) -> Self {
        let m = margin.min(nx / 2 - 1).min(ny / 2 - 1);
        Self {
            row_start: m,
            row_end: ny - m,
            col_start: m,
            col_end: nx - m,
            taper,
        }
    }

    fn weights<T: Real>(start: usize, end: usize, taper: Taper) -> Vec<T> {
        let n = end - start;
        match taper {
            Taper::Rectangular => vec![T::one(); n],
            Taper::Hann => (0..n)
                .map(|i| {
                    // periodic Hann over the window length
                    let x = T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(n);
                    (T::one() - x.cos()) / T::two()
                })
                .collect(),
        }
    }
}

/// Demodulated fringe: ridge maxima sit on `k·r = delta + 2πn`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Demodulation<T> {
    pub delta: T,
    pub amplitude: T,
}

/// Correlates `field` with `e^{−i k·r}` over `window`.
///
/// For `field = A cos(k·r − δ)` this returns `delta = δ` (in `[0, 2π)`) and
/// `amplitude ≈ A`. The sum runs row-major with compensated accumulation, so
/// the result does not depend on thread scheduling.
pub fn demodulate_phase<T: Real>(field: &FilteredField<T>, k: Vec2<T>, window: &DemodWindow) -> Result<Demodulation<T>> {
    let grid = &field.grid;
    let (ny, nx) = field.samples.dim();
    if window.row_end > ny || window.col_end > nx || window.row_start >= window.row_end || window.col_start >= window.col_end {
        return Err(Error::WindowTooSmall { periods: 0.0 });
    }
    let width = grid.x(window.col_end - 1) - grid.x(window.col_start);
    let height = grid.y(window.row_end - 1) - grid.y(window.row_start);
    let periods = (k.x.abs() * width + k.y.abs() * height) / T::TAU();
    if periods < T::two() {
        return Err(Error::WindowTooSmall {
            periods: periods.to_f64_lossy(),
        });
    }

    let wr: Vec<T> = DemodWindow::weights(window.row_start, window.row_end, window.taper);
    let wc: Vec<T> = DemodWindow::weights(window.col_start, window.col_end, window.taper);
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut weight = CompensatedSum::new();
    let mut energy = CompensatedSum::new();
    for (ri, row) in (window.row_start..window.row_end).enumerate() {
        let y = grid.y(row);
        for (ci, col) in (window.col_start..window.col_end).enumerate() {
            let w = wr[ri] * wc[ci];
            let v = field.samples[[row, col]];
            let phase = k.x * grid.x(col) + k.y * y;
            re.add(w * v * phase.cos());
            im.add(-w * v * phase.sin());
            weight.add(w);
            energy.add(w * v * v);
        }
    }
    let z = Complex::new(re.value(), im.value());
    let wsum = weight.value();
    let rms = (energy.value() / wsum).sqrt();
    let level = z.norm() / wsum;
    if !(level > T::lit(1e-6) * rms) {
        return Err(Error::ZeroAmplitude(0, 0, (level / rms).to_f64_lossy()));
    }
    Ok(Demodulation {
        delta: canonical(-z.arg()),
        amplitude: T::two() * level,
    })
}
