//! Detector model: optional Poisson shot noise and integer quantization.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::interferometer::{Interferogram, ObservationGrid};
use crate::scalar::Real;

/// Poisson shot noise with `mean_counts` expected photo-electrons per pixel
/// at the image's mean intensity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub seed: u64,
    pub mean_counts: f64,
}

/// Quantized detector frame with the same orientation as [`Interferogram`].
#[derive(Clone, Debug, PartialEq)]
pub struct RasterImage {
    pub grid: ObservationGrid<f64>,
    pub bit_depth: u32,
    pub pixels: Array2<u16>,
}

impl RasterImage {
    pub fn maxval(&self) -> u16 {
        max_value(self.bit_depth)
    }

    /// Pixel values divided by full scale.
    pub fn to_interferogram(&self) -> Interferogram<f64> {
        let full = f64::from(self.maxval());
        Interferogram {
            grid: self.grid,
            samples: self.pixels.mapv(|p| f64::from(p) / full),
        }
    }
}

fn max_value(bit_depth: u32) -> u16 {
    if bit_depth >= 16 {
        u16::MAX
    } else {
        (1u16 << bit_depth) - 1
    }
}

/// Scales `img` linearly to `[0, 2^bit_depth − 1]` by its maximum.
///
/// With `noise`, each pixel is first replaced by a Poisson draw whose mean is
/// `mean_counts · p / mean(p)`; draws run in row-major order from a ChaCha8
/// stream seeded with `noise.seed`.
pub fn quantize<T: Real>(img: &Interferogram<T>, bit_depth: u32, noise: Option<&NoiseSpec>) -> Result<RasterImage> {
    if bit_depth != 8 && bit_depth != 16 {
        return Err(Error::UnsupportedBitDepth(bit_depth));
    }
    let mut values = img.samples.mapv(|v| v.to_f64_lossy().max(0.0));
    let peak = values.iter().fold(0.0_f64, |m, &v| m.max(v));
    if !(peak > 0.0) {
        return Err(Error::EmptyImage);
    }
    if let Some(spec) = noise {
        if !(spec.mean_counts > 0.0) || !spec.mean_counts.is_finite() {
            return Err(Error::InvalidNoise(format!("mean counts must be positive, got {}", spec.mean_counts)));
        }
        let mean = values.sum() / values.len() as f64;
        let scale = spec.mean_counts / mean;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        for v in values.iter_mut() {
            let lambda = *v * scale;
            *v = if lambda > 0.0 {
                Poisson::new(lambda)
                    .map_err(|e| Error::InvalidNoise(e.to_string()))?
                    .sample(&mut rng)
            } else {
                0.0
            };
        }
    }
    let peak = values.iter().fold(0.0_f64, |m, &v| m.max(v));
    if !(peak > 0.0) {
        return Err(Error::EmptyImage);
    }
    let full = f64::from(max_value(bit_depth));
    let pixels = values.mapv(|v| (v / peak * full).round() as u16);
    Ok(RasterImage {
        grid: img.grid.to_f64(),
        bit_depth,
        pixels,
    })
}
