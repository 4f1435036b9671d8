use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate state triple: |<psi_{0}|psi_{1}>| is below the 1e-9 threshold")]
    DegenerateTriple(usize, usize),

    #[error("degenerate point triple on the sphere: points {0} and {1} coincide or are antipodal")]
    DegenerateSphericalTriangle(usize, usize),

    #[error("state is not normalized: |psi|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("pinholes are collinear (triangle area {area:e} m^2); three non-collinear pinholes are required")]
    CollinearPinholes { area: f64 },

    #[error("observation point coincides with pinhole {pinhole} (distance {distance:e} m)")]
    GeometryOverlap { pinhole: usize, distance: f64 },

    #[error("pinhole pair ({0}, {1}) is invalid; indices must be distinct and in 1..=3")]
    BadPinholePair(usize, usize),

    #[error("invalid observation grid: {0}")]
    InvalidGrid(String),

    #[error("invalid source configuration: {0}")]
    InvalidSource(String),

    #[error("grid is {nx}x{ny}; at least 3 samples per axis are needed")]
    GridTooSmall { nx: usize, ny: usize },

    #[error("demodulation window spans {periods:.2} fringe periods along k; at least 2 are needed")]
    WindowTooSmall { periods: f64 },

    #[error("no fringe found for pair ({0}, {1}): estimated visibility {2:e} (orthogonal states?)")]
    ZeroAmplitude(usize, usize, f64),

    #[error("degenerate ridge lattice: Δ3 = {delta3:.6} rad is within the near-zero band; ridge lines are concurrent")]
    DegenerateLattice { delta3: f64 },

    #[error("image is empty (all samples zero)")]
    EmptyImage,

    #[error("unsupported bit depth {0}; use 8 or 16")]
    UnsupportedBitDepth(u32),

    #[error("invalid noise specification: {0}")]
    InvalidNoise(String),

    #[error("file format error: {0}")]
    Format(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("nothing to run: {0}")]
    EmptyRun(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
