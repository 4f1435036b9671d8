//! File formats.
//!
//! * PGM (P5), maxval 255 or 65535 (16-bit samples big-endian as the format
//!   requires). The first image row is the top of the field (largest `y`).
//!   One comment line carries grid metadata:
//!   `# ridgephase L=<m> dx=<m> dy=<m> k=<rad/m> cx=<m> cy=<m>`.
//! * Interferogram CSV: header `x,y,intensity`, one row per pixel, row-major
//!   from the lower-left corner.
//! * Interferogram binary, all little-endian:
//!
//!   | offset | size     | content                                    |
//!   |--------|----------|--------------------------------------------|
//!   | 0      | 8        | magic `RPHASE01`                           |
//!   | 8      | 8 + 8    | `nx`, `ny` as u64                          |
//!   | 24     | 6 × 8    | `dx, dy, cx, cy, L, k` as f64              |
//!   | 72     | 6 × 8    | pinholes `a1x a1y a2x a2y a3x a3y` as f64  |
//!   | 120    | nx·ny·8  | samples as f64, row-major from lower left  |
//!
//! * Ridge families CSV: `pair,k_x,k_y,delta,n_min,n_max`.
//! * Ridge triangles CSV: `x1,y1,x2,y2,x3,y3,n,area,elemental`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::geometry::{PinholeGeometry, Vec2};
use crate::interferometer::{Interferogram, ObservationGrid};
use crate::raster::RasterImage;
use crate::ridge::{RidgeLineFamily, RidgeTriangle};
use crate::scalar::wrap_pi;

pub const MAGIC: &[u8; 8] = b"RPHASE01";
const HEADER_LEN: usize = 120;

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Metadata carried in the PGM comment line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldMetadata {
    pub distance: f64,
    pub dx: f64,
    pub dy: f64,
    pub wavenumber: f64,
    pub center: Vec2<f64>,
}

impl FieldMetadata {
    pub fn new(grid: &ObservationGrid<f64>, wavenumber: f64) -> Self {
        Self {
            distance: grid.distance,
            dx: grid.dx,
            dy: grid.dy,
            wavenumber,
            center: grid.center,
        }
    }

    fn comment(&self) -> String {
        format!(
            "# ridgephase L={} dx={} dy={} k={} cx={} cy={}",
            self.distance, self.dx, self.dy, self.wavenumber, self.center.x, self.center.y
        )
    }

    /// Parses the `key=value` pairs of a comment line.
    pub fn parse_comment(line: &str) -> Option<Self> {
        let body = line.trim_start_matches('#').trim();
        let rest = body.strip_prefix("ridgephase")?;
        let get = |key: &str| -> Option<f64> {
            rest.split_whitespace()
                .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
                .and_then(|v| v.parse().ok())
        };
        Some(Self {
            distance: get("L")?,
            dx: get("dx")?,
            dy: get("dy")?,
            wavenumber: get("k")?,
            center: Vec2::new(get("cx")?, get("cy")?),
        })
    }
}

pub fn encode_pgm(raster: &RasterImage, meta: &FieldMetadata) -> Vec<u8> {
    let (ny, nx) = raster.pixels.dim();
    let maxval = raster.maxval();
    let mut out = format!("P5\n{}\n{} {}\n{}\n", meta.comment(), nx, ny, maxval).into_bytes();
    for row in (0..ny).rev() {
        for col in 0..nx {
            let p = raster.pixels[[row, col]];
            if maxval > 255 {
                out.extend_from_slice(&p.to_be_bytes());
            } else {
                out.push(p as u8);
            }
        }
    }
    out
}

pub fn write_pgm(path: &Path, raster: &RasterImage, meta: &FieldMetadata) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(&encode_pgm(raster, meta)).map_err(|e| Error::io(path, e))?;
    finish(path, w)
}

/// Decodes a P5 image written by [`encode_pgm`]. Returns the pixels in field
/// orientation together with the metadata comment, if present.
pub fn decode_pgm(bytes: &[u8]) -> Result<(Array2<u16>, u16, Option<FieldMetadata>)> {
    let mut pos = 0;
    let mut meta = None;
    let mut tokens: Vec<String> = Vec::new();
    while tokens.len() < 4 {
        // skip whitespace, collecting comments
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            return Err(Error::Format("truncated PGM header".into()));
        }
        if bytes[pos] == b'#' {
            let end = bytes[pos..].iter().position(|&b| b == b'\n').map_or(bytes.len(), |e| pos + e);
            let line = String::from_utf8_lossy(&bytes[pos..end]);
            meta = meta.or_else(|| FieldMetadata::parse_comment(&line));
            pos = end;
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if tokens[0] != "P5" {
        return Err(Error::Format(format!("expected P5 magic, found {:?}", tokens[0])));
    }
    let parse = |t: &str| t.parse::<usize>().map_err(|_| Error::Format(format!("bad PGM header field {t:?}")));
    let (nx, ny, maxval) = (parse(&tokens[1])?, parse(&tokens[2])?, parse(&tokens[3])?);
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("bad maxval {maxval}")));
    }
    pos += 1;
    let width = if maxval > 255 { 2 } else { 1 };
    let data = &bytes[pos.min(bytes.len())..];
    if data.len() < nx * ny * width {
        return Err(Error::Format("truncated PGM data".into()));
    }
    let pixels = Array2::from_shape_fn((ny, nx), |(row, col)| {
        let i = ((ny - 1 - row) * nx + col) * width;
        if width == 2 {
            u16::from_be_bytes([data[i], data[i + 1]])
        } else {
            u16::from(data[i])
        }
    });
    Ok((pixels, maxval as u16, meta))
}

pub fn write_interferogram_csv(path: &Path, img: &Interferogram<f64>) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "x,y,intensity").map_err(io)?;
    let (ny, nx) = img.samples.dim();
    for row in 0..ny {
        for col in 0..nx {
            let p = img.grid.point(row, col);
            writeln!(w, "{:e},{:e},{:e}", p.x, p.y, img.samples[[row, col]]).map_err(io)?;
        }
    }
    finish(path, w)
}

/// Interferogram plus the physical parameters needed to analyse it.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferogramFile {
    pub image: Interferogram<f64>,
    pub wavenumber: f64,
    pub pinholes: [Vec2<f64>; 3],
}

impl InterferogramFile {
    pub fn geometry(&self) -> Result<PinholeGeometry<f64>> {
        let [a, b, c] = self.pinholes;
        PinholeGeometry::new(a, b, c)
    }
}

pub fn encode_binary(file: &InterferogramFile) -> Vec<u8> {
    let g = &file.image.grid;
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * file.image.samples.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.nx as u64).to_le_bytes());
    out.extend_from_slice(&(g.ny as u64).to_le_bytes());
    for v in [g.dx, g.dy, g.center.x, g.center.y, g.distance, file.wavenumber] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for p in file.pinholes {
        out.extend_from_slice(&p.x.to_le_bytes());
        out.extend_from_slice(&p.y.to_le_bytes());
    }
    // standard layout is row-major already
    for v in file.image.samples.iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<InterferogramFile> {
    if bytes.len() < 8 || &bytes[..8] != MAGIC {
        return Err(Error::Format("missing RPHASE01 magic".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!("header truncated at {} bytes", bytes.len())));
    }
    let u = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    let f = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    let nx = usize::try_from(u(8)).map_err(|_| Error::Format("nx out of range".into()))?;
    let ny = usize::try_from(u(16)).map_err(|_| Error::Format("ny out of range".into()))?;
    let count = nx
        .checked_mul(ny)
        .filter(|c| c.checked_mul(8).is_some())
        .ok_or_else(|| Error::Format("grid size overflows".into()))?;
    let expected = HEADER_LEN + count * 8;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "expected {expected} bytes for a {nx}x{ny} grid, found {}",
            bytes.len()
        )));
    }
    let grid = ObservationGrid::new(f(56), nx, ny, f(24), f(32), Vec2::new(f(40), f(48)))
        .map_err(|e| Error::Format(e.to_string()))?;
    let wavenumber = f(64);
    let pinholes = [0, 1, 2].map(|j| Vec2::new(f(72 + 16 * j), f(80 + 16 * j)));
    let samples = Array2::from_shape_fn((ny, nx), |(r, c)| f(HEADER_LEN + 8 * (r * nx + c)));
    Ok(InterferogramFile {
        image: Interferogram { grid, samples },
        wavenumber,
        pinholes,
    })
}

pub fn write_binary(path: &Path, file: &InterferogramFile) -> Result<()> {
    std::fs::write(path, encode_binary(file)).map_err(|e| Error::io(path, e))
}

pub fn read_binary(path: &Path) -> Result<InterferogramFile> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    decode_binary(&bytes)
}

pub fn write_families_csv(path: &Path, families: &[RidgeLineFamily<f64>]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "pair,k_x,k_y,delta,n_min,n_max").map_err(io)?;
    for f in families {
        writeln!(w, "{},{:e},{:e},{:e},{},{}", f.pair.label(), f.k.x, f.k.y, f.delta, f.n_min, f.n_max).map_err(io)?;
    }
    finish(path, w)
}

pub fn write_triangles_csv(path: &Path, triangles: &[RidgeTriangle<f64>]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "x1,y1,x2,y2,x3,y3,n,area,elemental").map_err(io)?;
    for t in triangles {
        let [a, b, c] = t.vertices;
        writeln!(
            w,
            "{:e},{:e},{:e},{:e},{:e},{:e},{},{:e},{}",
            a.x, a.y, b.x, b.y, c.x, c.y, t.n, t.area, t.elemental
        )
        .map_err(io)?;
    }
    finish(path, w)
}

/// Copy of `raster` with ridge-line pixels set to 0.
pub fn render_overlay(raster: &RasterImage, families: &[RidgeLineFamily<f64>]) -> RasterImage {
    let grid = raster.grid;
    let half_pixel = 0.5 * grid.dx.max(grid.dy);
    let mut out = raster.clone();
    for ((row, col), p) in out.pixels.indexed_iter_mut() {
        let r = grid.point(row, col);
        let on_line = families.iter().any(|f| {
            let distance = wrap_pi(f.k.dot(r) - f.delta).abs() / f.k.norm();
            distance < half_pixel
        });
        if on_line {
            *p = 0;
        }
    }
    out
}
