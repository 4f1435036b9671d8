//! Ridge-line families and the triangles they cut out of the plane.
//!
//! A family with wavevector `k` and offset `delta` is the set of lines
//! `k·r = delta + 2πn`. Three families whose wavevectors sum to zero tile the
//! plane with hexagons and two congruence classes of elemental triangles.
//! A triangle bounded by lines with offsets `c12, c23, c31` has area
//! `(c12 + c23 + c31)² / (2 |k12 × k23|)`, which for `k_ij = k(a_i − a_j)/L`
//! is `L²/(4k²S₀)·(Δ3 − 2πn)²`.

use crate::error::{Error, Result};
use crate::geometry::{Pair, Vec2};
use crate::interferometer::ObservationGrid;
use crate::scalar::{canonical, Real};

/// Axis-aligned region; membership is closed on the low edge and open on
/// the high edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region<T> {
    pub min: Vec2<T>,
    pub max: Vec2<T>,
}

impl<T: Real> Region<T> {
    pub fn new(min: Vec2<T>, max: Vec2<T>) -> Self {
        Self { min, max }
    }

    /// Rectangle spanned by the grid's pixel centers.
    pub fn from_grid(grid: &ObservationGrid<T>) -> Self {
        let (min, max) = grid.bounds();
        Self { min, max }
    }

    pub fn contains(&self, p: Vec2<T>) -> bool {
        p.x >= self.min.x && p.x < self.max.x && p.y >= self.min.y && p.y < self.max.y
    }

    pub fn corners(&self) -> [Vec2<T>; 4] {
        [
            self.min,
            Vec2::new(self.max.x, self.min.y),
            self.max,
            Vec2::new(self.min.x, self.max.y),
        ]
    }
}

/// One set of parallel ridge lines `k·r = delta + 2πn`, `n ∈ [n_min, n_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RidgeLineFamily<T> {
    pub pair: Pair,
    pub k: Vec2<T>,
    /// In `[0, 2π)`.
    pub delta: T,
    pub n_min: i64,
    pub n_max: i64,
}

impl<T: Real> RidgeLineFamily<T> {
    /// Line offset `delta + 2πn`.
    pub fn offset(&self, n: i64) -> T {
        self.delta + T::TAU() * T::lit(n as f64)
    }

    /// Perpendicular distance between neighbouring lines.
    pub fn spacing(&self) -> T {
        T::TAU() / self.k.norm()
    }

    /// Unit vector along the lines.
    pub fn direction(&self) -> Vec2<T> {
        self.k.perp().scale(self.k.norm().recip())
    }

    pub fn line_count(&self) -> usize {
        (self.n_max - self.n_min + 1).max(0) as usize
    }

    /// Indices `n` with `delta + 2πn` strictly between `lo` and `hi`.
    fn lines_strictly_between(&self, lo: T, hi: T) -> bool {
        let first = ((lo - self.delta) / T::TAU()).floor() + T::one();
        self.delta + T::TAU() * first < hi
    }
}

/// Enumerates the lines of a family crossing `region`. A line whose offset
/// equals the minimum of `k·r` over the region is included; one equal to the
/// maximum is not.
pub fn build_ridge_family<T: Real>(pair: Pair, k: Vec2<T>, delta: T, region: &Region<T>) -> RidgeLineFamily<T> {
    let values = region.corners().map(|c| k.dot(c));
    let lo = values.iter().copied().fold(T::infinity(), T::min);
    let hi = values.iter().copied().fold(T::neg_infinity(), T::max);
    let delta = canonical(delta);
    let tau = T::TAU();
    let n_min = ((lo - delta) / tau).ceil();
    let n_max = ((hi - delta) / tau).ceil() - T::one();
    RidgeLineFamily {
        pair,
        k,
        delta,
        n_min: n_min.to_i64().unwrap_or(0),
        n_max: n_max.to_i64().unwrap_or(-1),
    }
}

/// Intersection of `k1·r = c1` and `k2·r = c2`.
pub fn intersect<T: Real>(k1: Vec2<T>, c1: T, k2: Vec2<T>, c2: T) -> Option<Vec2<T>> {
    let det = k1.cross(k2);
    if det == T::zero() {
        return None;
    }
    Some(Vec2::new((c1 * k2.y - c2 * k1.y) / det, (k1.x * c2 - k2.x * c1) / det))
}

/// Shoelace area (unsigned).
pub fn shoelace_area<T: Real>(v: &[Vec2<T>; 3]) -> T {
    ((v[1] - v[0]).cross(v[2] - v[0]) / T::two()).abs()
}

/// Triangle bounded by one line from each family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RidgeTriangle<T> {
    pub vertices: [Vec2<T>; 3],
    /// Line indices `[n12, n23, n31]` within their families.
    pub lines: [i64; 3],
    /// Class label in the `(Δ3 − 2πn)²` area law, with `Δ3 ∈ [0, 2π)`.
    pub n: i64,
    pub area: T,
    pub elemental: bool,
}

impl<T: Real> RidgeTriangle<T> {
    pub fn centroid(&self) -> Vec2<T> {
        let [a, b, c] = self.vertices;
        (a + b + c).scale(T::lit(3.0).recip())
    }
}

/// Label offset `m` such that triangle class `n = n12 + n23 + n31 + m`.
fn label_offset<T: Real>(families: &[RidgeLineFamily<T>; 3]) -> i64 {
    let sum = families[0].delta + families[1].delta + families[2].delta;
    let delta3 = canonical(-sum);
    ((sum + delta3) / T::TAU()).round().to_i64().unwrap_or(0)
}

fn is_elemental<T: Real>(families: &[RidgeLineFamily<T>; 3], vertices: &[Vec2<T>; 3]) -> bool {
    families.iter().all(|f| {
        let vals = vertices.map(|v| f.k.dot(v));
        let lo = vals.iter().copied().fold(T::infinity(), T::min);
        let hi = vals.iter().copied().fold(T::neg_infinity(), T::max);
        // a tolerance keeps the triangle's own edge lines from counting
        let eps = T::lit(1e-9) * (T::one() + lo.abs().max(hi.abs()));
        !f.lines_strictly_between(lo + eps, hi - eps)
    })
}

/// Builds the triangle for line indices `[n12, n23, n31]`.
pub fn triangle_for_lines<T: Real>(families: &[RidgeLineFamily<T>; 3], lines: [i64; 3]) -> Option<RidgeTriangle<T>> {
    let c = [0, 1, 2].map(|i| families[i].offset(lines[i]));
    let k = families.map(|f| f.k);
    let v0 = intersect(k[0], c[0], k[1], c[1])?;
    let v1 = intersect(k[1], c[1], k[2], c[2])?;
    let v2 = intersect(k[2], c[2], k[0], c[0])?;
    let vertices = [v0, v1, v2];
    Some(RidgeTriangle {
        vertices,
        lines,
        n: lines.iter().sum::<i64>() + label_offset(families),
        area: shoelace_area(&vertices),
        elemental: is_elemental(families, &vertices),
    })
}

/// Default threshold on `|Δ3| mod 2π` below which the lattice is near-concurrent.
pub const NEAR_DEGENERATE_PHASE: f64 = 1e-3;
/// Triangles smaller than `(DEGENERATE_AREA_FRACTION × spacing)²` are discarded.
pub const DEGENERATE_AREA_FRACTION: f64 = 1e-4;

/// Elemental triangles found in a region.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleSet<T> {
    pub triangles: Vec<RidgeTriangle<T>>,
    /// Δ3 implied by the three family offsets, in `[0, 2π)`.
    pub delta3: T,
    /// True when Δ3 is within [`NEAR_DEGENERATE_PHASE`] of 0 mod 2π.
    pub near_degenerate: bool,
}

impl<T: Real> TriangleSet<T> {
    pub fn class(&self, n: i64) -> impl Iterator<Item = &RidgeTriangle<T>> {
        self.triangles.iter().filter(move |t| t.n == n)
    }

    /// Mean area of class `n`, if any triangle of that class was found.
    pub fn class_area(&self, n: i64) -> Option<T> {
        let (sum, count) = self.class(n).fold((T::zero(), 0usize), |(s, c), t| (s + t.area, c + 1));
        (count > 0).then(|| sum / T::from_usize_lossy(count))
    }

    /// Largest relative deviation from the class mean.
    pub fn class_spread(&self, n: i64) -> Option<T> {
        let mean = self.class_area(n)?;
        Some(self.class(n).fold(T::zero(), |m, t| m.max((t.area - mean).abs() / mean)))
    }
}

/// All elemental triangles whose three vertices lie inside `region`.
///
/// Degenerate (near-zero area) triangles are dropped; the `near_degenerate`
/// flag reports when that happens to a whole class.
pub fn ridge_triangles<T: Real>(families: &[RidgeLineFamily<T>; 3], region: &Region<T>) -> TriangleSet<T> {
    let sum = families[0].delta + families[1].delta + families[2].delta;
    let delta3 = canonical(-sum);
    let near_degenerate = delta3.min(T::TAU() - delta3) < T::lit(NEAR_DEGENERATE_PHASE);
    let spacing = families.iter().map(|f| f.spacing()).fold(T::infinity(), T::min);
    let min_area = (T::lit(DEGENERATE_AREA_FRACTION) * spacing).powi(2);

    let [f12, f23, f31] = families;
    let tau = T::TAU();
    let mut triangles = Vec::new();
    for n12 in f12.n_min..=f12.n_max {
        for n23 in f23.n_min..=f23.n_max {
            // elemental triangles have |c12 + c23 + c31| < 2π: at most two n31
            let partial = f12.offset(n12) + f23.offset(n23) + f31.delta;
            let centre = (-partial / tau).floor().to_i64().unwrap_or(0);
            for n31 in centre - 1..=centre + 2 {
                if n31 < f31.n_min - 1 || n31 > f31.n_max + 1 {
                    continue;
                }
                let Some(t) = triangle_for_lines(families, [n12, n23, n31]) else {
                    continue;
                };
                if t.elemental && t.area >= min_area && t.vertices.iter().all(|&v| region.contains(v)) {
                    triangles.push(t);
                }
            }
        }
    }
    TriangleSet {
        triangles,
        delta3,
        near_degenerate,
    }
}

/// Like [`ridge_triangles`] but refuses a near-concurrent lattice.
pub fn elemental_triangles<T: Real>(families: &[RidgeLineFamily<T>; 3], region: &Region<T>) -> Result<Vec<RidgeTriangle<T>>> {
    let set = ridge_triangles(families, region);
    if set.near_degenerate {
        return Err(Error::DegenerateLattice {
            delta3: set.delta3.to_f64_lossy(),
        });
    }
    Ok(set.triangles)
}

/// `|Δ3 − 2πn| = (2k/L)·√(S·S₀)` from a ridge-triangle area `S`.
pub fn recover_delta3<T: Real>(area: T, pinhole_area: T, wavenumber: T, distance: T) -> T {
    T::two() * wavenumber / distance * (area.max(T::zero()) * pinhole_area).sqrt()
}

/// Δ3 candidate from the area of class `n ∈ {0, 1}`: `x` for `n = 0`,
/// `2π − x` for `n = 1`.
pub fn delta3_from_class_area<T: Real>(area: T, n: i64, pinhole_area: T, wavenumber: T, distance: T) -> T {
    let x = recover_delta3(area, pinhole_area, wavenumber, distance);
    if n == 0 {
        x
    } else {
        T::TAU() * T::lit(n as f64) - x
    }
}

/// `Δ3 = −(δ12 + δ23 + δ31)` in `[0, 2π)`; local phases cancel cyclically.
pub fn delta3_from_phases<T: Real>(delta12: T, delta23: T, delta31: T) -> T {
    canonical(-(delta12 + delta23 + delta31))
}

/// `L²/(4k²S₀)·(Δ3 − 2πn)²`.
pub fn area_law<T: Real>(delta3: T, n: i64, pinhole_area: T, wavenumber: T, distance: T) -> T {
    let d = delta3 - T::TAU() * T::lit(n as f64);
    distance * distance / (T::lit(4.0) * wavenumber * wavenumber * pinhole_area) * d * d
}
