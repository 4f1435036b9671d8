//! Pinhole geometry: source positions, wavevector differences `k_ij` and the
//! transverse vectors `b_i` used to annihilate fringe families.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Plain 2-vector in the source or observation plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Vec2<T> {
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    /// `e_z × self`.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<T: Real> Add for Vec2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> Neg for Vec2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<T: Real> Mul<T> for Vec2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

/// Ordered pinhole pair `(i, j)` with 1-based indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pair {
    i: usize,
    j: usize,
}

impl Pair {
    /// The three cyclic pairs (1,2), (2,3), (3,1).
    pub const CYCLIC: [Pair; 3] = [Pair { i: 1, j: 2 }, Pair { i: 2, j: 3 }, Pair { i: 3, j: 1 }];

    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i == j || !(1..=3).contains(&i) || !(1..=3).contains(&j) {
            return Err(Error::BadPinholePair(i, j));
        }
        Ok(Self { i, j })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    /// The remaining pinhole index.
    pub fn other(&self) -> usize {
        6 - self.i - self.j
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.i, self.j)
    }
}

impl std::fmt::Display for Pair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// Three pinholes in the source plane, stored relative to their circumcenter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PinholeGeometry<T> {
    positions: [Vec2<T>; 3],
    circumcenter: Vec2<T>,
}

impl<T: Real> PinholeGeometry<T> {
    /// Accepts any non-collinear triangle; coordinates are shifted so the
    /// circumcenter is the origin (and lies on the optical axis).
    pub fn new(a1: Vec2<T>, a2: Vec2<T>, a3: Vec2<T>) -> Result<Self> {
        let twice_area = (a2 - a1).cross(a3 - a1);
        let scale = (a2 - a1).norm().max((a3 - a1).norm()).max((a3 - a2).norm());
        if !twice_area.is_finite() || twice_area.abs() <= T::lit(1e-12) * scale * scale {
            return Err(Error::CollinearPinholes {
                area: (twice_area / T::two()).abs().to_f64_lossy(),
            });
        }
        // circumcenter relative to a1
        let b = a2 - a1;
        let c = a3 - a1;
        let d = T::two() * b.cross(c);
        let b2 = b.dot(b);
        let c2 = c.dot(c);
        let ux = (c.y * b2 - b.y * c2) / d;
        let uy = (b.x * c2 - c.x * b2) / d;
        let center = a1 + Vec2::new(ux, uy);
        Ok(Self {
            positions: [a1 - center, a2 - center, a3 - center],
            circumcenter: center,
        })
    }

    /// Equilateral triangle of side `side`: pinhole 1 lower left, 2 lower
    /// right, 3 on top.
    pub fn equilateral(side: T) -> Result<Self> {
        let half = side / T::two();
        let h = side * T::lit(3.0).sqrt() / T::two();
        Self::new(
            Vec2::new(-half, T::zero()),
            Vec2::new(half, T::zero()),
            Vec2::new(T::zero(), h),
        )
    }

    /// Positions `a_1, a_2, a_3` relative to the circumcenter.
    pub fn positions(&self) -> [Vec2<T>; 3] {
        self.positions
    }

    pub fn position(&self, index: usize) -> Vec2<T> {
        self.positions[index - 1]
    }

    /// Circumcenter in the caller's original coordinates.
    pub fn circumcenter(&self) -> Vec2<T> {
        self.circumcenter
    }

    /// Common distance `a` of the pinholes from the circumcenter.
    pub fn circumradius(&self) -> T {
        self.positions[0].norm()
    }

    /// Triangle area `S₀`.
    pub fn area(&self) -> T {
        let [a1, a2, a3] = self.positions;
        ((a2 - a1).cross(a3 - a1) / T::two()).abs()
    }

    /// `k_ij = k (a_i − a_j) / L`.
    pub fn k_vector(&self, pair: Pair, wavenumber: T, distance: T) -> Vec2<T> {
        (self.position(pair.i) - self.position(pair.j)).scale(wavenumber / distance)
    }

    /// `[k_12, k_23, k_31]`.
    pub fn k_vectors(&self, wavenumber: T, distance: T) -> [Vec2<T>; 3] {
        Pair::CYCLIC.map(|p| self.k_vector(p, wavenumber, distance))
    }

    /// `b_i = e_z × (a_j − a_k)` for `(i, j, k)` cyclic; orthogonal to `k_jk`.
    pub fn b_vector(&self, i: usize) -> Vec2<T> {
        let j = i % 3 + 1;
        let k = j % 3 + 1;
        (self.position(j) - self.position(k)).perp()
    }

    pub fn b_vectors(&self) -> [Vec2<T>; 3] {
        [1, 2, 3].map(|i| self.b_vector(i))
    }

    /// Pinhole separation `|a_i − a_j|`.
    pub fn separation(&self, pair: Pair) -> T {
        (self.position(pair.i) - self.position(pair.j)).norm()
    }
}
