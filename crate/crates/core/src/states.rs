//! Polarization-state algebra: Jones vectors, inner products, the three-vertex
//! Bargmann invariant and its phase, and the Poincaré-sphere picture.
//!
//! Stokes convention: `s1` is the H/V axis, `s2` the diagonal axis and `s3`
//! the circular axis, with `s3 = 2 Im(conj(h) v)`. Under this convention the
//! experiment's first state `(√3|H⟩ + i|V⟩)/2` sits at latitude +60° on the
//! prime meridian (north), the second at latitude −60°, and the linear state
//! `cos θ|H⟩ + sin θ|V⟩` on the equator at longitude 2θ.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{canonical, wrap_pi, Real};

/// Complex amplitude on the H/V basis.
pub type ComplexAmplitude<T> = Complex<T>;

/// Inner products below this magnitude make the Bargmann phase undefined.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

fn norm_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(16.0))
}

/// Pure polarization state `h|H⟩ + v|V⟩` with unit norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesVector<T> {
    h: Complex<T>,
    v: Complex<T>,
}

impl<T: Real> JonesVector<T> {
    /// Builds a state from components that must already be unit-norm.
    pub fn new(h: Complex<T>, v: Complex<T>) -> Result<Self> {
        let norm_sqr = h.norm_sqr() + v.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - T::one()).abs() > norm_tolerance::<T>() {
            return Err(Error::NotNormalized {
                norm_sqr: norm_sqr.to_f64_lossy(),
            });
        }
        Ok(Self { h, v })
    }

    /// Builds a state by normalizing arbitrary non-zero components.
    pub fn normalized(h: Complex<T>, v: Complex<T>) -> Result<Self> {
        let norm_sqr = h.norm_sqr() + v.norm_sqr();
        if !norm_sqr.is_finite() || norm_sqr <= T::zero() {
            return Err(Error::NotNormalized {
                norm_sqr: norm_sqr.to_f64_lossy(),
            });
        }
        let scale = norm_sqr.sqrt().recip();
        Ok(Self {
            h: h * scale,
            v: v * scale,
        })
    }

    pub fn horizontal() -> Self {
        Self {
            h: Complex::new(T::one(), T::zero()),
            v: Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn vertical() -> Self {
        Self {
            h: Complex::new(T::zero(), T::zero()),
            v: Complex::new(T::one(), T::zero()),
        }
    }

    /// Linear polarization at angle `theta` from horizontal.
    pub fn linear(theta: T) -> Self {
        Self {
            h: Complex::new(theta.cos(), T::zero()),
            v: Complex::new(theta.sin(), T::zero()),
        }
    }

    pub fn h(&self) -> Complex<T> {
        self.h
    }

    pub fn v(&self) -> Complex<T> {
        self.v
    }

    pub fn norm_sqr(&self) -> T {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    /// The same ray with a global U(1) factor `e^{iα}` applied.
    pub fn with_phase(&self, alpha: T) -> Self {
        let u = Complex::from_polar(T::one(), alpha);
        Self {
            h: self.h * u,
            v: self.v * u,
        }
    }
}

/// `⟨a|b⟩ = conj(a_h) b_h + conj(a_v) b_v`.
pub fn inner_product<T: Real>(a: &JonesVector<T>, b: &JonesVector<T>) -> ComplexAmplitude<T> {
    a.h.conj() * b.h + a.v.conj() * b.v
}

/// Fringe visibility `|⟨a|b⟩|` of the two-beam pattern, clamped to `[0, 1]`.
pub fn visibility<T: Real>(a: &JonesVector<T>, b: &JonesVector<T>) -> T {
    inner_product(a, b).norm().min(T::one())
}

/// Three-vertex Bargmann invariant `⟨a|b⟩⟨b|c⟩⟨c|a⟩`.
pub fn bargmann_invariant<T: Real>(
    a: &JonesVector<T>,
    b: &JonesVector<T>,
    c: &JonesVector<T>,
) -> ComplexAmplitude<T> {
    inner_product(a, b) * inner_product(b, c) * inner_product(c, a)
}

/// Pancharatnam phase Δ3 = arg⟨a|b⟩⟨b|c⟩⟨c|a⟩, in `[0, 2π)`.
///
/// Fails with [`Error::DegenerateTriple`] when any pairwise overlap is at or
/// below [`DEGENERACY_TOLERANCE`]. Pair indices in the error are 1-based.
pub fn pancharatnam_phase<T: Real>(
    a: &JonesVector<T>,
    b: &JonesVector<T>,
    c: &JonesVector<T>,
) -> Result<T> {
    let tol = T::lit(DEGENERACY_TOLERANCE);
    let pairs = [
        (1, 2, inner_product(a, b)),
        (2, 3, inner_product(b, c)),
        (3, 1, inner_product(c, a)),
    ];
    for &(i, j, z) in &pairs {
        if z.norm() <= tol {
            return Err(Error::DegenerateTriple(i, j));
        }
    }
    let product = pairs[0].2 * pairs[1].2 * pairs[2].2;
    Ok(canonical(product.arg()))
}

/// Point on the unit Poincaré sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StokesPoint<T> {
    pub s1: T,
    pub s2: T,
    pub s3: T,
}

impl<T: Real> StokesPoint<T> {
    /// Builds a point, projecting onto the unit sphere.
    pub fn new(s1: T, s2: T, s3: T) -> Self {
        let n = (s1 * s1 + s2 * s2 + s3 * s3).sqrt();
        Self {
            s1: s1 / n,
            s2: s2 / n,
            s3: s3 / n,
        }
    }

    pub fn dot(&self, o: &Self) -> T {
        self.s1 * o.s1 + self.s2 * o.s2 + self.s3 * o.s3
    }

    pub fn cross(&self, o: &Self) -> [T; 3] {
        [
            self.s2 * o.s3 - self.s3 * o.s2,
            self.s3 * o.s1 - self.s1 * o.s3,
            self.s1 * o.s2 - self.s2 * o.s1,
        ]
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    /// Latitude in radians, positive toward `+s3`.
    pub fn latitude(&self) -> T {
        self.s3.asin()
    }

    /// Longitude in radians measured from `+s1` toward `+s2`.
    pub fn longitude(&self) -> T {
        self.s2.atan2(self.s1)
    }
}

/// Maps a state to its Stokes point; `|H⟩` goes to `(1, 0, 0)`.
pub fn to_stokes<T: Real>(a: &JonesVector<T>) -> StokesPoint<T> {
    let hv = a.h.conj() * a.v;
    StokesPoint::new(
        a.h.norm_sqr() - a.v.norm_sqr(),
        T::two() * hv.re,
        T::two() * hv.im,
    )
}

/// Oriented solid angle Ω of the geodesic triangle `p → q → r`.
///
/// Ω = −2·atan2(p·(q×r), 1 + p·q + q·r + r·p), so Ω lies in `[−2π, 2π]` and
/// is positive when the vertices run clockwise seen from outside the sphere.
/// With this orientation the Pancharatnam phase of the corresponding states
/// satisfies Δ3 ≡ −Ω/2 (mod 2π).
pub fn spherical_triangle_solid_angle<T: Real>(
    p: &StokesPoint<T>,
    q: &StokesPoint<T>,
    r: &StokesPoint<T>,
) -> Result<T> {
    let limit = -T::one() + T::lit(1e-9);
    for (i, j, d) in [(1, 2, p.dot(q)), (2, 3, q.dot(r)), (3, 1, r.dot(p))] {
        if d <= limit {
            return Err(Error::DegenerateSphericalTriangle(i, j));
        }
    }
    let qr = q.cross(r);
    let triple = p.s1 * qr[0] + p.s2 * qr[1] + p.s3 * qr[2];
    let denom = T::one() + p.dot(q) + q.dot(r) + r.dot(p);
    Ok(-T::two() * triple.atan2(denom))
}

/// The three states of the experiment: left `(√3|H⟩ + i|V⟩)/2`,
/// right `(i√3|H⟩ + |V⟩)/2`, upper `cos θ|H⟩ + sin θ|V⟩`.
pub fn paper_states<T: Real>(theta: T) -> [JonesVector<T>; 3] {
    let half = T::lit(0.5);
    let root3_2 = T::lit(3.0).sqrt() * half;
    let zero = T::zero();
    [
        JonesVector {
            h: Complex::new(root3_2, zero),
            v: Complex::new(zero, half),
        },
        JonesVector {
            h: Complex::new(zero, root3_2),
            v: Complex::new(half, zero),
        },
        JonesVector::linear(theta),
    ]
}

/// Analytic Δ3 for the experiment's states at polarizer angle `theta`,
/// in `[0, 2π)`.
///
/// For these states the Bargmann invariant equals `(√3 cos θ + i sin θ)²/16`,
/// so Δ3 = 2·atan(tan θ/√3) taken on the continuous branch.
pub fn delta3_theory<T: Real>(theta: T) -> Result<T> {
    let [a, b, c] = paper_states(theta);
    pancharatnam_phase(&a, &b, &c)
}

/// Δ3 along a sweep of ordered angles, unwrapped so consecutive samples
/// never jump by more than π. The first sample is canonical.
pub fn delta3_theory_sweep<T: Real>(thetas: &[T]) -> Result<Vec<T>> {
    let raw = thetas
        .iter()
        .map(|&t| delta3_theory(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(unwrap_phases(&raw))
}

/// Removes 2π jumps between neighbouring samples.
pub fn unwrap_phases<T: Real>(values: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(values.len());
    for &v in values {
        match out.last() {
            None => out.push(v),
            Some(&prev) => out.push(prev + wrap_pi(v - prev)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2, TAU};

    use crate::scalar::circular_distance;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn state(hr: f64, hi: f64, vr: f64, vi: f64) -> JonesVector<f64> {
        JonesVector::normalized(c(hr, hi), c(vr, vi)).unwrap()
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(matches!(
            JonesVector::new(c(1.0, 0.0), c(1.0, 0.0)),
            Err(Error::NotNormalized { .. })
        ));
        assert!(JonesVector::<f64>::normalized(c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let psi = state(0.3, -0.2, 0.5, 0.9);
        let z = inner_product(&psi, &psi);
        assert_abs_diff_eq!(z.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-12);

        let h = JonesVector::<f64>::horizontal();
        let v = JonesVector::<f64>::vertical();
        assert_eq!(inner_product(&h, &v), c(0.0, 0.0));

        // (√3·i√3 + (−i)·1)/4 = i/2
        let [p1, p2, _] = paper_states(0.3_f64);
        let z = inner_product(&p1, &p2);
        assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn visibility_examples() {
        let psi = state(1.0, 2.0, -0.5, 0.1);
        assert_abs_diff_eq!(visibility(&psi, &psi), 1.0, epsilon = 1e-12);
        assert_eq!(
            visibility(&JonesVector::<f64>::horizontal(), &JonesVector::vertical()),
            0.0
        );
        let [p1, p2, _] = paper_states(1.0_f64);
        assert_abs_diff_eq!(visibility(&p1, &p2), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn pancharatnam_examples() {
        let psi = state(0.2, 0.1, -0.4, 0.7);
        assert_abs_diff_eq!(pancharatnam_phase(&psi, &psi, &psi).unwrap(), 0.0, epsilon = 1e-12);

        let other = state(0.9, 0.0, 0.1, 0.3);
        let back = pancharatnam_phase(&psi, &other, &psi).unwrap();
        assert!(circular_distance(back, 0.0) < 1e-12);

        let [a, b, cc] = paper_states(FRAC_PI_2);
        assert_abs_diff_eq!(pancharatnam_phase(&a, &b, &cc).unwrap(), PI, epsilon = 1e-12);

        let h = JonesVector::<f64>::horizontal();
        let d = state(1.0, 0.0, 1.0, 0.0);
        let r = state(1.0, 0.0, 0.0, 1.0);
        assert_abs_diff_eq!(pancharatnam_phase(&h, &d, &r).unwrap(), FRAC_PI_4, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_triple() {
        let h = JonesVector::<f64>::horizontal();
        let v = JonesVector::<f64>::vertical();
        let d = state(1.0, 0.0, 1.0, 0.0);
        assert!(matches!(
            pancharatnam_phase(&h, &v, &d),
            Err(Error::DegenerateTriple(1, 2))
        ));
        assert!(matches!(
            pancharatnam_phase(&d, &h, &v),
            Err(Error::DegenerateTriple(2, 3))
        ));
    }

    #[test]
    fn stokes_examples() {
        let s = to_stokes(&JonesVector::<f64>::horizontal());
        assert_eq!((s.s1, s.s2, s.s3), (1.0, 0.0, 0.0));

        for theta in [0.0_f64, 0.4, 1.2, 2.9] {
            let [p1, p2, p3] = paper_states(theta);
            let s3 = to_stokes(&p3);
            assert_abs_diff_eq!(s3.s1, (2.0 * theta).cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(s3.s2, (2.0 * theta).sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(s3.s3, 0.0, epsilon = 1e-12);

            let s1 = to_stokes(&p1);
            assert_abs_diff_eq!(s1.latitude(), PI / 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(s1.longitude(), 0.0, epsilon = 1e-12);
            let s2 = to_stokes(&p2);
            assert_abs_diff_eq!(s2.latitude(), -PI / 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(s2.longitude(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn solid_angle_examples() {
        let p = StokesPoint::new(0.3, -0.4, 0.8);
        assert_abs_diff_eq!(spherical_triangle_solid_angle(&p, &p, &p).unwrap(), 0.0);

        let x = StokesPoint::new(1.0_f64, 0.0, 0.0);
        let y = StokesPoint::new(0.0, 1.0, 0.0);
        let z = StokesPoint::new(0.0, 0.0, 1.0);
        let omega = spherical_triangle_solid_angle(&x, &y, &z).unwrap();
        assert_abs_diff_eq!(omega.abs(), FRAC_PI_2, epsilon = 1e-12);
        let reversed = spherical_triangle_solid_angle(&x, &z, &y).unwrap();
        assert_abs_diff_eq!(reversed, -omega, epsilon = 1e-12);

        let [a, b, cc] = paper_states(FRAC_PI_2);
        let omega = spherical_triangle_solid_angle(&to_stokes(&a), &to_stokes(&b), &to_stokes(&cc))
            .unwrap();
        assert!(circular_distance(-omega / 2.0, PI) < 1e-12);

        let mx = StokesPoint::new(-1.0, 0.0, 0.0);
        assert!(matches!(
            spherical_triangle_solid_angle(&x, &mx, &y),
            Err(Error::DegenerateSphericalTriangle(1, 2))
        ));
    }

    #[test]
    fn paper_states_limits() {
        let [_, _, s] = paper_states(0.0_f64);
        assert_eq!(s, JonesVector::horizontal());
        let [_, _, s] = paper_states(FRAC_PI_2);
        assert_abs_diff_eq!(s.h().re, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(s.v().re, 1.0, epsilon = 1e-16);
        for t in [0.0, 0.7, 2.0, 5.0] {
            for s in paper_states(t) {
                assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn delta3_theory_values() {
        assert_abs_diff_eq!(delta3_theory(0.0_f64).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(delta3_theory(FRAC_PI_2).unwrap(), PI, epsilon = 1e-12);
        // closed form with the factor of two
        for deg in (1..180).step_by(7) {
            let t = (deg as f64).to_radians();
            let closed = canonical(2.0 * (t.tan() / 3.0_f64.sqrt()).atan());
            assert!(circular_distance(delta3_theory(t).unwrap(), closed) < 1e-12, "{deg}");
        }
        // the single-angle form misses the factor of two
        let single = (FRAC_PI_2 - 1e-9).tan() / 3.0_f64.sqrt();
        assert!((single.atan() - PI).abs() > 1.0);
    }

    #[test]
    fn delta3_sweep_is_monotone() {
        let thetas: Vec<f64> = (0..=1790).map(|i| (i as f64 * 0.1).to_radians()).collect();
        let sweep = delta3_theory_sweep(&thetas).unwrap();
        assert_eq!(sweep[0], 0.0);
        for w in sweep.windows(2) {
            assert!(w[1] > w[0]);
            assert!(w[1] - w[0] < 0.01);
        }
        assert!(*sweep.last().unwrap() > TAU - 0.03 && *sweep.last().unwrap() < TAU);
    }

    #[test]
    fn generic_over_f32() {
        let [a, b, cc] = paper_states(std::f32::consts::FRAC_PI_2);
        let d = pancharatnam_phase(&a, &b, &cc).unwrap();
        assert!((d - std::f32::consts::PI).abs() < 1e-5);
    }

    fn arb_state() -> impl Strategy<Value = JonesVector<f64>> {
        (-1.0..1.0, -1.0..1.0, -1.0..1.0, -1.0..1.0)
            .prop_filter("non-zero", |(a, b, c, d): &(f64, f64, f64, f64)| {
                a * a + b * b + c * c + d * d > 1e-3
            })
            .prop_map(|(a, b, c, d)| state(a, b, c, d))
    }

    fn well_separated(a: &JonesVector<f64>, b: &JonesVector<f64>, c: &JonesVector<f64>) -> bool {
        visibility(a, b) > 1e-3 && visibility(b, c) > 1e-3 && visibility(c, a) > 1e-3
    }

    proptest! {
        #[test]
        fn gauge_invariance(a in arb_state(), b in arb_state(), c in arb_state(),
                            al in -10.0..10.0, be in -10.0..10.0, ga in -10.0..10.0) {
            prop_assume!(well_separated(&a, &b, &c));
            let base = pancharatnam_phase(&a, &b, &c).unwrap();
            let shifted = pancharatnam_phase(&a.with_phase(al), &b.with_phase(be), &c.with_phase(ga)).unwrap();
            prop_assert!(circular_distance(base, shifted) < 1e-12);
        }

        #[test]
        fn cyclic_and_conjugation(a in arb_state(), b in arb_state(), c in arb_state()) {
            prop_assume!(well_separated(&a, &b, &c));
            let abc = pancharatnam_phase(&a, &b, &c).unwrap();
            prop_assert!(circular_distance(abc, pancharatnam_phase(&b, &c, &a).unwrap()) < 1e-12);
            prop_assert!(circular_distance(abc, pancharatnam_phase(&c, &a, &b).unwrap()) < 1e-12);
            prop_assert!(circular_distance(-abc, pancharatnam_phase(&a, &c, &b).unwrap()) < 1e-12);
        }

        #[test]
        fn decomposition_into_pairwise_args(a in arb_state(), b in arb_state(), c in arb_state()) {
            prop_assume!(well_separated(&a, &b, &c));
            let sum = inner_product(&a, &b).arg() + inner_product(&b, &c).arg() + inner_product(&c, &a).arg();
            prop_assert!(circular_distance(pancharatnam_phase(&a, &b, &c).unwrap(), sum) < 1e-12);
        }

        #[test]
        fn stokes_norm_and_phase_invariance(a in arb_state(), al in -10.0..10.0) {
            let s = to_stokes(&a);
            prop_assert!((s.norm() - 1.0).abs() < 1e-12);
            let t = to_stokes(&a.with_phase(al));
            prop_assert!((s.s1 - t.s1).abs() < 1e-12);
            prop_assert!((s.s2 - t.s2).abs() < 1e-12);
            prop_assert!((s.s3 - t.s3).abs() < 1e-12);
        }

        #[test]
        fn solid_angle_relation(a in arb_state(), b in arb_state(), c in arb_state()) {
            prop_assume!(well_separated(&a, &b, &c));
            let d3 = pancharatnam_phase(&a, &b, &c).unwrap();
            let omega = spherical_triangle_solid_angle(&to_stokes(&a), &to_stokes(&b), &to_stokes(&c)).unwrap();
            prop_assert!(circular_distance(d3, -omega / 2.0) < 1e-9);
        }
    }

    #[test]
    fn inner_product_bounded() {
        let a = state(1.0, 1.0, 1.0, 1.0);
        let b = state(SQRT_2, 0.0, 0.0, SQRT_2);
        assert!(inner_product(&a, &b).norm() <= 1.0 + 1e-12);
    }
}
