//! Hyperbolic 3-space in the upper half-space model.
//!
//! Points are pairs `(z, t)` with `z` complex and `t > 0`. Orientation
//! preserving isometries are unimodular 2×2 complex matrices acting by the
//! Poincaré extension of their Möbius action.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{acosh_1p, ln_sinh_minus_x, sinh_minus_x};

/// Allowed `|det − 1|` for an [`Isometry`].
pub const DET_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point height must be positive and finite, got {0}")]
    NonPositiveHeight(f64),
    #[error("matrix determinant {0} is not 1 within {DET_TOLERANCE:e}")]
    NotUnimodular(Complex64),
    #[error("matrix is singular or not finite")]
    Singular,
    #[error("sides ({0}, {1}, {2}) do not satisfy the strict triangle inequality")]
    InvalidTriangle(f64, f64, f64),
    #[error("chord endpoints must satisfy -1 < x1 < x2 < 1, got ({0}, {1})")]
    InvalidChord(f64, f64),
    #[error("malformed generator JSON: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    z: Complex64,
    t: f64,
}

impl Point {
    pub fn new(z: Complex64, t: f64) -> Result<Self, GeometryError> {
        if !(t > 0.0 && t.is_finite()) || !z.is_finite() {
            return Err(GeometryError::NonPositiveHeight(t));
        }
        Ok(Self { z, t })
    }

    /// The point `(0, 1)` directly above the origin.
    pub fn origin() -> Self {
        Self {
            z: Complex64::new(0.0, 0.0),
            t: 1.0,
        }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// An element of SL(2, ℂ). `M` and `−M` act identically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Isometry {
    /// Accepts the matrix `[[a, b], [c, d]]` if its determinant is 1 within
    /// [`DET_TOLERANCE`].
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, GeometryError> {
        let m = Self { a, b, c, d };
        if !m.entries().iter().all(|e| e.is_finite()) {
            return Err(GeometryError::Singular);
        }
        let det = m.det();
        if (det - 1.0).norm() > DET_TOLERANCE {
            return Err(GeometryError::NotUnimodular(det));
        }
        Ok(m)
    }

    /// Rescales `[[a, b], [c, d]]` by `1/√det` and then validates it.
    pub fn normalized(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, GeometryError> {
        let det = a * d - b * c;
        if !det.is_finite() || det.norm() == 0.0 {
            return Err(GeometryError::Singular);
        }
        let s = det.sqrt().inv();
        Self::new(a * s, b * s, c * s, d * s)
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, GeometryError> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// `diag(k, 1/k)`.
    pub fn diagonal(k: Complex64) -> Result<Self, GeometryError> {
        if k.norm() == 0.0 || !k.is_finite() {
            return Err(GeometryError::Singular);
        }
        let zero = Complex64::new(0.0, 0.0);
        Ok(Self {
            a: k,
            b: zero,
            c: zero,
            d: k.inv(),
        })
    }

    /// Loxodromic along the vertical axis with the given translation length.
    pub fn translation_along_axis(length: f64) -> Self {
        let k = Complex64::new((length / 2.0).exp(), 0.0);
        Self::diagonal(k).expect("exp is never zero")
    }

    /// `[[1, w], [0, 1]]`.
    pub fn parabolic(w: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            a: one,
            b: w,
            c: Complex64::new(0.0, 0.0),
            d: one,
        }
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// Adjugate; equal to the inverse for unimodular matrices.
    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `h · self · h⁻¹`.
    pub fn conjugate_by(&self, h: &Isometry) -> Self {
        *h * *self * h.inverse()
    }

    /// `self · other · self⁻¹ · other⁻¹`.
    pub fn commutator(&self, other: &Isometry) -> Self {
        *self * *other * self.inverse() * other.inverse()
    }

    /// Largest entrywise distance to `+I` or to `−I`, whichever is nearer.
    pub fn distance_to_identity(&self) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        let to = |s: Complex64| {
            [(self.a - s).norm(), self.b.norm(), self.c.norm(), (self.d - s).norm()]
                .into_iter()
                .fold(0.0, f64::max)
        };
        to(one).min(to(-one))
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, r: Isometry) -> Isometry {
        Isometry {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

/// Hyperbolic distance: `cosh d = 1 + (|Δz|² + Δt²) / (2 t₁ t₂)`.
pub fn distance(p: &Point, q: &Point) -> f64 {
    let dz = (p.z - q.z).norm_sqr();
    let dt = p.t - q.t;
    let u = (dz + dt * dt) / (2.0 * p.t * q.t);
    acosh_1p(u)
}

/// Poincaré extension: `w ↦ (a w + b)(c w + d)⁻¹` with `w = z + t j`.
pub fn apply(g: &Isometry, p: &Point) -> Point {
    let Isometry { a, b, c, d } = *g;
    let t2 = p.t * p.t;
    let cz_d = c * p.z + d;
    let denom = cz_d.norm_sqr() + c.norm_sqr() * t2;
    let z = ((a * p.z + b) * cz_d.conj() + a * c.conj() * t2) / denom;
    Point { z, t: p.t / denom }
}

pub fn displacement(g: &Isometry, p: &Point) -> f64 {
    distance(p, &apply(g, p))
}

/// Volume of a hyperbolic ball of radius `r`: `π(sinh 2r − 2r)`.
pub fn ball_volume(r: f64) -> f64 {
    assert!(r >= 0.0, "ball radius must be nonnegative");
    if r == 0.0 {
        return 0.0;
    }
    PI * sinh_minus_x(2.0 * r)
}

/// `ln` of [`ball_volume`], finite for radii where the volume overflows.
pub fn ball_volume_ln(r: f64) -> f64 {
    assert!(r > 0.0, "ball radius must be positive");
    PI.ln() + ln_sinh_minus_x(2.0 * r)
}

/// A hyperbolic triangle given by its side lengths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triangle {
    a: f64,
    b: f64,
    c: f64,
}

impl Triangle {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, GeometryError> {
        let positive = [a, b, c].iter().all(|s| *s > 0.0 && s.is_finite());
        if !positive || a >= b + c || b >= a + c || c >= a + b {
            return Err(GeometryError::InvalidTriangle(a, b, c));
        }
        Ok(Self { a, b, c })
    }

    pub fn sides(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn shortest_side(&self) -> f64 {
        self.a.min(self.b).min(self.c)
    }

    /// Interior angles opposite `a`, `b`, `c`, from the half-angle form of
    /// the hyperbolic law of cosines:
    /// `tan²(α/2) = sinh(s−b) sinh(s−c) / (sinh s · sinh(s−a))`.
    pub fn angles(&self) -> [f64; 3] {
        let [a, b, c] = self.sides();
        let s = 0.5 * (a + b + c);
        // the differences are formed from the sides directly, not from s
        let sa = 0.5 * (b + c - a);
        let sb = 0.5 * (a + c - b);
        let sc = 0.5 * (a + b - c);
        let half = |x: f64, y: f64, opp: f64| {
            2.0 * ((x.sinh() * y.sinh()) / (s.sinh() * opp.sinh())).sqrt().atan()
        };
        [half(sb, sc, sa), half(sa, sc, sb), half(sa, sb, sc)]
    }

    /// Interior angles from `cos α = (cosh b cosh c − cosh a) / (sinh b sinh c)`,
    /// with the cosine clamped to `[−1, 1]`. Loses accuracy for thin
    /// triangles; [`Triangle::angles`] does not.
    pub fn angles_law_of_cosines(&self) -> [f64; 3] {
        let [a, b, c] = self.sides();
        let angle = |opp: f64, x: f64, y: f64| {
            let cos = (x.cosh() * y.cosh() - opp.cosh()) / (x.sinh() * y.sinh());
            cos.clamp(-1.0, 1.0).acos()
        };
        [angle(a, b, c), angle(b, a, c), angle(c, a, b)]
    }
}

/// Angle defect `π − α − β − γ`.
pub fn triangle_area(t: &Triangle) -> f64 {
    let [x, y, z] = t.angles();
    PI - x - y - z
}

/// Area of the triangle with one ideal vertex cut off by the chord of the
/// unit semicircle between abscissae `x1 < x2`: `arcsin x₂ − arcsin x₁`.
pub fn ideal_cap_area(x1: f64, x2: f64) -> Result<f64, GeometryError> {
    if !(-1.0 < x1 && x1 < x2 && x2 < 1.0) {
        return Err(GeometryError::InvalidChord(x1, x2));
    }
    Ok(x2.asin() - x1.asin())
}

/// `|tr(X)² − 4| + |tr(X Y X⁻¹ Y⁻¹) − 2|`. At least 1 whenever `⟨X, Y⟩` is
/// discrete and non-elementary.
pub fn jorgensen_value(x: &Isometry, y: &Isometry) -> f64 {
    let tr = x.trace();
    (tr * tr - 4.0).norm() + (x.commutator(y).trace() - 2.0).norm()
}

/// A pair of generators and the basepoint their displacements are measured
/// from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorPair {
    pub x: Isometry,
    pub y: Isometry,
    pub basepoint: Point,
}

impl GeneratorPair {
    pub fn new(x: Isometry, y: Isometry) -> Self {
        Self {
            x,
            y,
            basepoint: Point::origin(),
        }
    }

    pub fn with_basepoint(mut self, p: Point) -> Self {
        self.basepoint = p;
        self
    }

    /// `max(d(P, xP), d(P, yP))`.
    pub fn max_displacement(&self) -> f64 {
        displacement(&self.x, &self.basepoint).max(displacement(&self.y, &self.basepoint))
    }

    /// Parses `{"x": [[re,im]×4], "y": [[re,im]×4]}` with entries `a, b, c, d`
    /// row-major, plus an optional `"basepoint": {"z": [re,im], "t": t}`.
    /// Each matrix is rescaled to determinant 1.
    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        let raw: GeneratorJson =
            serde_json::from_str(text).map_err(|e| GeometryError::Json(e.to_string()))?;
        let matrix = |m: &[[f64; 2]; 4]| {
            let [a, b, c, d] = m.map(|[re, im]| Complex64::new(re, im));
            Isometry::normalized(a, b, c, d)
        };
        let mut pair = GeneratorPair::new(matrix(&raw.x)?, matrix(&raw.y)?);
        if let Some(bp) = raw.basepoint {
            pair.basepoint = Point::new(Complex64::new(bp.z[0], bp.z[1]), bp.t)?;
        }
        Ok(pair)
    }

    pub fn to_json(&self) -> String {
        let flat = |m: &Isometry| m.entries().map(|e| [e.re, e.im]);
        let raw = GeneratorJson {
            x: flat(&self.x),
            y: flat(&self.y),
            basepoint: Some(BasepointJson {
                z: [self.basepoint.z.re, self.basepoint.z.im],
                t: self.basepoint.t,
            }),
        };
        serde_json::to_string(&raw).expect("plain numeric struct")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorJson {
    x: [[f64; 2]; 4],
    y: [[f64; 2]; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basepoint: Option<BasepointJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasepointJson {
    z: [f64; 2],
    t: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(re: f64, im: f64, t: f64) -> Point {
        Point::new(c(re, im), t).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert!((distance(&pt(0.0, 0.0, 1.0), &pt(0.0, 0.0, E)) - 1.0).abs() < 1e-15);
        let p = pt(0.3, -2.0, 0.7);
        assert_eq!(distance(&p, &p), 0.0);
        let d = distance(&pt(0.0, 0.0, 1.0), &pt(3.0, 4.0, 1.0));
        assert!((d - 13.5f64.acosh()).abs() < 1e-14);
    }

    #[test]
    fn apply_examples() {
        let p = pt(0.25, 0.5, 2.0);
        let q = apply(&Isometry::identity(), &p);
        assert_eq!(q, p);

        let q = apply(&Isometry::translation_along_axis(1.0), &Point::origin());
        assert!(q.z().norm() < 1e-15 && (q.t() - E).abs() < 1e-14);

        let q = apply(&Isometry::parabolic(c(1.0, 0.0)), &Point::origin());
        assert!((q.z() - c(1.0, 0.0)).norm() < 1e-15 && (q.t() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn apply_matches_inversion() {
        // z ↦ -1/z sends (0, t) to (0, 1/t)
        let s = Isometry::from_real(0.0, -1.0, 1.0, 0.0).unwrap();
        let q = apply(&s, &pt(0.0, 0.0, 4.0));
        assert!(q.z().norm() < 1e-15 && (q.t() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn displacement_examples() {
        assert_eq!(displacement(&Isometry::identity(), &pt(1.0, 1.0, 3.0)), 0.0);
        let d = displacement(&Isometry::translation_along_axis(1.0), &Point::origin());
        assert!((d - 1.0).abs() < 1e-14);
        for t in [0.5, 1.0, 3.0] {
            let d = displacement(&Isometry::parabolic(c(1.0, 0.0)), &pt(0.0, 0.0, t));
            let expected = (1.0 + 1.0 / (2.0 * t * t)).acosh();
            assert!((d - expected).abs() < 1e-14, "t = {t}");
        }
    }

    #[test]
    fn tiny_displacement_is_not_lost() {
        let d = displacement(&Isometry::parabolic(c(1e-10, 0.0)), &Point::origin());
        assert!((d / 1e-10 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ball_volume_examples() {
        assert_eq!(ball_volume(0.0), 0.0);
        assert!((ball_volume(0.052) / 0.000589 - 1.0).abs() < 1e-3);
        assert!((ball_volume(1.0) - PI * (2f64.sinh() - 2.0)).abs() < 1e-14);
        assert!((ball_volume_ln(1.0) - ball_volume(1.0).ln()).abs() < 1e-14);
        assert!(ball_volume_ln(1e6).is_finite());
    }

    #[test]
    fn equilateral_triangle_with_known_angles() {
        // dual law of cosines: cosh a = cos α / (1 − cos α)
        let alpha = PI / 5.0;
        let side = (alpha.cos() / (1.0 - alpha.cos())).acosh();
        let t = Triangle::new(side, side, side).unwrap();
        for angle in t.angles() {
            assert!((angle - alpha).abs() < 1e-14);
        }
        assert!((triangle_area(&t) - 2.0 * PI / 5.0).abs() < 1e-14);
    }

    #[test]
    fn small_equilateral_triangles_degenerate_to_zero_area() {
        let areas: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&l| triangle_area(&Triangle::new(l, l, l).unwrap()))
            .collect();
        assert!(areas.windows(2).all(|w| w[1] < w[0]));
        // Euclidean limit √3/4 · ℓ²
        assert!((areas[3] / (3f64.sqrt() / 4.0 * 1e-8) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn area_bounded_by_shortest_side() {
        let t = Triangle::new(0.104, 3.0, 3.05).unwrap();
        assert!(triangle_area(&t) < 0.104);
    }

    #[test]
    fn triangle_rejects_bad_sides() {
        assert!(Triangle::new(1.0, 2.0, 3.0).is_err());
        assert!(Triangle::new(0.0, 1.0, 1.0).is_err());
        assert!(Triangle::new(f64::NAN, 1.0, 1.0).is_err());
        assert!(Triangle::new(1.0, 1.0, 1.9).is_ok());
    }

    #[test]
    fn law_of_cosines_agrees_on_fat_triangles() {
        let t = Triangle::new(1.0, 1.5, 2.0).unwrap();
        for (x, y) in t.angles().iter().zip(t.angles_law_of_cosines()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn ideal_cap_examples() {
        assert!((ideal_cap_area(0.0, 0.5).unwrap() - PI / 6.0).abs() < 1e-15);
        let eps = 1e-12;
        assert!((ideal_cap_area(-1.0 + eps, 1.0 - eps).unwrap() - PI).abs() < 1e-5);
        let v = ideal_cap_area(-0.3, 0.7).unwrap();
        assert!((v - (0.7f64.asin() + 0.3f64.asin())).abs() < 1e-15);
        assert!(ideal_cap_area(0.5, 0.5).is_err());
        assert!(ideal_cap_area(-1.0, 0.5).is_err());
        assert!(ideal_cap_area(0.5, 0.2).is_err());
    }

    #[test]
    fn jorgensen_examples() {
        let id = Isometry::identity();
        assert_eq!(jorgensen_value(&id, &id), 0.0);

        let k = 1.7;
        let x = Isometry::diagonal(c(k, 0.0)).unwrap();
        let expected = ((k + 1.0 / k).powi(2) - 4.0).abs();
        assert!((jorgensen_value(&x, &x) - expected).abs() < 1e-13);

        // figure-eight: tr[X, Y] = 2 + ω², |ω²| = 1
        let omega = c(-0.5, 3f64.sqrt() / 2.0);
        let x = Isometry::parabolic(c(1.0, 0.0));
        let y = Isometry::new(c(1.0, 0.0), c(0.0, 0.0), omega, c(1.0, 0.0)).unwrap();
        let tr = x.commutator(&y).trace();
        assert!((tr - (2.0 + omega * omega)).norm() < 1e-15);
        assert!((jorgensen_value(&x, &y) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn isometry_construction() {
        assert!(Isometry::from_real(2.0, 0.0, 0.0, 1.0).is_err());
        let m = Isometry::normalized(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)).unwrap();
        assert!((m.det() - 1.0).norm() < 1e-15);
        assert!(Isometry::normalized(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).is_err());
        let neg = Isometry::from_real(-1.0, 0.0, 0.0, -1.0).unwrap();
        assert_eq!(neg.distance_to_identity(), 0.0);
    }

    #[test]
    fn generator_json_roundtrip() {
        let text = r#"{"x": [[1,0],[1,0],[0,0],[1,0]], "y": [[1,0],[0,0],[0,1],[1,0]]}"#;
        let pair = GeneratorPair::from_json(text).unwrap();
        assert_eq!(pair.x, Isometry::parabolic(c(1.0, 0.0)));
        assert_eq!(pair.basepoint, Point::origin());
        let again = GeneratorPair::from_json(&pair.to_json()).unwrap();
        assert_eq!(again, pair);

        assert!(GeneratorPair::from_json("{\"x\": 1}").is_err());
        let singular = r#"{"x": [[1,0],[1,0],[1,0],[1,0]], "y": [[1,0],[0,0],[0,0],[1,0]]}"#;
        assert_eq!(GeneratorPair::from_json(singular), Err(GeometryError::Singular));
    }
}
