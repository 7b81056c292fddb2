//! Upper half-plane geometry: points, Möbius transformations, axes and
//! unit-speed geodesic frames.

mod surface;

pub use surface::{build_surface, DomainSide, SchottkyGenerator, SurfaceGroup, SurfaceKind, SurfaceSpec};

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::word::Word;

/// Point of the upper half-plane, `y > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        debug_assert!(y > 0.0, "point below the real axis: y = {y}");
        Point { x, y }
    }

    pub fn i() -> Self {
        Point { x: 0.0, y: 1.0 }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Point::new(z.re, z.im)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// Hyperbolic distance.
    pub fn distance(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let chord = (dx * dx + dy * dy).sqrt();
        2.0 * (chord / (2.0 * (self.y * other.y).sqrt())).asinh()
    }
}

/// Point of the ideal boundary `ℝ ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Boundary {
    Finite(f64),
    Infinity,
}

impl Boundary {
    pub fn approx_eq(self, other: Boundary, tol: f64) -> bool {
        match (self, other) {
            (Boundary::Infinity, Boundary::Infinity) => true,
            (Boundary::Finite(a), Boundary::Finite(b)) => (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())),
            (Boundary::Finite(a), Boundary::Infinity) | (Boundary::Infinity, Boundary::Finite(a)) => a.abs() > 1.0 / tol,
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Finite(x) => write!(f, "{x}"),
            Boundary::Infinity => write!(f, "∞"),
        }
    }
}

/// Real 2×2 matrix acting by `z ↦ (az + b)/(cz + d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mobius {
    pub const IDENTITY: Mobius = Mobius { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mobius { a, b, c, d }
    }

    pub fn diag(lambda: f64) -> Self {
        Mobius::new(lambda, 0.0, 0.0, 1.0 / lambda)
    }

    /// Elliptic rotation about `i`; turns tangent vectors at `i` by `angle`.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        Mobius::new(c, s, -s, c)
    }

    /// `z ↦ y z + x`, sending `i` to `(x, y)`.
    pub fn affine_to(p: Point) -> Self {
        let s = p.y.sqrt();
        Mobius::new(s, p.x / s, 0.0, 1.0 / s)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Mobius {
        let det = self.det();
        Mobius::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    /// Rescales to determinant one.
    pub fn to_sl2(&self) -> Mobius {
        let s = self.det().sqrt();
        Mobius::new(self.a / s, self.b / s, self.c / s, self.d / s)
    }

    /// `±` representative with non-negative trace.
    pub fn sign_normalized(&self) -> Mobius {
        if self.trace() < 0.0 {
            Mobius::new(-self.a, -self.b, -self.c, -self.d)
        } else {
            *self
        }
    }

    pub fn conj_by(&self, h: &Mobius) -> Mobius {
        *h * *self * h.inverse()
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    pub fn apply(&self, p: Point) -> Point {
        let w = self.apply_complex(p.to_complex());
        debug_assert!(w.im > 0.0, "Möbius image left the half-plane");
        Point { x: w.re, y: w.im }
    }

    /// Complex derivative `1/(cz + d)²` (determinant one assumed).
    pub fn derivative(&self, p: Point) -> Complex64 {
        let den = p.to_complex() * self.c + self.d;
        Complex64::new(self.det(), 0.0) / (den * den)
    }

    /// Pushes a tangent vector at `p` forward.
    pub fn push_vector(&self, p: Point, v: Complex64) -> Complex64 {
        self.derivative(p) * v
    }

    pub fn apply_boundary(&self, xi: Boundary) -> Boundary {
        match xi {
            Boundary::Infinity => {
                if self.c == 0.0 {
                    Boundary::Infinity
                } else {
                    Boundary::Finite(self.a / self.c)
                }
            }
            Boundary::Finite(x) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    Boundary::Infinity
                } else {
                    Boundary::Finite((self.a * x + self.b) / den)
                }
            }
        }
    }

    pub fn max_abs_diff(&self, other: &Mobius) -> f64 {
        [self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Distance to `±other` in max-norm.
    pub fn projective_diff(&self, other: &Mobius) -> f64 {
        let neg = Mobius::new(-other.a, -other.b, -other.c, -other.d);
        self.max_abs_diff(other).min(self.max_abs_diff(&neg))
    }
}

impl Mul for Mobius {
    type Output = Mobius;

    fn mul(self, o: Mobius) -> Mobius {
        Mobius::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Deck transformation: a `PSL(2,ℝ)` matrix with the group word producing it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusElement {
    pub matrix: Mobius,
    pub word: Word,
}

impl MobiusElement {
    pub fn new(matrix: Mobius, word: Word) -> Self {
        MobiusElement { matrix: matrix.sign_normalized(), word }
    }

    pub fn identity() -> Self {
        MobiusElement::new(Mobius::IDENTITY, Word::empty())
    }

    pub fn mul(&self, other: &MobiusElement) -> MobiusElement {
        MobiusElement::new(self.matrix * other.matrix, self.word.mul(&other.word))
    }

    pub fn inverse(&self) -> MobiusElement {
        MobiusElement::new(self.matrix.inverse(), self.word.inverse())
    }

    pub fn pow(&self, k: i64) -> MobiusElement {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(MobiusElement::identity(), |acc, _| acc.mul(&base))
    }
}

pub fn mobius_apply(g: &MobiusElement, z: Point) -> Point {
    g.matrix.apply(z)
}

/// Hyperbolic translation length `2 arccosh(|tr g|/2)`.
pub fn translation_length(g: &Mobius) -> Result<f64> {
    let t = g.to_sl2().trace().abs();
    if t <= 2.0 {
        return Err(LabError::NotHyperbolic { trace_abs: t });
    }
    Ok(2.0 * (t / 2.0).acosh())
}

/// Oriented axis `(repelling, attracting)` of a hyperbolic element.
pub fn axis(g: &Mobius) -> Result<(Boundary, Boundary)> {
    let g = g.to_sl2().sign_normalized();
    let t = g.trace();
    if t <= 2.0 {
        return Err(LabError::NotHyperbolic { trace_abs: t });
    }
    let disc = (t * t - 4.0).sqrt();
    // the sum and product are computed without cancellation
    let mu_big = (t + disc) / 2.0;
    let mu_small = 1.0 / mu_big;
    Ok((fixed_point_for(&g, mu_small), fixed_point_for(&g, mu_big)))
}

fn fixed_point_for(g: &Mobius, mu: f64) -> Boundary {
    let v1 = (g.b, mu - g.a);
    let v2 = (mu - g.d, g.c);
    let n1 = v1.0.hypot(v1.1);
    let n2 = v2.0.hypot(v2.1);
    let (num, den) = if n1 >= n2 { v1 } else { v2 };
    if den.abs() <= 1e-15 * num.abs() {
        Boundary::Infinity
    } else {
        Boundary::Finite(num / den)
    }
}

/// Unit-speed parametrisation `t ↦ frame(i·eᵗ)` of an oriented geodesic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicFrame {
    pub frame: Mobius,
}

impl GeodesicFrame {
    pub fn new(frame: Mobius) -> Self {
        GeodesicFrame { frame: frame.to_sl2() }
    }

    /// Some isometry sending `0 ↦ ξ⁻`, `∞ ↦ ξ⁺`.
    fn endpoint_map(back: Boundary, fwd: Boundary) -> Result<Mobius> {
        match (back, fwd) {
            (Boundary::Finite(m), Boundary::Finite(p)) => {
                if m == p {
                    return Err(LabError::DegenerateEndpoints);
                }
                let s = (p - m).signum();
                Ok(Mobius::new(p, s * m, 1.0, s).to_sl2())
            }
            (Boundary::Finite(m), Boundary::Infinity) => Ok(Mobius::new(1.0, m, 0.0, 1.0)),
            (Boundary::Infinity, Boundary::Finite(p)) => Ok(Mobius::new(p, -1.0, 1.0, 0.0)),
            (Boundary::Infinity, Boundary::Infinity) => Err(LabError::DegenerateEndpoints),
        }
    }

    /// Geodesic from `back` to `fwd` with time zero at `anchor`.
    pub fn from_endpoints(back: Boundary, fwd: Boundary, anchor: Point) -> Result<Self> {
        let n = Self::endpoint_map(back, fwd)?;
        let w = n.inverse().apply(anchor);
        let offset = w.x.abs() / w.y;
        if offset > 1e-9 {
            return Err(LabError::InvalidAnchor { offset });
        }
        Ok(GeodesicFrame::new(n * Mobius::diag(w.y.sqrt())))
    }

    /// Geodesic from `back` to `fwd`, time zero at the foot of the
    /// perpendicular from `reference`.
    pub fn from_endpoints_projecting(back: Boundary, fwd: Boundary, reference: Point) -> Result<Self> {
        let n = Self::endpoint_map(back, fwd)?;
        let w = n.inverse().apply(reference);
        let r = w.x.hypot(w.y);
        Ok(GeodesicFrame::new(n * Mobius::diag(r.sqrt())))
    }

    /// Geodesic through `p` (time zero) heading to `fwd`.
    pub fn through(p: Point, fwd: Boundary) -> Self {
        let n = match fwd {
            Boundary::Infinity => Mobius::IDENTITY,
            Boundary::Finite(x) => Mobius::new(x, -1.0, 1.0, 0.0),
        };
        let w = n.inverse().apply(p);
        GeodesicFrame::new(n * Mobius::affine_to(w))
    }

    /// Geodesic from `p` (time zero) through `q` (time `d(p, q)`).
    pub fn between(p: Point, q: Point) -> Self {
        let m0 = Mobius::affine_to(p);
        let w = m0.inverse().apply(q).to_complex();
        let i = Complex64::new(0.0, 1.0);
        let omega = (w - i) / (w + i);
        let angle = if omega.norm() == 0.0 { 0.0 } else { omega.arg() };
        GeodesicFrame::new(m0 * Mobius::rotation(angle))
    }

    pub fn point(&self, t: f64) -> Point {
        self.frame.apply(Point::new(0.0, t.exp()))
    }

    /// Unit tangent (as a complex number in half-plane coordinates).
    pub fn velocity(&self, t: f64) -> Complex64 {
        let z = Point::new(0.0, t.exp());
        self.frame.derivative(z) * Complex64::new(0.0, t.exp())
    }

    pub fn backward_end(&self) -> Boundary {
        self.frame.apply_boundary(Boundary::Finite(0.0))
    }

    pub fn forward_end(&self) -> Boundary {
        self.frame.apply_boundary(Boundary::Infinity)
    }

    /// Frame coordinates `frame⁻¹(p)`.
    pub fn local(&self, p: Point) -> Point {
        self.frame.inverse().apply(p)
    }

    /// Hyperbolic distance from `p` to the geodesic.
    pub fn distance_to(&self, p: Point) -> f64 {
        let w = self.local(p);
        (w.x.abs() / w.y).asinh()
    }

    /// Time of the orthogonal projection of `p`.
    pub fn project_time(&self, p: Point) -> f64 {
        let w = self.local(p);
        w.x.hypot(w.y).ln()
    }

    /// Same geodesic, time origin moved to `t0`.
    pub fn shifted(&self, t0: f64) -> Self {
        GeodesicFrame::new(self.frame * Mobius::diag((t0 / 2.0).exp()))
    }

    /// Image under an isometry.
    pub fn transformed(&self, g: &Mobius) -> Self {
        GeodesicFrame::new(*g * self.frame)
    }
}

/// Unit-speed point at arclength `s` from `anchor` toward `fwd`.
pub fn geodesic_point(back: Boundary, fwd: Boundary, s: f64, anchor: Point) -> Result<Point> {
    Ok(GeodesicFrame::from_endpoints(back, fwd, anchor)?.point(s))
}
