//! Explicit Fuchsian groups: free Schottky groups and a closed genus-2 group.
//!
//! Both models carry a Dirichlet domain centred at `i`. Its sides are the
//! perpendicular bisectors between `i` and `s⁻¹·i` over the generators `s` and
//! their inverses; a point lies beyond side `s` exactly when applying `s`
//! brings it closer to `i`.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Boundary, GeodesicFrame, Mobius, MobiusElement, Point};
use crate::error::{LabError, Result};
use crate::word::{Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchottkyGenerator {
    pub lambda: f64,
    /// Direction of the axis at `i`, in radians from the vertical.
    pub angle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SurfaceSpec {
    Schottky { generators: Vec<SchottkyGenerator> },
    Genus2 {},
}

impl SurfaceSpec {
    /// `rank` generators with equal multiplier and equally spaced axes.
    pub fn schottky(rank: usize, lambda: f64) -> Self {
        let generators = (0..rank)
            .map(|j| SchottkyGenerator { lambda, angle: j as f64 * PI / rank as f64 })
            .collect();
        SurfaceSpec::Schottky { generators }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Schottky,
    Genus2,
}

/// One side of the Dirichlet domain: the bisector between `i` and `s⁻¹·i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSide {
    pub letter: Letter,
    /// Same side in the disk model, as an arc of the unit circle.
    pub center_angle: f64,
    pub half_width: f64,
    pub boundary: GeodesicFrame,
    target: Point,
}

impl DomainSide {
    fn new(letter: Letter, s: &Mobius) -> Self {
        let target = s.inverse().apply(Point::i());
        let rho = target.distance(Point::i()) / 2.0;
        let w = cayley(target.to_complex());
        let center_angle = w.arg();
        let half_width = rho.tanh().acos();
        let back = boundary_from_angle(center_angle - half_width);
        let fwd = boundary_from_angle(center_angle + half_width);
        let boundary = GeodesicFrame::from_endpoints_projecting(back, fwd, Point::i())
            .expect("bisector endpoints are distinct");
        DomainSide { letter, center_angle, half_width, boundary, target }
    }

    /// Whether `p` lies strictly beyond this side.
    pub fn contains(&self, p: Point) -> bool {
        p.distance(self.target) < p.distance(Point::i())
    }

    /// Signed distance to the side, positive on the domain side.
    pub fn clearance(&self, p: Point) -> f64 {
        let d = self.boundary.distance_to(p);
        if self.contains(p) {
            -d
        } else {
            d
        }
    }
}

fn cayley(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    (z - i) / (z + i)
}

fn boundary_from_angle(theta: f64) -> Boundary {
    let s = (theta / 2.0).sin();
    if s.abs() < 1e-15 {
        Boundary::Infinity
    } else {
        Boundary::Finite(-(theta / 2.0).cos() / s)
    }
}

#[derive(Clone, Debug)]
pub struct SurfaceGroup {
    pub kind: SurfaceKind,
    pub generators: Vec<Mobius>,
    pub inverses: Vec<Mobius>,
    pub relator: Option<Word>,
    pub sides: Vec<DomainSide>,
}

impl SurfaceGroup {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn letter_matrix(&self, l: Letter) -> Mobius {
        let j = l.generator as usize;
        if l.inverse {
            self.inverses[j]
        } else {
            self.generators[j]
        }
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.rank()).flat_map(|j| [Letter::new(j, false), Letter::new(j, true)]).collect()
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.max_generator() {
            Some(g) if g >= self.rank() => Err(LabError::InvalidWord(w.to_string())),
            _ => Ok(()),
        }
    }

    pub fn eval_word(&self, w: &Word) -> Mobius {
        w.letters().iter().fold(Mobius::IDENTITY, |m, &l| m * self.letter_matrix(l))
    }

    pub fn element(&self, w: &Word) -> MobiusElement {
        MobiusElement::new(self.eval_word(w), w.clone())
    }

    /// `‖relator − (±I)‖_max`, zero for free groups.
    pub fn relator_residual(&self) -> f64 {
        self.relator.as_ref().map_or(0.0, |r| self.eval_word(r).projective_diff(&Mobius::IDENTITY))
    }

    /// Minimum signed distance to the domain sides; positive inside.
    pub fn domain_clearance(&self, p: Point) -> f64 {
        self.sides.iter().map(|s| s.clearance(p)).fold(f64::INFINITY, f64::min)
    }

    pub fn in_domain(&self, p: Point) -> bool {
        self.sides.iter().all(|s| !s.contains(p))
    }

    /// Returns `γ` with `γ·p` in the closed domain.
    pub fn reduce_to_domain(&self, p: Point) -> (Point, MobiusElement) {
        let mut z = p;
        let mut gamma = MobiusElement::identity();
        for _ in 0..100_000 {
            let here = z.distance(Point::i());
            let best = self
                .sides
                .iter()
                .map(|s| (s, here - z.distance(s.target)))
                .filter(|(_, gain)| *gain > 1e-13)
                .max_by(|x, y| x.1.total_cmp(&y.1));
            match best {
                None => return (z, gamma),
                Some((side, _)) => {
                    let s = self.letter_matrix(side.letter);
                    z = s.apply(z);
                    gamma = MobiusElement::new(s, Word::letter(side.letter)).mul(&gamma);
                }
            }
        }
        panic!("domain reduction did not terminate");
    }
}

fn schottky_group(gens: &[SchottkyGenerator]) -> Result<SurfaceGroup> {
    if gens.is_empty() {
        return Err(LabError::InvalidSchottky("no generators".into()));
    }
    if gens.len() > 13 {
        return Err(LabError::InvalidSchottky("at most 13 generators are supported".into()));
    }
    let mut generators = Vec::new();
    for g in gens {
        if !(g.lambda > 1.0) || !g.lambda.is_finite() || !g.angle.is_finite() {
            return Err(LabError::InvalidSchottky(format!("multiplier {} must exceed 1", g.lambda)));
        }
        let k = Mobius::rotation(g.angle);
        generators.push(k * Mobius::diag(g.lambda) * k.inverse());
    }
    let inverses: Vec<Mobius> = generators.iter().map(Mobius::inverse).collect();
    let mut sides = Vec::new();
    for (j, (g, gi)) in generators.iter().zip(&inverses).enumerate() {
        sides.push(DomainSide::new(Letter::new(j, false), g));
        sides.push(DomainSide::new(Letter::new(j, true), gi));
    }
    for (p, s) in sides.iter().enumerate() {
        for t in &sides[p + 1..] {
            let gap = angular_gap(s.center_angle, t.center_angle);
            if gap <= s.half_width + t.half_width + 1e-12 {
                return Err(LabError::InvalidSchottky(format!(
                    "ping-pong disks {} and {} overlap",
                    s.letter.to_char(),
                    t.letter.to_char()
                )));
            }
        }
    }
    Ok(SurfaceGroup { kind: SurfaceKind::Schottky, generators, inverses, relator: None, sides })
}

fn angular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

type C2 = Matrix2<Complex64>;

fn disk_translation(l: f64) -> C2 {
    let (c, s) = ((l / 2.0).cosh(), (l / 2.0).sinh());
    C2::new(c.into(), s.into(), s.into(), c.into())
}

fn disk_rotation(t: f64) -> C2 {
    C2::new(Complex64::from_polar(1.0, t / 2.0), 0.0.into(), 0.0.into(), Complex64::from_polar(1.0, -t / 2.0))
}

/// Side pairing of the regular octagon with angles π/4: `G(j→k)` carries side
/// `j` onto side `k` with the outward normal reversed.
fn octagon_pairing(j: u32, k: u32, l: f64) -> C2 {
    let q = PI / 4.0;
    disk_rotation(k as f64 * q - PI) * disk_translation(-l) * disk_rotation(-(j as f64) * q)
}

fn disk_to_half_plane(g: &C2) -> Result<Mobius> {
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let c = C2::new(one, -i, one, i);
    let c_inv = C2::new(i, i, -one, one) / (Complex64::new(2.0, 0.0) * i);
    let h = c_inv * g * c;
    let imag = h.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    if imag > 1e-10 {
        return Err(LabError::ModelConstructionFailed(format!("non-real generator (imag {imag:e})")));
    }
    Ok(Mobius::new(h[(0, 0)].re, h[(0, 1)].re, h[(1, 0)].re, h[(1, 1)].re).to_sl2())
}

fn genus2_group() -> Result<SurfaceGroup> {
    // side midpoints of the regular octagon with interior angles π/4 sit at
    // distance r with cosh r = 1 + √2; pairings translate by 2r
    let r = (1.0 + 2f64.sqrt()).acosh();
    let l = 2.0 * r;
    let pairs = [(2, 0), (1, 3), (6, 4), (5, 7)];
    let generators = pairs
        .iter()
        .map(|&(j, k)| disk_to_half_plane(&octagon_pairing(j, k, l)))
        .collect::<Result<Vec<_>>>()?;
    let inverses: Vec<Mobius> = generators.iter().map(Mobius::inverse).collect();
    let relator: Word = "abABcdCD".parse().expect("static relator");
    let mut sides = Vec::new();
    for (j, (g, gi)) in generators.iter().zip(&inverses).enumerate() {
        sides.push(DomainSide::new(Letter::new(j, false), g));
        sides.push(DomainSide::new(Letter::new(j, true), gi));
    }
    let group = SurfaceGroup { kind: SurfaceKind::Genus2, generators, inverses, relator: Some(relator), sides };
    let residual = group.relator_residual();
    if residual > 1e-9 {
        return Err(LabError::ModelConstructionFailed(format!("relator residual {residual:e}")));
    }
    Ok(group)
}

pub fn build_surface(spec: &SurfaceSpec) -> Result<SurfaceGroup> {
    match spec {
        SurfaceSpec::Schottky { generators } => schottky_group(generators),
        SurfaceSpec::Genus2 {} => genus2_group(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::translation_length;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn schottky_perpendicular_is_valid() {
        let g = build_surface(&SurfaceSpec::schottky(2, 3.0)).unwrap();
        assert_eq!(g.rank(), 2);
        assert_eq!(g.sides.len(), 4);
        // half-width from tanh(ln 3) = 0.8
        for s in &g.sides {
            assert!((s.half_width - 0.8f64.acos()).abs() < 1e-12);
        }
        let a = g.generators[0];
        assert!(a.max_abs_diff(&Mobius::diag(3.0)) < 1e-14);
    }

    #[test]
    fn schottky_overlap_is_rejected() {
        let err = build_surface(&SurfaceSpec::schottky(2, 1.01)).unwrap_err();
        assert!(matches!(err, LabError::InvalidSchottky(_)));
        let bad = SurfaceSpec::Schottky { generators: vec![SchottkyGenerator { lambda: 0.5, angle: 0.0 }] };
        assert!(build_surface(&bad).is_err());
    }

    #[test]
    fn schottky_sides_sit_at_log_lambda() {
        let g = build_surface(&SurfaceSpec::schottky(2, 3.0)).unwrap();
        for s in &g.sides {
            assert!((s.boundary.distance_to(Point::i()) - 3f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn genus2_relator_and_traces() {
        let g = build_surface(&SurfaceSpec::Genus2 {}).unwrap();
        assert!(g.relator_residual() <= 1e-9, "{}", g.relator_residual());
        for m in &g.generators {
            assert!((m.det() - 1.0).abs() < 1e-12);
            assert!((m.trace().abs() - (2.0 + 2f64.sqrt())).abs() < 1e-10);
        }
        // the four generators must be genuinely different
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(g.generators[i].projective_diff(&g.generators[j]) > 0.1);
            }
        }
    }

    #[test]
    fn genus2_domain_is_octagon() {
        let g = build_surface(&SurfaceSpec::Genus2 {}).unwrap();
        let r = (1.0 + 2f64.sqrt()).acosh();
        for s in &g.sides {
            assert!((s.boundary.distance_to(Point::i()) - r).abs() < 1e-10);
        }
        let mut angles: Vec<f64> = g.sides.iter().map(|s| s.center_angle.rem_euclid(2.0 * PI)).collect();
        angles.sort_by(f64::total_cmp);
        for w in angles.windows(2) {
            assert!((w[1] - w[0] - PI / 4.0).abs() < 1e-10);
        }
    }

    #[test]
    fn reduction_lands_in_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for spec in [SurfaceSpec::schottky(2, 3.0), SurfaceSpec::Genus2 {}] {
            let g = build_surface(&spec).unwrap();
            for _ in 0..200 {
                let p = Point::new(rng.random_range(-5.0..5.0), rng.random_range(0.01..5.0));
                let (q, gamma) = g.reduce_to_domain(p);
                assert!(g.in_domain(q));
                assert!(g.domain_clearance(q) >= -1e-9);
                assert!(gamma.matrix.apply(p).distance(q) < 1e-8);
                assert!(g.eval_word(&gamma.word).projective_diff(&gamma.matrix) < 1e-8);
            }
        }
    }

    #[test]
    fn generators_are_hyperbolic() {
        let g = build_surface(&SurfaceSpec::schottky(3, 4.0)).unwrap();
        for m in &g.generators {
            assert!((translation_length(m).unwrap() - 2.0 * 4f64.ln()).abs() < 1e-12);
        }
    }
}
