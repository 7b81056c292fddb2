//! The mixed connection on `Hom(E₁, E₂)`: `u ↦ A₂u − uA₁`.
//!
//! Homomorphisms are `r₂×r₁` matrices, flattened row-major, so the form is
//! `A₂ ⊗ I − I ⊗ A₁ᵀ` and the flat part is `ρ₂ ⊗ conj(ρ₁)`.

use num_complex::Complex64;

use super::{ConnectionForm, UnitaryRep};
use crate::hyperbolic::{Point, SurfaceGroup};
use crate::linalg::{identity, kron, CMat};

#[derive(Clone, Debug)]
pub struct Mixed<C1, C2> {
    first: C1,
    second: C2,
    rep: UnitaryRep,
}

impl<C1: ConnectionForm, C2: ConnectionForm> Mixed<C1, C2> {
    pub fn new(first: C1, second: C2) -> Self {
        let rep = second.rep().tensor(&first.rep().conjugate()).expect("same surface group");
        Mixed { first, second, rep }
    }

    pub fn first(&self) -> &C1 {
        &self.first
    }

    pub fn second(&self) -> &C2 {
        &self.second
    }

    /// `A₂(z)(v)·u − u·A₁(z)(v)`.
    pub fn apply(&self, z: Point, v: Complex64, u: &CMat) -> CMat {
        self.second.eval(z, v) * u - u * self.first.eval(z, v)
    }
}

pub fn mixed_connection<C1: ConnectionForm, C2: ConnectionForm>(first: C1, second: C2) -> Mixed<C1, C2> {
    Mixed::new(first, second)
}

impl<C1: ConnectionForm, C2: ConnectionForm> ConnectionForm for Mixed<C1, C2> {
    fn rank(&self) -> usize {
        self.first.rank() * self.second.rank()
    }

    fn rep(&self) -> &UnitaryRep {
        &self.rep
    }

    fn group(&self) -> &SurfaceGroup {
        self.first.group()
    }

    fn eval(&self, z: Point, v: Complex64) -> CMat {
        let (r1, r2) = (self.first.rank(), self.second.rank());
        let a1 = self.first.eval(z, v);
        let a2 = self.second.eval(z, v);
        kron(&a2, &identity(r1)) - kron(&identity(r2), &a1.transpose())
    }

    fn is_flat(&self) -> bool {
        self.first.is_flat() && self.second.is_flat()
    }

    fn edge_offsets(&self, z: Point, out: &mut Vec<f64>) {
        self.first.edge_offsets(z, out);
        self.second.edge_offsets(z, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{curvature_eval, BumpForm, Connection, GaugeElement, Gauged};
    use crate::hyperbolic::{build_surface, SurfaceSpec};
    use crate::linalg::{c, frob, random_complex, random_skew_hermitian, unvec_row_major, vec_row_major, zeros};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn pair(rng: &mut ChaCha8Rng) -> (Connection, Connection) {
        let g = Arc::new(build_surface(&SurfaceSpec::schottky(2, 3.0)).unwrap());
        let c1 = Connection::new(
            g.clone(),
            UnitaryRep::random(rng, 2, 2),
            vec![BumpForm::random(rng, Point::i(), 0.5, 2, 1.0)],
        )
        .unwrap();
        let c2 = Connection::new(
            g,
            UnitaryRep::random(rng, 3, 2),
            vec![BumpForm::random(rng, Point::new(0.1, 1.05), 0.45, 3, 1.0)],
        )
        .unwrap();
        (c1, c2)
    }

    #[test]
    fn trivial_pair_gives_zero_form() {
        let g = Arc::new(build_surface(&SurfaceSpec::schottky(2, 3.0)).unwrap());
        let m = mixed_connection(Connection::trivial(g.clone(), 2), Connection::trivial(g, 2));
        assert!(m.is_flat());
        assert_eq!(frob(&m.eval(Point::i(), Complex64::new(1.0, 0.0))), 0.0);
    }

    #[test]
    fn identity_section_gives_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Arc::new(build_surface(&SurfaceSpec::schottky(2, 3.0)).unwrap());
        let c1 = Connection::new(g.clone(), UnitaryRep::trivial(2, 2), vec![BumpForm::random(&mut rng, Point::i(), 0.5, 2, 1.0)])
            .unwrap();
        let c2 = Connection::new(g, UnitaryRep::trivial(2, 2), vec![BumpForm::random(&mut rng, Point::i(), 0.4, 2, 1.0)]).unwrap();
        let m = mixed_connection(c1.clone(), c2.clone());
        let (z, v) = (Point::new(0.05, 1.1), Complex64::new(0.4, -0.9));
        let got = m.apply(z, v, &identity(2));
        assert!(frob(&(got - (c2.eval(z, v) - c1.eval(z, v)))) < 1e-14);
        // the Kronecker form agrees with the matrix action
        let u = CMat::from_fn(2, 2, |_, _| random_complex(&mut rng));
        let lhs = unvec_row_major(&(m.eval(z, v) * vec_row_major(&u)), 2, 2);
        assert!(frob(&(lhs - m.apply(z, v, &u))) < 1e-13);
    }

    #[test]
    fn mixed_curvature_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (c1, c2) = pair(&mut rng);
        let m = mixed_connection(c1.clone(), c2.clone());
        for _ in 0..20 {
            let z = Point::new(rng.random_range(-0.3..0.3), rng.random_range(0.8..1.3));
            let u = CMat::from_fn(3, 2, |_, _| random_complex(&mut rng));
            let f = curvature_eval(&m, z);
            let lhs = unvec_row_major(&(f * vec_row_major(&u)), 3, 2);
            let rhs = curvature_eval(&c2, z) * &u - &u * curvature_eval(&c1, z);
            assert!(frob(&(lhs - rhs)) <= 1e-5);
        }
    }

    #[test]
    fn gauge_relation() {
        // gauging E₂ by p acts on Hom by u ↦ p⁻¹u
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (c1, c2) = pair(&mut rng);
        let x = random_skew_hermitian(&mut rng, 3, 1.0);
        let ge = GaugeElement::new(Point::new(0.0, 1.1), 0.4, x.clone()).unwrap();
        let m = mixed_connection(c1.clone(), Gauged::new(c2.clone(), ge.clone()).unwrap());
        let plain = mixed_connection(c1, c2);
        for _ in 0..10 {
            let z = Point::new(rng.random_range(-0.2..0.2), rng.random_range(0.9..1.3));
            let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let p = kron(&ge.local_value(z), &identity(2));
            let dlog = kron(&(&x * c(ge.bump.differential(z, v), 0.0)), &identity(2));
            let expect = p.adjoint() * plain.eval(z, v) * &p + dlog;
            assert!(frob(&(m.eval(z, v) - expect)) <= 1e-7);
        }
        let _ = zeros(1, 1);
    }
}
