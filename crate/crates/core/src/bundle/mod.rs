//! Unitary connections `∇ = d + A` on bundles over the surface: a flat
//! background representation twisted by compactly supported bumps.

mod gauge;
mod mixed;

pub use gauge::{gauge_transform, GaugeElement, Gauged};
pub use mixed::{mixed_connection, Mixed};

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::hyperbolic::{Point, SurfaceGroup, SurfaceKind};
use crate::linalg::{block_diag, c, identity, kron, random_unitary, skew_defect, unitary_defect, zeros, CMat};
use crate::word::{Letter, Word};

/// Unitary representation of the surface group, one matrix per generator.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryRep {
    rank: usize,
    gens: Vec<CMat>,
    invs: Vec<CMat>,
}

impl UnitaryRep {
    pub fn new(gens: Vec<CMat>) -> Result<Self> {
        let rank = gens.first().map_or(0, |g| g.nrows());
        if rank == 0 {
            return Err(LabError::InvalidRepresentation("empty representation".into()));
        }
        for (j, g) in gens.iter().enumerate() {
            if g.shape() != (rank, rank) {
                return Err(LabError::RankMismatch(format!("generator {j} has shape {:?}", g.shape())));
            }
            let defect = unitary_defect(g);
            if defect > 1e-10 {
                return Err(LabError::InvalidRepresentation(format!("generator {j} unitarity defect {defect:e}")));
            }
        }
        let invs = gens.iter().map(|g| g.adjoint()).collect();
        Ok(UnitaryRep { rank, gens, invs })
    }

    pub fn trivial(rank: usize, generators: usize) -> Self {
        UnitaryRep::new(vec![identity(rank); generators]).expect("identity is unitary")
    }

    /// Rank-one representation from generator phases `e^{iθ}`.
    pub fn character(args: &[f64]) -> Self {
        UnitaryRep::new(args.iter().map(|a| CMat::from_element(1, 1, Complex64::from_polar(1.0, *a))).collect())
            .expect("phases are unitary")
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, rank: usize, generators: usize) -> Self {
        UnitaryRep::new((0..generators).map(|_| random_unitary(rng, rank)).collect()).expect("Haar samples are unitary")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generator_count(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[CMat] {
        &self.gens
    }

    pub fn letter(&self, l: Letter) -> &CMat {
        let j = l.generator as usize;
        if l.inverse {
            &self.invs[j]
        } else {
            &self.gens[j]
        }
    }

    /// `ρ(s₁)⋯ρ(sₙ)`.
    pub fn eval_word(&self, w: &Word) -> CMat {
        w.letters().iter().fold(identity(self.rank), |m, &l| m * self.letter(l))
    }

    pub fn trace(&self, w: &Word) -> Complex64 {
        self.eval_word(w).trace()
    }

    pub fn direct_sum(&self, other: &UnitaryRep) -> Result<UnitaryRep> {
        if self.gens.len() != other.gens.len() {
            return Err(LabError::RankMismatch("generator counts differ".into()));
        }
        UnitaryRep::new(self.gens.iter().zip(&other.gens).map(|(a, b)| block_diag(a, b)).collect())
    }

    /// Representation on `ℂ^{r₁} ⊗ ℂ^{r₂}` (row-major Kronecker).
    pub fn tensor(&self, other: &UnitaryRep) -> Result<UnitaryRep> {
        if self.gens.len() != other.gens.len() {
            return Err(LabError::RankMismatch("generator counts differ".into()));
        }
        UnitaryRep::new(self.gens.iter().zip(&other.gens).map(|(a, b)| kron(a, b)).collect())
    }

    /// Complex conjugate representation.
    pub fn conjugate(&self) -> UnitaryRep {
        UnitaryRep::new(self.gens.iter().map(|g| g.map(|z| z.conj())).collect()).expect("conjugate of unitary")
    }

    /// `u ρ u⁻¹`.
    pub fn conjugated_by(&self, u: &CMat) -> UnitaryRep {
        let ui = u.adjoint();
        UnitaryRep::new(self.gens.iter().map(|g| u * g * &ui).collect()).expect("conjugate of unitary")
    }

    pub fn relator_residual(&self, group: &SurfaceGroup) -> f64 {
        match &group.relator {
            None => 0.0,
            Some(r) => crate::linalg::frob(&(self.eval_word(r) - identity(self.rank))),
        }
    }
}

/// Polynomial bump `(1 − d²/R²)²` in hyperbolic distance to a centre.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Point,
    pub radius: f64,
}

impl Bump {
    pub fn value(&self, z: Point) -> f64 {
        let d = z.distance(self.center);
        if d >= self.radius {
            return 0.0;
        }
        let s = 1.0 - (d / self.radius).powi(2);
        s * s
    }

    /// Euclidean gradient `(∂f/∂x, ∂f/∂y)` in half-plane coordinates.
    pub fn gradient(&self, z: Point) -> (f64, f64) {
        let d = z.distance(self.center);
        if d >= self.radius {
            return (0.0, 0.0);
        }
        let r2 = self.radius * self.radius;
        let s = d * d / r2;
        let ratio = if d < 1e-8 { 1.0 } else { d / d.sinh() };
        let (cx, cy) = (self.center.x, self.center.y);
        let (dx, dy) = (z.x - cx, z.y - cy);
        let du_dx = dx / (z.y * cy);
        let du_dy = dy / (z.y * cy) - (dx * dx + dy * dy) / (2.0 * z.y * z.y * cy);
        let k = -2.0 * (1.0 - s) * (2.0 / r2) * ratio;
        (k * du_dx, k * du_dy)
    }

    /// `df(v)` for a tangent vector `v = vx + i vy`.
    pub fn differential(&self, z: Point, v: Complex64) -> f64 {
        let (fx, fy) = self.gradient(z);
        fx * v.re + fy * v.im
    }

    pub fn check(&self, group: &SurfaceGroup) -> Result<()> {
        if !(self.radius > 0.0) || !self.center.y.is_finite() || self.center.y <= 0.0 {
            return Err(LabError::InvalidBump(format!("radius {} at {:?}", self.radius, self.center)));
        }
        let clearance = group.domain_clearance(self.center);
        if clearance <= self.radius {
            return Err(LabError::InvalidBump(format!(
                "ball of radius {} around ({}, {}) leaves the fundamental domain (clearance {clearance})",
                self.radius, self.center.x, self.center.y
            )));
        }
        Ok(())
    }
}

/// Skew-Hermitian 1-form `f(z)·(C_x dx + C_y dy)` supported in a bump.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpForm {
    pub bump: Bump,
    pub coeff_dx: CMat,
    pub coeff_dy: CMat,
}

impl BumpForm {
    pub fn new(center: Point, radius: f64, coeff_dx: CMat, coeff_dy: CMat) -> Result<Self> {
        if coeff_dx.shape() != coeff_dy.shape() || coeff_dx.nrows() != coeff_dx.ncols() {
            return Err(LabError::RankMismatch("bump coefficients must be square of equal size".into()));
        }
        for m in [&coeff_dx, &coeff_dy] {
            let defect = skew_defect(m);
            if defect > 1e-12 * (1.0 + crate::linalg::frob(m)) {
                return Err(LabError::InvalidBump(format!("coefficient not skew-Hermitian (defect {defect:e})")));
            }
        }
        Ok(BumpForm { bump: Bump { center, radius }, coeff_dx, coeff_dy })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, center: Point, radius: f64, rank: usize, scale: f64) -> Self {
        use crate::linalg::random_skew_hermitian;
        let dx = random_skew_hermitian(rng, rank, scale);
        let dy = random_skew_hermitian(rng, rank, scale);
        BumpForm::new(center, radius, dx, dy).expect("random skew-Hermitian coefficients")
    }

    pub fn rank(&self) -> usize {
        self.coeff_dx.nrows()
    }

    pub fn value(&self, z: Point, v: Complex64) -> CMat {
        let f = self.bump.value(z);
        if f == 0.0 {
            return zeros(self.rank(), self.rank());
        }
        &self.coeff_dx * c(f * v.re, 0.0) + &self.coeff_dy * c(f * v.im, 0.0)
    }

    /// Embeds the coefficients into a block of a larger rank.
    fn padded(&self, before: usize, after: usize) -> BumpForm {
        let pad = |m: &CMat| block_diag(&block_diag(&zeros(before, before), m), &zeros(after, after));
        BumpForm { bump: self.bump, coeff_dx: pad(&self.coeff_dx), coeff_dy: pad(&self.coeff_dy) }
    }
}

/// Anything that evaluates a ρ-equivariant skew-Hermitian connection form.
pub trait ConnectionForm: Send + Sync {
    fn rank(&self) -> usize;
    fn rep(&self) -> &UnitaryRep;
    fn group(&self) -> &SurfaceGroup;
    /// `A(z)(v)` in the flat trivialisation over the universal cover.
    fn eval(&self, z: Point, v: Complex64) -> CMat;
    /// True when `A ≡ 0`, so transports are identities.
    fn is_flat(&self) -> bool;
    /// Appends `d(z₀, c) − r` for every bump or gauge support, `z₀` the
    /// reduction of `z` to the fundamental domain. The form is smooth away
    /// from the zeros of these offsets, which integrators use as breakpoints.
    fn edge_offsets(&self, _z: Point, _out: &mut Vec<f64>) {}
}

/// Flat representation plus fundamental-domain bumps.
#[derive(Clone, Debug)]
pub struct Connection {
    group: Arc<SurfaceGroup>,
    rep: UnitaryRep,
    bumps: Vec<BumpForm>,
}

impl Connection {
    pub fn new(group: Arc<SurfaceGroup>, rep: UnitaryRep, bumps: Vec<BumpForm>) -> Result<Self> {
        if rep.generator_count() != group.rank() {
            return Err(LabError::InvalidRepresentation(format!(
                "{} generator matrices for a group of rank {}",
                rep.generator_count(),
                group.rank()
            )));
        }
        if group.kind == SurfaceKind::Genus2 {
            let residual = rep.relator_residual(&group);
            if residual > 1e-8 {
                return Err(LabError::InvalidRepresentation(format!("relator residual {residual:e}")));
            }
        }
        for b in &bumps {
            if b.rank() != rep.rank() {
                return Err(LabError::RankMismatch(format!("bump of rank {} on a rank-{} bundle", b.rank(), rep.rank())));
            }
            b.bump.check(&group)?;
        }
        Ok(Connection { group, rep, bumps })
    }

    pub fn flat(group: Arc<SurfaceGroup>, rep: UnitaryRep) -> Result<Self> {
        Connection::new(group, rep, Vec::new())
    }

    pub fn trivial(group: Arc<SurfaceGroup>, rank: usize) -> Self {
        let n = group.rank();
        Connection::flat(group, UnitaryRep::trivial(rank, n)).expect("trivial connection")
    }

    pub fn bumps(&self) -> &[BumpForm] {
        &self.bumps
    }

    pub fn group_arc(&self) -> &Arc<SurfaceGroup> {
        &self.group
    }

    pub fn with_bumps(&self, bumps: Vec<BumpForm>) -> Result<Self> {
        Connection::new(self.group.clone(), self.rep.clone(), bumps)
    }

    fn local_sum(&self, z: Point, v: Complex64) -> Option<CMat> {
        let mut acc: Option<CMat> = None;
        for b in &self.bumps {
            if z.distance(b.bump.center) < b.bump.radius {
                let val = b.value(z, v);
                acc = Some(match acc {
                    None => val,
                    Some(a) => a + val,
                });
            }
        }
        acc
    }

    /// Sup over the fundamental domain of `‖A(z)(v)‖_F / |v|_g`, sampled.
    pub fn sup_norm_estimate(&self) -> f64 {
        let mut best = 0.0f64;
        for b in &self.bumps {
            let n = 24;
            for i in 0..=n {
                for j in 0..n {
                    let r = b.bump.radius * i as f64 / n as f64;
                    let th = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                    let z = crate::hyperbolic::Mobius::affine_to(b.bump.center)
                        .apply(crate::hyperbolic::Mobius::rotation(th).apply(Point::new(0.0, r.exp())));
                    for phi in [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
                        let v = Complex64::from_polar(z.y, phi);
                        best = best.max(crate::linalg::frob(&self.eval(z, v)));
                    }
                }
            }
        }
        best
    }
}

impl ConnectionForm for Connection {
    fn rank(&self) -> usize {
        self.rep.rank()
    }

    fn rep(&self) -> &UnitaryRep {
        &self.rep
    }

    fn group(&self) -> &SurfaceGroup {
        &self.group
    }

    fn eval(&self, z: Point, v: Complex64) -> CMat {
        let r = self.rank();
        if self.bumps.is_empty() {
            return zeros(r, r);
        }
        let (z0, gamma) = self.group.reduce_to_domain(z);
        let v0 = gamma.matrix.push_vector(z, v);
        match self.local_sum(z0, v0) {
            None => zeros(r, r),
            Some(b) => {
                if gamma.word.is_empty() {
                    return b;
                }
                let rg = self.rep.eval_word(&gamma.word);
                rg.adjoint() * b * rg
            }
        }
    }

    fn is_flat(&self) -> bool {
        self.bumps.is_empty()
    }

    fn edge_offsets(&self, z: Point, out: &mut Vec<f64>) {
        if self.bumps.is_empty() {
            return;
        }
        let (z0, _) = self.group.reduce_to_domain(z);
        out.extend(self.bumps.iter().map(|b| z0.distance(b.bump.center) - b.bump.radius));
    }
}

pub fn connection_eval<C: ConnectionForm + ?Sized>(conn: &C, z: Point, v: Complex64) -> CMat {
    conn.eval(z, v)
}

/// Finite-difference step for `dA`.
pub const CURVATURE_STEP: f64 = 1e-5;

/// `F_xy = ∂ₓA_y − ∂_yA_x + [A_x, A_y]`.
pub fn curvature_eval<C: ConnectionForm + ?Sized>(conn: &C, z: Point) -> CMat {
    let r = conn.rank();
    if conn.is_flat() {
        return zeros(r, r);
    }
    let h = CURVATURE_STEP;
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let at = |dx: f64, dy: f64, v: Complex64| conn.eval(Point::new(z.x + dx, z.y + dy), v);
    let day_dx = (at(h, 0.0, i) - at(-h, 0.0, i)) * c(0.5 / h, 0.0);
    let dax_dy = (at(0.0, h, one) - at(0.0, -h, one)) * c(0.5 / h, 0.0);
    let ax = conn.eval(z, one);
    let ay = conn.eval(z, i);
    day_dx - dax_dy + &ax * &ay - &ay * &ax
}

fn same_group(a: &Connection, b: &Connection) -> Result<()> {
    if Arc::ptr_eq(&a.group, &b.group) || a.group.generators == b.group.generators {
        Ok(())
    } else {
        Err(LabError::InvalidRepresentation("connections live on different surfaces".into()))
    }
}

pub fn direct_sum(a: &Connection, b: &Connection) -> Result<Connection> {
    same_group(a, b)?;
    let (ra, rb) = (a.rank(), b.rank());
    let rep = a.rep.direct_sum(&b.rep)?;
    let bumps = a.bumps.iter().map(|f| f.padded(0, rb)).chain(b.bumps.iter().map(|f| f.padded(ra, 0))).collect();
    Connection::new(a.group.clone(), rep, bumps)
}

pub fn tensor_line(a: &Connection, b: &Connection) -> Result<Connection> {
    if a.rank() != 1 || b.rank() != 1 {
        return Err(LabError::RankMismatch(format!("tensor_line needs rank 1, got {} and {}", a.rank(), b.rank())));
    }
    same_group(a, b)?;
    let rep = a.rep.tensor(&b.rep)?;
    let bumps = a.bumps.iter().chain(&b.bumps).cloned().collect();
    Connection::new(a.group.clone(), rep, bumps)
}
