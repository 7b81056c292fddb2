//! Homoclinic orbits of a reference closed geodesic and the Parry-monoid
//! representation they carry.
//!
//! Everything is computed in the universal cover. The reference element
//! `g⋆` acts on its axis as translation by `T⋆`; the axis frame sends the
//! imaginary axis to that axis with `x⋆` at time zero, and most constructions
//! are first done in those "local" coordinates, where `g⋆ = diag(e^{T⋆/2})`.

mod algebra;
mod generator;
mod homoclinic;
mod shadowing;
mod spiral;

pub use algebra::{commutant_dimension, common_fixed_vector, distinguishing_word, solve_intertwiner, DistinguishingWord, Intertwiner};
pub use generator::{
    character_table, flat_parry_oracle, parry_character_table, parry_approximant, parry_generator, CharacterEntry, ParryApproximant,
    DEFAULT_APPROXIMANTS,
};
pub use homoclinic::{homoclinic_geodesic, HomoclinicOrbit, APPROACH_SAMPLES, DEFAULT_DELTA};
pub use shadowing::{shadowing_profile, ShadowingProfile, ShadowingSegment};
pub use spiral::{spiral_limit, SpiralLimit};

use crate::bundle::ConnectionForm;
use crate::classes::canonical_class;
use crate::error::{LabError, Result};
use crate::hyperbolic::{axis, translation_length, GeodesicFrame, Mobius, MobiusElement, Point, SurfaceGroup};
use crate::linalg::{frob, identity, CMat};
use crate::transport::{default_steps, transport_frame};
use crate::word::Word;

/// The periodic orbit `γ⋆` all homoclinic orbits are attached to.
#[derive(Clone, Debug)]
pub struct ReferenceOrbit {
    pub g_star: MobiusElement,
    pub x_star: Point,
    pub period: f64,
    /// Axis of `g⋆`, unit speed, `x⋆` at time zero.
    pub frame: GeodesicFrame,
}

impl ReferenceOrbit {
    /// Reference orbit of a primitive word, with `x⋆` the foot of the
    /// perpendicular from `i` to the axis.
    pub fn new(group: &SurfaceGroup, word: &Word) -> Result<Self> {
        group.check_word(word)?;
        let class = canonical_class(word, group)?;
        if !class.primitive {
            return Err(LabError::NonPrimitiveClass(word.to_string()));
        }
        Self::from_element(group.element(&word.reduced()))
    }

    pub fn from_element(g_star: MobiusElement) -> Result<Self> {
        let period = translation_length(&g_star.matrix)?;
        let (back, fwd) = axis(&g_star.matrix)?;
        let frame = GeodesicFrame::from_endpoints_projecting(back, fwd, Point::i())?;
        Ok(ReferenceOrbit { x_star: frame.point(0.0), g_star, period, frame })
    }

    /// `g⋆^j · x⋆`.
    pub fn lift(&self, j: i64) -> Point {
        self.frame.point(j as f64 * self.period)
    }

    /// Conjugate an isometry into axis coordinates.
    pub fn to_local(&self, m: &Mobius) -> Mobius {
        self.frame.frame.inverse() * *m * self.frame.frame
    }

    /// Holonomy `C(x⋆, T⋆) = ρ(g⋆)⁻¹ P(x⋆ → g⋆x⋆)`.
    pub fn holonomy<C: ConnectionForm + ?Sized>(&self, conn: &C, density: f64) -> Result<CMat> {
        let rho_inv = conn.rep().eval_word(&self.g_star.word).adjoint();
        if conn.is_flat() {
            return Ok(rho_inv);
        }
        let p = transport_frame(conn, &self.frame, 0.0, self.period, default_steps(self.period, density))?;
        Ok(rho_inv * p.matrix)
    }

    /// `ρ(g⋆)^j`.
    pub fn rho_power<C: ConnectionForm + ?Sized>(&self, conn: &C, j: i64) -> CMat {
        conn.rep().eval_word(&self.g_star.word.pow(j))
    }
}

/// All `k ≤ max` with `‖U^k − I‖_F ≤ tol`, ascending.
pub fn select_wrap_sequence(u: &CMat, max: usize, tol: f64) -> Result<Vec<usize>> {
    let id = identity(u.nrows());
    let mut p = id.clone();
    let mut out = Vec::new();
    for k in 1..=max {
        p = &p * u;
        if frob(&(&p - &id)) <= tol {
            out.push(k);
        }
    }
    if out.is_empty() {
        Err(LabError::NoWrapFound { max, tol })
    } else {
        Ok(out)
    }
}

/// Shortest representative of the double coset `⟨g⋆⟩ h ⟨g⋆⟩`, found by
/// peeling copies of `g⋆^{±1}` off both ends of the reduced word.
pub fn canonical_label(h: &Word, g_star: &Word) -> Word {
    let g = g_star.reduced();
    let gi = g.inverse();
    let mut w = h.reduced();
    if g.is_empty() {
        return w;
    }
    loop {
        let before = w.len();
        for p in [&g, &gi] {
            if w.letters().starts_with(p.letters()) {
                w = Word(w.letters()[p.len()..].to_vec());
            }
            if w.letters().ends_with(p.letters()) {
                w = Word(w.letters()[..w.len() - p.len()].to_vec());
            }
        }
        if w.len() == before {
            return w;
        }
    }
}

/// Least-squares line through `(x, y)`: `(slope, intercept, r²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}
