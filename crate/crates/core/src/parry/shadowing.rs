use serde::Serialize;

use super::{homoclinic_geodesic, ReferenceOrbit, DEFAULT_DELTA};
use crate::error::{LabError, Result};
use crate::hyperbolic::{axis, translation_length, GeodesicFrame, MobiusElement, Point};
use crate::word::Word;

#[derive(Clone, Debug, Serialize)]
pub struct ShadowingSegment {
    pub label: Word,
    pub wraps: usize,
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    pub max_distance: f64,
    /// Largest distance over the trunk `[A₋, A₊]`, the middle part of the
    /// piece. A single midpoint sample is useless here because the piece may
    /// cross the shadowing geodesic there.
    pub mid_distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShadowingProfile {
    /// `h₁ g⋆^{k₁} h₂ g⋆^{k₂} ⋯`, freely reduced.
    pub word: Word,
    pub length: f64,
    /// The cyclically reduced word is not a proper power.
    pub primitive: bool,
    pub segments: Vec<ShadowingSegment>,
}

/// Distances from the pieces of the pseudo-orbit `γ_{h₁}, g⋆^{k₁}, γ_{h₂}, …`
/// to the closed geodesic of `w = h₁ g⋆^{k₁} h₂ g⋆^{k₂} ⋯`.
///
/// `wraps` holds one count per label, or a single count used for all. Piece
/// `i` is sampled from half-way through the preceding wrap block to half-way
/// through the following one.
pub fn shadowing_profile(r: &ReferenceOrbit, labels: &[MobiusElement], wraps: &[usize], samples: usize) -> Result<ShadowingProfile> {
    if labels.is_empty() {
        return Err(LabError::EmptyConcatenation);
    }
    let wraps: Vec<usize> = match wraps.len() {
        1 => vec![wraps[0]; labels.len()],
        n if n == labels.len() => wraps.to_vec(),
        n => return Err(LabError::InvalidArgument(format!("{n} wrap counts for {} labels", labels.len()))),
    };
    if wraps.contains(&0) {
        return Err(LabError::InvalidArgument("wrap counts must be at least 1".into()));
    }
    let samples = samples.max(2);

    let mut w = MobiusElement::identity();
    let mut prefixes = Vec::with_capacity(labels.len());
    for (h, &k) in labels.iter().zip(&wraps) {
        prefixes.push(w.clone());
        w = w.mul(h).mul(&r.g_star.pow(k as i64));
    }
    let length = translation_length(&w.matrix)?;
    let word = w.word.reduced();
    let cyclic = word.cyclically_reduced();
    let primitive = !cyclic.is_empty() && cyclic.primitive_root_len() == cyclic.len();

    let t = r.period;
    let mut segments = Vec::with_capacity(labels.len());
    for (i, h) in labels.iter().enumerate() {
        // Axis of w seen from the piece: P⁻¹ · axis(w) = axis(P⁻¹ w P).
        let p = &prefixes[i].matrix;
        let (back, fwd) = axis(&(p.inverse() * w.matrix * *p))?;
        let shadow = GeodesicFrame::from_endpoints_projecting(back, fwd, Point::i())?;

        let before = wraps[(i + labels.len() - 1) % labels.len()] as f64;
        let after = wraps[i] as f64;
        let orbit = homoclinic_geodesic(r, h, DEFAULT_DELTA)?;
        let (a0, a1) = if orbit.degenerate { (0.0, t) } else { (orbit.a_minus, orbit.a_plus) };
        let grid = |t0: f64, t1: f64| (0..samples).map(move |s| t0 + (t1 - t0) * s as f64 / (samples - 1) as f64);
        let dist = |s: f64| shadow.distance_to(orbit.frame.point(s));
        let times: Vec<f64> = grid(a0 - 0.5 * before * t, a1 + 0.5 * after * t).collect();
        let distances: Vec<f64> = times.iter().map(|&s| dist(s)).collect();
        let mid_distance = grid(a0, a1).map(dist).fold(0.0, f64::max);
        segments.push(ShadowingSegment {
            label: h.word.clone(),
            wraps: wraps[i],
            max_distance: distances.iter().cloned().fold(0.0, f64::max),
            mid_distance,
            times,
            distances,
        });
    }
    Ok(ShadowingProfile { word, length, primitive, segments })
}
