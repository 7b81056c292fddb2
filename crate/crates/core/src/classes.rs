//! Free homotopy classes as cyclic words, primitivity, and their closed
//! geodesics.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::hyperbolic::{axis, translation_length, Boundary, GeodesicFrame, Mobius, MobiusElement, Point, SurfaceGroup, SurfaceKind};
use crate::word::{Letter, Word};

/// Directed conjugacy class, stored by its canonical cyclic word.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjClass {
    pub word: Word,
    pub primitive: bool,
    pub length: f64,
    #[serde(skip)]
    pub matrix: MobiusElement,
}

impl ConjClass {
    /// The class of `self^k`.
    pub fn power(&self, k: usize, group: &SurfaceGroup) -> Result<ConjClass> {
        canonical_class(&self.word.pow(k as i64), group)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedGeodesic {
    pub class: ConjClass,
    pub back: Boundary,
    pub fwd: Boundary,
    /// `x_{c♯}`: projection of `i` onto the axis.
    pub base_point: Point,
    pub length: f64,
    /// Unit-speed parametrisation with time zero at the base point.
    pub frame: GeodesicFrame,
}

pub fn cyclic_reduce(w: &Word) -> Word {
    w.cyclically_reduced()
}

pub fn canonical_class(w: &Word, group: &SurfaceGroup) -> Result<ConjClass> {
    group.check_word(w)?;
    let word = w.cyclically_reduced().minimal_rotation();
    if word.is_empty() {
        return Err(LabError::EmptyClass);
    }
    let matrix = group.element(&word);
    let length = translation_length(&matrix.matrix)?;
    let primitive = word.primitive_root_len() == word.len();
    Ok(ConjClass { word, primitive, length, matrix })
}

pub fn is_primitive(c: &ConjClass) -> bool {
    c.primitive
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnumerateOptions {
    pub max_word_len: usize,
    /// Post-hoc geodesic-length cutoff.
    pub max_length: Option<f64>,
    /// Genus-2 only: lengths closer than this are candidates for conjugacy.
    pub length_tol: f64,
    /// Genus-2 only: conjugators are searched among words of this length.
    pub conjugator_depth: usize,
}

impl EnumerateOptions {
    pub fn new(max_word_len: usize) -> Self {
        EnumerateOptions { max_word_len, max_length: None, length_tol: 1e-7, conjugator_depth: 2 }
    }
}

pub fn enumerate_primitive_classes(group: &SurfaceGroup, max_word_len: usize) -> Vec<ConjClass> {
    enumerate_with(group, &EnumerateOptions::new(max_word_len))
}

/// Canonical (cyclically reduced, minimal-rotation) words of length `1..=n`
/// over `rank` generators, including proper powers.
pub fn cyclic_words(rank: usize, n: usize) -> Vec<Word> {
    let letters: Vec<Letter> = (0..rank).flat_map(|j| [Letter::new(j, false), Letter::new(j, true)]).collect();
    if n == 0 {
        return Vec::new();
    }
    letters
        .par_iter()
        .flat_map_iter(|&first| {
            let mut out = Vec::new();
            let mut stack = vec![first];
            extend_words(&letters, n, &mut stack, &mut out);
            out
        })
        .collect()
}

pub fn enumerate_with(group: &SurfaceGroup, opts: &EnumerateOptions) -> Vec<ConjClass> {
    let mut classes: Vec<ConjClass> = cyclic_words(group.rank(), opts.max_word_len)
        .into_par_iter()
        .filter_map(|w| {
            let c = canonical_class(&w, group).ok()?;
            let keep = c.primitive && opts.max_length.is_none_or(|m| c.length <= m);
            keep.then_some(c)
        })
        .collect();
    classes.sort_by(|x, y| x.length.total_cmp(&y.length).then_with(|| x.word.cmp(&y.word)));
    if group.kind == SurfaceKind::Genus2 {
        classes = dedup_by_geometry(group, classes, opts);
    }
    classes
}

// Emits every reduced word extending `stack` that is cyclically reduced and
// equal to its own minimal rotation.
fn extend_words(letters: &[Letter], n: usize, stack: &mut Vec<Letter>, out: &mut Vec<Word>) {
    let w = Word(stack.clone());
    if w.is_cyclically_reduced() && w.minimal_rotation() == w {
        out.push(w);
    }
    if stack.len() == n {
        return;
    }
    let last = *stack.last().expect("nonempty prefix");
    for &l in letters {
        // a canonical word never has a letter below its first one
        if l == last.inv() || l < stack[0] {
            continue;
        }
        stack.push(l);
        extend_words(letters, n, stack, out);
        stack.pop();
    }
}

fn conjugators(group: &SurfaceGroup, depth: usize) -> Vec<Mobius> {
    let mut frontier = vec![Word::empty()];
    let mut all = vec![Mobius::IDENTITY];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for l in group.letters() {
                if w.letters().last() == Some(&l.inv()) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(l);
                let nw = Word(v);
                all.push(group.eval_word(&nw));
                next.push(nw);
            }
        }
        frontier = next;
    }
    all
}

fn conjugate_in(g1: &Mobius, g2: &Mobius, conj: &[Mobius]) -> bool {
    let scale = 1.0 + [g2.a, g2.b, g2.c, g2.d].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    conj.iter().any(|h| g1.conj_by(h).projective_diff(g2) <= 1e-7 * scale)
}

// The relator makes distinct cyclic words conjugate; keep the first word of
// each geometric class in the sorted order.
fn dedup_by_geometry(group: &SurfaceGroup, classes: Vec<ConjClass>, opts: &EnumerateOptions) -> Vec<ConjClass> {
    let conj = conjugators(group, opts.conjugator_depth);
    let mut kept: Vec<ConjClass> = Vec::new();
    for c in classes {
        // rotations of the word are conjugates by prefixes, so compare all of them
        let rotations: Vec<Mobius> = (0..c.word.len()).map(|i| group.eval_word(&c.word.rotated(i))).collect();
        let duplicate = kept
            .iter()
            .rev()
            .take_while(|k| c.length - k.length <= opts.length_tol)
            .any(|k| rotations.iter().any(|r| conjugate_in(&k.matrix.matrix, r, &conj)));
        if !duplicate {
            kept.push(c);
        }
    }
    kept
}

pub fn class_geodesic(c: &ConjClass, _group: &SurfaceGroup) -> Result<ClosedGeodesic> {
    let (back, fwd) = axis(&c.matrix.matrix)?;
    let frame = GeodesicFrame::from_endpoints_projecting(back, fwd, Point::i())?;
    Ok(ClosedGeodesic {
        class: c.clone(),
        back,
        fwd,
        base_point: frame.point(0.0),
        length: c.length,
        frame,
    })
}

impl ClosedGeodesic {
    /// Same geodesic with the base point moved by `s` along the axis.
    pub fn with_base_shift(&self, s: f64) -> ClosedGeodesic {
        let frame = self.frame.shifted(s);
        ClosedGeodesic { base_point: frame.point(0.0), frame, ..self.clone() }
    }
}
