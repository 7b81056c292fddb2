//! The primitive trace map, `det♯`, trace-equivalence and wave-trace
//! coefficients.

mod recover;

pub use recover::{recover_line_characters, RecoveredCharacters, WordFamily};

use std::collections::HashMap;

use num_complex::Complex64;

use crate::bundle::ConnectionForm;
use crate::classes::ClosedGeodesic;
use crate::error::{LabError, Result};
use crate::transport::{holonomies, Holonomy};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub word: Word,
    pub length: f64,
    pub trace: Complex64,
}

/// Traces of holonomies over an ordered list of primitive classes.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSequence {
    pub model: String,
    pub connection_id: String,
    pub rank: usize,
    pub steps_per_unit: f64,
    pub entries: Vec<TraceEntry>,
}

impl TraceSequence {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn traces(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.trace).collect()
    }

    /// Trace of the class of `w`, if it is in the sequence.
    pub fn lookup(&self, w: &Word) -> Option<Complex64> {
        let key = w.cyclically_reduced().minimal_rotation();
        self.entries.iter().find(|e| e.word == key).map(|e| e.trace)
    }

    pub fn index(&self) -> HashMap<Word, Complex64> {
        self.entries.iter().map(|e| (e.word.clone(), e.trace)).collect()
    }
}

fn check_primitive(classes: &[ClosedGeodesic]) -> Result<()> {
    match classes.iter().find(|g| !g.class.primitive) {
        Some(g) => Err(LabError::NonPrimitiveClass(g.class.word.to_string())),
        None => Ok(()),
    }
}

pub fn primitive_holonomies<C: ConnectionForm + ?Sized>(
    conn: &C,
    classes: &[ClosedGeodesic],
    steps_per_unit: f64,
) -> Result<Vec<Holonomy>> {
    check_primitive(classes)?;
    holonomies(conn, classes, steps_per_unit)
}

pub fn primitive_trace_map<C: ConnectionForm + ?Sized>(
    conn: &C,
    classes: &[ClosedGeodesic],
    steps_per_unit: f64,
    model: &str,
    connection_id: &str,
) -> Result<TraceSequence> {
    let hols = primitive_holonomies(conn, classes, steps_per_unit)?;
    Ok(TraceSequence {
        model: model.to_string(),
        connection_id: connection_id.to_string(),
        rank: conn.rank(),
        steps_per_unit,
        entries: classes
            .iter()
            .zip(hols)
            .map(|(g, h)| TraceEntry { word: g.class.word.clone(), length: g.length, trace: h.trace })
            .collect(),
    })
}

pub fn det_sharp<C: ConnectionForm + ?Sized>(conn: &C, classes: &[ClosedGeodesic], steps_per_unit: f64) -> Result<Vec<Complex64>> {
    Ok(primitive_holonomies(conn, classes, steps_per_unit)?.iter().map(|h| h.matrix.determinant()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub max_abs_deviation: f64,
    pub argmax: Option<Word>,
    pub tol: f64,
    pub equivalent: bool,
    /// Number of classes compared; the sup is over this truncation only.
    pub compared: usize,
}

pub const DEFAULT_COMPARE_TOL: f64 = 1e-6;

pub fn compare_trace_maps(s1: &TraceSequence, s2: &TraceSequence, tol: f64) -> Result<Comparison> {
    if s1.len() != s2.len() {
        return Err(LabError::KeyMismatch(format!("{} vs {} classes", s1.len(), s2.len())));
    }
    let mut max = 0.0f64;
    let mut argmax = None;
    for (a, b) in s1.entries.iter().zip(&s2.entries) {
        if a.word != b.word {
            return Err(LabError::KeyMismatch(format!("{} vs {}", a.word, b.word)));
        }
        let d = (a.trace - b.trace).norm();
        if argmax.is_none() || d > max {
            max = d;
            argmax = Some(a.word.clone());
        }
    }
    Ok(Comparison { max_abs_deviation: max, argmax, tol, equivalent: max <= tol, compared: s1.len() })
}

/// `ℓ♯ · Tr Hol / (2π · 2 sinh(ℓ/2))`, the Duistermaat–Guillemin weight of a
/// closed geodesic of length `ℓ` on a hyperbolic surface.
pub fn wave_trace_coefficient(geo: &ClosedGeodesic, hol: &Holonomy, primitive_length: f64) -> Complex64 {
    wave_coefficient(geo.length, hol.trace, primitive_length)
}

pub fn wave_coefficient(length: f64, trace: Complex64, primitive_length: f64) -> Complex64 {
    trace * (primitive_length / (2.0 * std::f64::consts::PI * 2.0 * (length / 2.0).sinh()))
}
