//! Linear algebra on representations: intertwiners, commutants and
//! invariant vectors.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bundle::UnitaryRep;
use crate::classes::cyclic_words;
use crate::error::{LabError, Result};
use crate::linalg::{frob, identity, kron, nullspace, polar_factor, random_complex, unvec_row_major, zeros, CMat, CVec};
use crate::word::Word;

const NULL_TOL: f64 = 1e-9;
const SAMPLE_DRAWS: usize = 50;
const SAMPLE_SEED: u64 = 0x1e7e_77e1;
/// Relative smallest singular value below which a sample counts as singular.
const SINGULAR_RATIO: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Intertwiner {
    /// Basis of `{p : ρ₁(g)p = pρ₂(g) for all generators g}`.
    pub basis: Vec<CMat>,
    /// Unitary intertwiner, if the space contains an invertible element.
    pub unitary: Option<CMat>,
    /// `max_g ‖ρ₁(g)p⋆ − p⋆ρ₂(g)‖_F` for the unitary representative.
    pub residual: Option<f64>,
}

/// Stacks `A_g ⊗ I − I ⊗ B_gᵀ` over generators: the operator `p ↦ A_g p − p B_g`.
fn sylvester_stack(a: &[CMat], b: &[CMat]) -> CMat {
    let r1 = a.first().map_or(0, |m| m.nrows());
    let r2 = b.first().map_or(0, |m| m.nrows());
    let n = r1 * r2;
    let mut out = zeros(n * a.len(), n);
    for (k, (ag, bg)) in a.iter().zip(b).enumerate() {
        let block = kron(ag, &identity(r2)) - kron(&identity(r1), &bg.transpose());
        out.view_mut((k * n, 0), (n, n)).copy_from(&block);
    }
    out
}

pub fn solve_intertwiner(rep1: &UnitaryRep, rep2: &UnitaryRep) -> Result<Intertwiner> {
    let r = rep1.rank();
    if rep2.rank() != r || rep1.generator_count() != rep2.generator_count() {
        return Err(LabError::RankMismatch(format!(
            "intertwiner between rank {} ({} generators) and rank {} ({} generators)",
            r,
            rep1.generator_count(),
            rep2.rank(),
            rep2.generator_count()
        )));
    }
    let stack = sylvester_stack(rep1.generators(), rep2.generators());
    let basis: Vec<CMat> = if rep1.generator_count() == 0 {
        (0..r * r).map(|k| unvec_row_major(&CVec::from_fn(r * r, |i, _| Complex64::from(f64::from(i == k))), r, r)).collect()
    } else {
        nullspace(&stack, NULL_TOL).iter().map(|v| unvec_row_major(v, r, r)).collect()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut unitary = None;
    if !basis.is_empty() {
        for _ in 0..SAMPLE_DRAWS {
            let p = basis.iter().fold(zeros(r, r), |acc, b| acc + b * random_complex(&mut rng));
            let sv = p.clone().singular_values();
            let (lo, hi) = (sv.min(), sv.max());
            if hi > 0.0 && lo >= SINGULAR_RATIO * hi {
                unitary = Some(polar_factor(&p));
                break;
            }
        }
    }
    let residual = unitary.as_ref().map(|u| {
        rep1.generators()
            .iter()
            .zip(rep2.generators())
            .map(|(a, b)| frob(&(a * u - u * b)))
            .fold(0.0, f64::max)
    });
    Ok(Intertwiner { basis, unitary, residual })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistinguishingWord {
    pub word: Word,
    pub trace1: Complex64,
    pub trace2: Complex64,
}

/// First word (by length, then letter order) among cyclic words of length
/// `≤ max_len` on which the characters differ by more than `tol`.
pub fn distinguishing_word(rep1: &UnitaryRep, rep2: &UnitaryRep, max_len: usize, tol: f64) -> Option<DistinguishingWord> {
    let rank_gap = (rep1.rank() as f64 - rep2.rank() as f64).abs();
    if rank_gap > tol {
        return Some(DistinguishingWord {
            word: Word::empty(),
            trace1: Complex64::from(rep1.rank() as f64),
            trace2: Complex64::from(rep2.rank() as f64),
        });
    }
    let mut words = cyclic_words(rep1.generator_count().min(rep2.generator_count()), max_len);
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    words.into_iter().find_map(|w| {
        let (t1, t2) = (rep1.trace(&w), rep2.trace(&w));
        ((t1 - t2).norm() > tol).then_some(DistinguishingWord { word: w, trace1: t1, trace2: t2 })
    })
}

/// `dim {u : uρ(g) = ρ(g)u ∀g}`.
pub fn commutant_dimension(rep: &UnitaryRep) -> usize {
    let r = rep.rank();
    if rep.generator_count() == 0 {
        return r * r;
    }
    nullspace(&sylvester_stack(rep.generators(), rep.generators()), NULL_TOL).len()
}

/// A unit vector fixed by every generator, or `None`.
///
/// The representative is the normalised projection of the first standard
/// basis vector with a nonzero component in the fixed space, so it does not
/// depend on how the null space was computed.
pub fn common_fixed_vector(rep: &UnitaryRep) -> Option<CVec> {
    let r = rep.rank();
    let basis: Vec<CVec> = if rep.generator_count() == 0 {
        (0..r).map(|k| CVec::from_fn(r, |i, _| Complex64::from(f64::from(i == k)))).collect()
    } else {
        let mut stack = zeros(r * rep.generator_count(), r);
        for (k, g) in rep.generators().iter().enumerate() {
            stack.view_mut((k * r, 0), (r, r)).copy_from(&(g - identity(r)));
        }
        nullspace(&stack, NULL_TOL)
    };
    if basis.is_empty() {
        return None;
    }
    (0..r).find_map(|j| {
        let v = basis.iter().fold(CVec::zeros(r), |acc, b| acc + b * b[j].conj());
        (v.norm() > 1e-8).then(|| v.normalize())
    })
}
