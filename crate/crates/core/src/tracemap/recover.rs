//! Recovery of a direct sum of flat line bundles from its primitive traces.
//!
//! Holonomies follow the `ρ(g)⁻¹` convention, so for `⊕ χᵢ` the trace of a
//! class `w` is `Σ χᵢ(w)⁻¹ = conj(Σ χᵢ(w))`. Classes whose abelianisation is
//! `m·eⱼ` give power sums of the `χᵢ(gⱼ)`; Newton's identities turn them into
//! a polynomial whose roots are the values, and words `g₀ᵖ gⱼ^q` match the
//! roots across generators.

use num_complex::Complex64;

use super::TraceSequence;
use crate::error::{LabError, Result};
use crate::word::{Letter, Word};

/// Primitive words realising the power sums and the matching data.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WordFamily {
    /// `gⱼ` for `m = 1` and `h gⱼ h⁻¹ gⱼ^{m−1}` with `h = g_{j+1}` for `m ≥ 2`;
    /// mixed words `g₀ᵖ gⱼ^q`.
    #[default]
    Conjugated,
}

impl WordFamily {
    pub fn power_word(&self, gen: usize, m: usize, rank: usize) -> Result<Word> {
        let g = Letter::gen(gen);
        if m == 1 {
            return Ok(Word::letter(g));
        }
        if rank < 2 {
            return Err(LabError::InsufficientData("power sums beyond m = 1 need two generators".into()));
        }
        let h = Letter::gen((gen + 1) % rank);
        let mut v = vec![h, g, h.inv()];
        v.extend(std::iter::repeat_n(g, m - 1));
        Ok(Word(v))
    }

    pub fn mixed_word(&self, first: usize, other: usize, p: usize, q: usize) -> Word {
        let mut v = vec![Letter::gen(first); p];
        v.extend(std::iter::repeat_n(Letter::gen(other), q));
        Word(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveredCharacters {
    /// `tuples[i][j] = χᵢ(gⱼ)`, sorted by argument of the first generator.
    pub tuples: Vec<Vec<Complex64>>,
    /// Max deviation when re-predicting every trace in the sequence.
    pub residual: f64,
}

impl RecoveredCharacters {
    /// Values on generator `j` across the characters.
    pub fn on_generator(&self, j: usize) -> Vec<Complex64> {
        self.tuples.iter().map(|t| t[j]).collect()
    }

    /// Predicted trace of `w` under the holonomy convention.
    pub fn predict(&self, w: &Word) -> Complex64 {
        let rank = self.tuples.first().map_or(0, |t| t.len());
        let ab = w.abelianization(rank.max(w.max_generator().map_or(0, |g| g + 1)));
        self.tuples
            .iter()
            .map(|t| t.iter().zip(&ab).fold(Complex64::new(1.0, 0.0), |acc, (z, &e)| acc * z.powi(e as i32)).conj())
            .sum()
    }
}

fn lookup(seq: &TraceSequence, w: &Word) -> Result<Complex64> {
    seq.lookup(w).ok_or_else(|| LabError::InsufficientData(format!("class {w} is not in the trace data")))
}

/// `eₘ` from power sums `p₁..p_k` by Newton's identities.
pub(crate) fn elementary_from_power_sums(p: &[Complex64]) -> Vec<Complex64> {
    let k = p.len();
    let mut e = vec![Complex64::new(1.0, 0.0); k + 1];
    for m in 1..=k {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=m {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[m - i] * p[i - 1] * sign;
        }
        e[m] = acc / m as f64;
    }
    e
}

/// Roots of `xᵏ − e₁xᵏ⁻¹ + e₂xᵏ⁻² − ⋯` (Durand–Kerner, then Newton polish).
pub(crate) fn roots_from_elementary(e: &[Complex64]) -> Vec<Complex64> {
    let k = e.len() - 1;
    // monic coefficients, highest degree first
    let coeffs: Vec<Complex64> = (0..=k).map(|i| if i % 2 == 0 { e[i] } else { -e[i] }).collect();
    let eval = |x: Complex64| coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c);
    let deriv = |x: Complex64| {
        coeffs[..k]
            .iter()
            .enumerate()
            .fold(Complex64::new(0.0, 0.0), |acc, (i, c)| acc * x + c * (k - i) as f64)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..k).map(|i| seed.powi(i as i32)).collect();
    for _ in 0..1000 {
        let mut delta = 0.0f64;
        for i in 0..k {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..k {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = deriv(*zi);
            if d.norm() > 0.0 {
                *zi -= eval(*zi) / d;
            }
        }
    }
    z.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    z
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

const MIN_SEPARATION: f64 = 1e-4;

/// Recovers `k ≤ 4` characters on `rank` generators from trace data.
pub fn recover_line_characters(
    seq: &TraceSequence,
    k: usize,
    rank: usize,
    family: WordFamily,
) -> Result<RecoveredCharacters> {
    if k == 0 || k > 4 {
        return Err(LabError::InsufficientData(format!("k = {k} outside 1..=4")));
    }
    let mut roots = Vec::with_capacity(rank);
    for j in 0..rank {
        let p = (1..=k)
            .map(|m| Ok(lookup(seq, &family.power_word(j, m, rank)?)?.conj()))
            .collect::<Result<Vec<_>>>()?;
        let r = roots_from_elementary(&elementary_from_power_sums(&p));
        for a in 0..k {
            for b in a + 1..k {
                let sep = (r[a] - r[b]).norm();
                if sep < MIN_SEPARATION {
                    return Err(LabError::IllConditioned(format!("values on generator {j} separated by {sep:e}")));
                }
            }
        }
        roots.push(r);
    }
    let mut tuples: Vec<Vec<Complex64>> = roots[0].iter().map(|&z| vec![z]).collect();
    for j in 1..rank {
        let mut data = Vec::new();
        for p in 1..=k {
            for q in 1..=k {
                data.push((p, q, lookup(seq, &family.mixed_word(0, j, p, q))?.conj()));
            }
        }
        let best = permutations(k)
            .into_iter()
            .map(|sigma| {
                let err = data
                    .iter()
                    .map(|&(p, q, t)| {
                        let pred: Complex64 =
                            (0..k).map(|i| roots[0][i].powi(p as i32) * roots[j][sigma[i]].powi(q as i32)).sum();
                        (pred - t).norm()
                    })
                    .fold(0.0f64, f64::max);
                (err, sigma)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("at least one permutation");
        for (i, t) in tuples.iter_mut().enumerate() {
            t.push(roots[j][best.1[i]]);
        }
    }
    tuples.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.arg().total_cmp(&y.arg()))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out = RecoveredCharacters { tuples, residual: 0.0 };
    out.residual = seq.entries.iter().map(|e| (out.predict(&e.word) - e.trace).norm()).fold(0.0, f64::max);
    Ok(out)
}
