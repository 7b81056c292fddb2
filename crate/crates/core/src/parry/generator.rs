use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{select_wrap_sequence, HomoclinicOrbit, ReferenceOrbit};
use crate::bundle::{ConnectionForm, UnitaryRep};
use crate::error::{LabError, Result};
use crate::hyperbolic::GeodesicFrame;
use crate::linalg::{frob, identity, mat_pow, unitary_defect, CMat};
use crate::transport::{connector_with_density, default_steps, transport_frame};

/// Number of approximants `ρ_n` computed before taking the limit.
pub const DEFAULT_APPROXIMANTS: usize = 8;

#[derive(Clone, Debug)]
pub struct ParryApproximant {
    pub orbit: HomoclinicOrbit,
    /// Holonomy `C(x⋆, T⋆)` of the reference orbit.
    pub holonomy: CMat,
    /// `k_1 < k_2 < …` used for `ρ_n = ρ_{n,n}`.
    pub wraps: Vec<usize>,
    pub matrices: Vec<CMat>,
    pub limit: CMat,
    /// `‖ρ_n − ρ_N‖` for `n < N`.
    pub residuals: Vec<f64>,
    pub max_unitarity_defect: f64,
}

/// `ρ_{m,n}(γ)` with explicit wrap counts `k_n` (backward) and `k_m`
/// (forward), in the trivialisation at `x⋆`.
pub fn parry_generator<C: ConnectionForm + ?Sized>(
    conn: &C,
    r: &ReferenceOrbit,
    orbit: &HomoclinicOrbit,
    k_n: usize,
    k_m: usize,
    density: f64,
) -> Result<CMat> {
    if orbit.degenerate {
        return Err(LabError::DegenerateEndpoints);
    }
    let t = r.period;
    let j1 = orbit.k_minus - k_n as i64;
    let j2 = orbit.k_plus + k_m as i64;
    let rho_h_inv = conn.rep().eval_word(&orbit.label.word).adjoint();
    if conn.is_flat() {
        return Ok(r.rho_power(conn, -j2) * rho_h_inv * r.rho_power(conn, j1));
    }
    let seg = |frame: &GeodesicFrame, t0: f64, t1: f64| -> Result<CMat> {
        Ok(transport_frame(conn, frame, t0, t1, default_steps(t1 - t0, density))?.matrix)
    };

    let start = orbit.a_minus - k_n as f64 * t;
    let backward = seg(&orbit.frame, start, orbit.a_minus)?
        * connector_with_density(conn, r.lift(j1), orbit.frame.point(start), density).matrix;
    let trunk = seg(&orbit.frame, orbit.a_minus, orbit.a_plus)?;
    let end = orbit.a_plus + k_m as f64 * t;
    let forward = connector_with_density(conn, orbit.translated.point(end), r.lift(j2), density).matrix
        * seg(&orbit.translated, orbit.a_plus, end)?;
    Ok(r.rho_power(conn, -j2) * forward * rho_h_inv * trunk * backward * r.rho_power(conn, j1))
}

/// Closed form of [`parry_generator`] for a flat connection:
/// `ρ(g⋆)^{−k₊−k_m} ρ(h)⁻¹ ρ(g⋆)^{k₋−k_n}`.
pub fn flat_parry_oracle(rep: &UnitaryRep, r: &ReferenceOrbit, orbit: &HomoclinicOrbit, k_n: usize, k_m: usize) -> CMat {
    let g = rep.eval_word(&r.g_star.word);
    let h_inv = rep.eval_word(&orbit.label.word).adjoint();
    mat_pow(&g, -orbit.k_plus - k_m as i64) * h_inv * mat_pow(&g, orbit.k_minus - k_n as i64)
}

/// The diagonal approximants `ρ_n = ρ_{n,n}`, with `k_n` the `n`-th wrap
/// count returned by [`select_wrap_sequence`] for the reference holonomy,
/// and their limit `ρ_N`.
pub fn parry_approximant<C: ConnectionForm + ?Sized>(
    conn: &C,
    r: &ReferenceOrbit,
    orbit: &HomoclinicOrbit,
    n_max: usize,
    max_wrap: usize,
    tol: f64,
    density: f64,
) -> Result<ParryApproximant> {
    let holonomy = r.holonomy(conn, density)?;
    let mut wraps = select_wrap_sequence(&holonomy, max_wrap, tol)?;
    wraps.truncate(n_max.max(1));
    let matrices: Vec<CMat> = wraps
        .par_iter()
        .map(|&k| parry_generator(conn, r, orbit, k, k, density))
        .collect::<Result<_>>()?;
    let limit = matrices.last().expect("nonempty wrap list").clone();
    let residuals = matrices[..matrices.len() - 1].iter().map(|m| frob(&(m - &limit))).collect();
    let max_unitarity_defect = matrices.iter().map(unitary_defect).fold(0.0, f64::max);
    Ok(ParryApproximant { orbit: orbit.clone(), holonomy, wraps, matrices, limit, residuals, max_unitarity_defect })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacterEntry {
    /// Indices into the label list; empty for the monoid identity.
    pub word: Vec<usize>,
    pub trace: Complex64,
}

/// Traces of all products `ρ(γ_{i₁})⋯ρ(γ_{i_k})`, `k ≤ depth`, in
/// length-then-lexicographic order.
pub fn character_table(limits: &[CMat], rank: usize, depth: usize) -> Result<Vec<CharacterEntry>> {
    if depth > 3 {
        return Err(LabError::InvalidArgument(format!("character depth {depth} exceeds 3")));
    }
    let mut out = vec![CharacterEntry { word: Vec::new(), trace: identity(rank).trace() }];
    let mut layer: Vec<(Vec<usize>, CMat)> = vec![(Vec::new(), identity(rank))];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(layer.len() * limits.len());
        for (w, m) in &layer {
            for (i, l) in limits.iter().enumerate() {
                let mut w2 = w.clone();
                w2.push(i);
                next.push((w2, m * l));
            }
        }
        out.extend(next.iter().map(|(w, m)| CharacterEntry { word: w.clone(), trace: m.trace() }));
        layer = next;
    }
    Ok(out)
}

/// Approximants for several labels (in parallel) and the character table of
/// their limits.
#[allow(clippy::too_many_arguments)]
pub fn parry_character_table<C: ConnectionForm + ?Sized>(
    conn: &C,
    r: &ReferenceOrbit,
    orbits: &[HomoclinicOrbit],
    depth: usize,
    n_max: usize,
    max_wrap: usize,
    tol: f64,
    density: f64,
) -> Result<(Vec<ParryApproximant>, Vec<CharacterEntry>)> {
    let approx: Vec<ParryApproximant> = orbits
        .par_iter()
        .map(|o| parry_approximant(conn, r, o, n_max, max_wrap, tol, density))
        .collect::<Result<_>>()?;
    let limits: Vec<CMat> = approx.iter().map(|a| a.limit.clone()).collect();
    let table = character_table(&limits, conn.rank(), depth)?;
    Ok((approx, table))
}
