//! Parallel transport `U' = −A(γ̇)U` along curves in the universal cover, and
//! holonomies of closed geodesics.

mod ambrose;

pub use ambrose::{ambrose_singer_check, gauss_legendre, AmbroseSinger, FermiSquare};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bundle::{ConnectionForm, Mixed};
use crate::classes::{ClosedGeodesic, ConjClass};
use crate::error::{LabError, Result};
use crate::hyperbolic::{Boundary, GeodesicFrame, Point};
use crate::linalg::{c, frob, identity, project_unitary, unitary_defect, unvec_row_major, vec_row_major, CMat};

#[derive(Clone, Debug)]
pub struct TransportResult {
    pub matrix: CMat,
    pub from: Point,
    pub to: Point,
    pub steps: usize,
    pub unitarity_defect: f64,
}

#[derive(Clone, Debug)]
pub struct Holonomy {
    pub class: ConjClass,
    pub matrix: CMat,
    pub trace: Complex64,
}

/// Default step count for a segment: `max(64, ⌈density·length⌉)`.
pub fn default_steps(length: f64, density: f64) -> usize {
    64usize.max((density * length.abs()).ceil() as usize)
}

pub const DEFAULT_DENSITY: f64 = 32.0;

/// Transports along a parametrised curve `s ↦ (γ(s), γ'(s))` from `s0` to
/// `s1` with classical RK4 and a polar projection after every step.
///
/// A step that crosses the edge of a bump or gauge support is split at the
/// crossing (located by bisection), so every sub-step integrates a smooth
/// form and the scheme keeps its order on piecewise-polynomial profiles.
pub fn transport_path<C, F>(conn: &C, path: F, s0: f64, s1: f64, steps: usize) -> CMat
where
    C: ConnectionForm + ?Sized,
    F: Fn(f64) -> (Point, Complex64),
{
    let r = conn.rank();
    let mut u = identity(r);
    if conn.is_flat() || steps == 0 || s0 == s1 {
        return u;
    }
    let h = (s1 - s0) / steps as f64;
    let eval = |s: f64| {
        let (p, v) = path(s);
        conn.eval(p, v)
    };
    let offsets = |s: f64| {
        let mut out = Vec::new();
        conn.edge_offsets(path(s).0, &mut out);
        out
    };
    let is_zero = |m: &CMat| m.iter().all(|z| z.re == 0.0 && z.im == 0.0);
    let rk4 = |u: &mut CMat, a0: &CMat, am: &CMat, a1: &CMat, h: f64| {
        if is_zero(a0) && is_zero(am) && is_zero(a1) {
            return;
        }
        let k1 = -(a0 * &*u);
        let k2 = -(am * (&*u + &k1 * c(0.5 * h, 0.0)));
        let k3 = -(am * (&*u + &k2 * c(0.5 * h, 0.0)));
        let k4 = -(a1 * (&*u + &k3 * c(h, 0.0)));
        *u += (k1 + (k2 + k3) * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0);
        *u = project_unitary(u);
    };
    let mut a0 = eval(s0);
    let mut off0 = offsets(s0);
    for k in 0..steps {
        let s = s0 + k as f64 * h;
        let s_next = if k + 1 == steps { s1 } else { s + h };
        let a1 = eval(s_next);
        let off1 = offsets(s_next);
        let mut cuts: Vec<f64> = off0
            .iter()
            .zip(&off1)
            .enumerate()
            .filter(|(_, (x, y))| (**x < 0.0) != (**y < 0.0))
            .map(|(i, _)| edge_crossing(|t| offsets(t)[i], s, s_next))
            .collect();
        if cuts.is_empty() {
            rk4(&mut u, &a0, &eval(0.5 * (s + s_next)), &a1, s_next - s);
        } else {
            cuts.sort_by(|x, y| if h > 0.0 { x.total_cmp(y) } else { y.total_cmp(x) });
            let mut t = s;
            let mut at = a0.clone();
            for cut in cuts.into_iter().chain(std::iter::once(s_next)) {
                if cut == t {
                    continue;
                }
                let ac = if cut == s_next { a1.clone() } else { eval(cut) };
                rk4(&mut u, &at, &eval(0.5 * (t + cut)), &ac, cut - t);
                t = cut;
                at = ac;
            }
        }
        a0 = a1;
        off0 = off1;
    }
    u
}

/// Zero of a continuous `f` whose sign differs at `a` and `b`.
fn edge_crossing<G: Fn(f64) -> f64>(f: G, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (a, b);
    let neg_lo = f(lo) < 0.0;
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Transport along a unit-speed geodesic frame from time `t0` to `t1`.
pub fn transport_frame<C: ConnectionForm + ?Sized>(
    conn: &C,
    frame: &GeodesicFrame,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<TransportResult> {
    let length = (t1 - t0).abs();
    if (steps as f64) < 4.0 * length || steps == 0 {
        return Err(LabError::StepCountTooSmall { steps, length });
    }
    let matrix = transport_path(conn, |t| (frame.point(t), frame.velocity(t)), t0, t1, steps);
    Ok(TransportResult {
        unitarity_defect: unitary_defect(&matrix),
        matrix,
        from: frame.point(t0),
        to: frame.point(t1),
        steps,
    })
}

/// Transport from `from` for arclength `length` along the geodesic heading
/// to `toward`.
pub fn transport_segment<C: ConnectionForm + ?Sized>(
    conn: &C,
    from: Point,
    toward: Boundary,
    length: f64,
    steps: usize,
) -> Result<TransportResult> {
    transport_frame(conn, &GeodesicFrame::through(from, toward), 0.0, length, steps)
}

/// `C_{x→y}` along the geodesic segment from `x` to `y`.
pub fn connector_transport<C: ConnectionForm + ?Sized>(conn: &C, x: Point, y: Point) -> TransportResult {
    connector_with_density(conn, x, y, DEFAULT_DENSITY)
}

pub fn connector_with_density<C: ConnectionForm + ?Sized>(conn: &C, x: Point, y: Point, density: f64) -> TransportResult {
    let d = x.distance(y);
    if d == 0.0 {
        return TransportResult { matrix: identity(conn.rank()), from: x, to: y, steps: 0, unitarity_defect: 0.0 };
    }
    let frame = GeodesicFrame::between(x, y);
    let mut out = transport_frame(conn, &frame, 0.0, d, default_steps(d, density)).expect("default steps suffice");
    out.to = y;
    out
}

/// `Hol = ρ(g)⁻¹ · P(x_c → g·x_c)` along the axis.
///
/// The period is integrated over `[−ℓ/2, ℓ/2]` rather than `[0, ℓ]`: with
/// `Q₁ = P(γ(−ℓ/2) → x_c)` and `Q₂ = P(x_c → γ(ℓ/2))` one has
/// `Hol = Q₁ ρ(g)⁻¹ Q₂`. Long axes then stay away from the ideal boundary,
/// where half-plane coordinates lose precision.
pub fn holonomy_class<C: ConnectionForm + ?Sized>(conn: &C, geo: &ClosedGeodesic, steps: Option<usize>) -> Result<Holonomy> {
    let rho_inv = conn.rep().eval_word(&geo.class.word).adjoint();
    let matrix = if conn.is_flat() {
        rho_inv
    } else {
        let steps = steps.unwrap_or_else(|| default_steps(geo.length, DEFAULT_DENSITY));
        let half = geo.length / 2.0;
        let first = transport_frame(conn, &geo.frame, -half, 0.0, steps.div_ceil(2))?;
        let second = transport_frame(conn, &geo.frame, 0.0, half, steps.div_ceil(2))?;
        first.matrix * rho_inv * second.matrix
    };
    let trace = matrix.trace();
    Ok(Holonomy { class: geo.class.clone(), matrix, trace })
}

/// Holonomies of many geodesics, in input order; `density` sets the steps.
pub fn holonomies<C: ConnectionForm + ?Sized>(conn: &C, geos: &[ClosedGeodesic], density: f64) -> Result<Vec<Holonomy>> {
    geos.par_iter()
        .map(|g| holonomy_class(conn, g, Some(default_steps(g.length, density))))
        .collect()
}

#[derive(Clone, Debug)]
pub struct MixedCheck {
    pub residual: f64,
    pub mixed: CMat,
    pub conjugated: CMat,
}

/// `‖P(x,t)u₀ − C₂u₀C₁⁻¹‖_F` from three independent solves.
pub fn mixed_transport_check<C1, C2>(
    first: &C1,
    second: &C2,
    frame: &GeodesicFrame,
    length: f64,
    u0: &CMat,
    steps: usize,
) -> Result<MixedCheck>
where
    C1: ConnectionForm + Clone,
    C2: ConnectionForm + Clone,
{
    let mixed = Mixed::new(first.clone(), second.clone());
    let p = transport_frame(&mixed, frame, 0.0, length, steps)?.matrix;
    let c1 = transport_frame(first, frame, 0.0, length, steps)?.matrix;
    let c2 = transport_frame(second, frame, 0.0, length, steps)?.matrix;
    let (r2, r1) = u0.shape();
    let lhs = unvec_row_major(&(p * vec_row_major(u0)), r2, r1);
    let rhs = c2 * u0 * c1.adjoint();
    Ok(MixedCheck { residual: frob(&(&lhs - &rhs)), mixed: lhs, conjugated: rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{BumpForm, Connection, UnitaryRep};
    use crate::classes::{canonical_class, class_geodesic, enumerate_primitive_classes};
    use crate::hyperbolic::{build_surface, SurfaceGroup, SurfaceSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn group() -> Arc<SurfaceGroup> {
        Arc::new(build_surface(&SurfaceSpec::schottky(2, 3.0)).unwrap())
    }

    fn bumpy(seed: u64, rank: usize) -> Connection {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = UnitaryRep::random(&mut rng, rank, 2);
        let bumps = vec![
            BumpForm::random(&mut rng, Point::i(), 0.5, rank, 1.0),
            BumpForm::random(&mut rng, Point::new(0.55f64.tanh(), 1.0 / 0.55f64.cosh()), 0.3, rank, 1.0),
        ];
        Connection::new(group(), rep, bumps).unwrap()
    }

    fn crossing() -> GeodesicFrame {
        GeodesicFrame::through(Point::new(-0.8, 0.7), Boundary::Finite(1.5))
    }

    #[test]
    fn flat_is_identity() {
        let conn = Connection::flat(group(), UnitaryRep::random(&mut ChaCha8Rng::seed_from_u64(1), 2, 2)).unwrap();
        let t = transport_frame(&conn, &crossing(), 0.0, 3.0, 100).unwrap();
        assert_eq!(t.matrix, identity(2));
    }

    #[test]
    fn step_floor() {
        let conn = bumpy(2, 2);
        let err = transport_frame(&conn, &crossing(), 0.0, 30.0, 100).unwrap_err();
        assert!(matches!(err, LabError::StepCountTooSmall { .. }));
    }

    #[test]
    fn reverse_is_inverse() {
        let conn = bumpy(3, 2);
        let f = crossing();
        let fwd = transport_frame(&conn, &f, 0.0, 3.0, 200).unwrap();
        let back = transport_frame(&conn, &f, 3.0, 0.0, 200).unwrap();
        assert!(frob(&(back.matrix - fwd.matrix.adjoint())) <= 1e-9);
        assert!(fwd.unitarity_defect <= 1e-9);
        assert!(frob(&(fwd.matrix.clone() - identity(2))) > 0.1);
    }

    #[test]
    fn concatenation() {
        let conn = bumpy(4, 3);
        let f = crossing();
        let whole = transport_frame(&conn, &f, 0.0, 3.0, 240).unwrap().matrix;
        let first = transport_frame(&conn, &f, 0.0, 1.5, 120).unwrap().matrix;
        let second = transport_frame(&conn, &f, 1.5, 3.0, 120).unwrap().matrix;
        assert!(frob(&(whole - second * first)) <= 1e-9);
    }

    #[test]
    fn connector_continuity() {
        let conn = bumpy(5, 2);
        let x = Point::new(0.1, 1.0);
        let y = Point::new(0.1, 1.0 + 1e-8);
        let t = connector_transport(&conn, x, y);
        assert!(frob(&(t.matrix - identity(2))) <= 1e-6);
    }

    #[test]
    fn flat_traces_match_words() {
        let g = group();
        let conn = Connection::flat(g.clone(), UnitaryRep::random(&mut ChaCha8Rng::seed_from_u64(6), 2, 2)).unwrap();
        for c in enumerate_primitive_classes(&g, 4) {
            let geo = class_geodesic(&c, &g).unwrap();
            let h = holonomy_class(&conn, &geo, None).unwrap();
            let oracle = conn.rep().eval_word(&c.word).try_inverse().unwrap().trace();
            assert!((h.trace - oracle).norm() <= 1e-12);
        }
    }

    #[test]
    fn holonomy_power_law() {
        let g = group();
        let conn = bumpy(7, 2);
        let c = canonical_class(&"ab".parse().unwrap(), &g).unwrap();
        let c2 = c.power(2, &g).unwrap();
        let h = holonomy_class(&conn, &class_geodesic(&c, &g).unwrap(), None).unwrap();
        let h2 = holonomy_class(&conn, &class_geodesic(&c2, &g).unwrap(), None).unwrap();
        assert!(frob(&(&h.matrix * &h.matrix - &h2.matrix)) <= 1e-7);
    }

    #[test]
    fn trace_is_base_point_independent() {
        let g = group();
        let conn = bumpy(8, 2);
        for w in ["ab", "aab", "aBB"] {
            let c = canonical_class(&w.parse().unwrap(), &g).unwrap();
            let geo = class_geodesic(&c, &g).unwrap();
            let steps = Some(default_steps(geo.length, 512.0));
            let h0 = holonomy_class(&conn, &geo, steps).unwrap();
            let h1 = holonomy_class(&conn, &geo.with_base_shift(0.37 * geo.length), steps).unwrap();
            assert!((h0.trace - h1.trace).norm() <= 1e-8);
        }
    }

    #[test]
    fn mixed_identity() {
        let c1 = bumpy(9, 2);
        let c2 = bumpy(10, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u0 = CMat::from_fn(3, 2, |_, _| crate::linalg::random_complex(&mut rng));
        let chk = mixed_transport_check(&c1, &c2, &crossing(), 3.0, &u0, 200).unwrap();
        assert!(chk.residual <= 1e-7, "{}", chk.residual);
        let zero = mixed_transport_check(&c1, &c2, &crossing(), 3.0, &CMat::zeros(3, 2), 200).unwrap();
        assert_eq!(zero.residual, 0.0);
        let _ = rng.random::<f64>();
    }

    // Slope of log(error) against log(steps), reference at ten times the steps.
    fn fitted_order(conn: &Connection, f: &GeodesicFrame, len: f64) -> f64 {
        let pts: Vec<(f64, f64)> = [32usize, 64, 128, 256, 512]
            .iter()
            .map(|&s| {
                let m = transport_frame(conn, f, 0.0, len, s).unwrap().matrix;
                let r = transport_frame(conn, f, 0.0, len, 10 * s).unwrap().matrix;
                ((s as f64).ln(), frob(&(m - r)).ln())
            })
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        -sxy / sxx
    }

    #[test]
    fn fourth_order_inside_support() {
        let conn = bumpy(12, 2);
        let f = GeodesicFrame::through(Point::new(0.0, (-0.4f64).exp()), Boundary::Infinity);
        let order = fitted_order(&conn, &f, 0.8);
        assert!(order >= 3.5, "{order}");
    }

    #[test]
    fn fourth_order_across_support_boundary() {
        // the profile is only C¹; without the split at the edge this drops
        // to about 2.6
        let conn = bumpy(12, 2);
        let f = crossing();
        let order = fitted_order(&conn, &f, 3.0);
        assert!(order >= 3.5, "{order}");
    }

    #[test]
    fn edge_crossing_finds_the_zero() {
        let t = edge_crossing(|t| t * t - 2.0, 1.0, 2.0);
        assert!((t - 2f64.sqrt()).abs() < 1e-15);
        let t = edge_crossing(|t| 0.3 - t, 1.0, 0.0);
        assert!((t - 0.3).abs() < 1e-15);
    }
}
