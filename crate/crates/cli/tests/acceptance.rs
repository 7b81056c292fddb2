//! Acceptance battery. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use holonomy_core::bundle::{curvature_eval, mixed_connection, BumpForm, Connection, GaugeElement, Gauged, UnitaryRep};
use holonomy_core::classes::{class_geodesic, enumerate_primitive_classes, ClosedGeodesic};
use holonomy_core::hyperbolic::{build_surface, Boundary, GeodesicFrame, Point, SurfaceGroup, SurfaceSpec};
use holonomy_core::linalg::{frob, random_complex, random_skew_hermitian, random_unitary, unvec_row_major, vec_row_major, CMat};
use holonomy_core::parry::{
    commutant_dimension, distinguishing_word, shadowing_profile, solve_intertwiner, spiral_limit, ReferenceOrbit,
};
use holonomy_core::tracemap::{compare_trace_maps, primitive_trace_map, recover_line_characters, TraceEntry, TraceSequence, WordFamily};
use holonomy_core::transport::{ambrose_singer_check, mixed_transport_check, FermiSquare};
use holonomy_core::word::{Letter, Word};
use holonomy_lab::{run, Cli, Command};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_TOL: f64 = 1e-6;
const ORACLE_SECONDS: f64 = 60.0;
const GAUGE_TOL: f64 = 1e-6;
const AS_FLAT_TOL: f64 = 1e-10;
const AS_BUMP_TOL: f64 = 1e-4;
const AS_REFINEMENT: f64 = 2.0;
const MIXED_TRANSPORT_TOL: f64 = 1e-7;
const MIXED_CURVATURE_TOL: f64 = 1e-5;
const SPIRAL_MIN_R2: f64 = 0.9;
const INTERTWINER_TOL: f64 = 1e-8;
const RECOVERY_TOL: f64 = 1e-6;
const RELATOR_TOL: f64 = 1e-9;

/// Density for integrated holonomies through gauge supports.
const GAUGE_DENSITY: f64 = 256.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn schottky() -> Arc<SurfaceGroup> {
    Arc::new(build_surface(&SurfaceSpec::schottky(2, 3.0)).unwrap())
}

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn geodesics(g: &SurfaceGroup, max_len: usize) -> Vec<ClosedGeodesic> {
    enumerate_primitive_classes(g, max_len).iter().map(|c| class_geodesic(c, g).unwrap()).collect()
}

fn oracle_sequence(rep: &UnitaryRep, geos: &[ClosedGeodesic]) -> TraceSequence {
    let entries = geos
        .iter()
        .map(|geo| TraceEntry {
            word: geo.class.word.clone(),
            length: geo.length,
            trace: rep.eval_word(&geo.class.word).try_inverse().unwrap().trace(),
        })
        .collect();
    TraceSequence { model: "schottky".into(), connection_id: "oracle".into(), rank: rep.rank(), steps_per_unit: 0.0, entries }
}

fn flat_oracle() -> Outcome {
    let g = schottky();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let rep = UnitaryRep::random(&mut rng, 2, 2);
    let start = Instant::now();
    let geos = geodesics(&g, 6);
    let oracle = oracle_sequence(&rep, &geos);
    let flat = Connection::flat(g.clone(), rep.clone()).unwrap();
    let ode = primitive_trace_map(&flat, &geos, 32.0, "schottky", "flat").unwrap();
    let dev = compare_trace_maps(&ode, &oracle, ORACLE_TOL).unwrap().max_abs_deviation;
    let flat_secs = start.elapsed().as_secs_f64();
    // the flat form vanishes in the domain, so also push a gauged copy
    // through the integrator
    let start = Instant::now();
    let x = random_skew_hermitian(&mut rng, 2, 1.5);
    let gauged = Gauged::new(flat, GaugeElement::new(Point::new(0.1, 1.0), 0.4, x).unwrap()).unwrap();
    let ode = primitive_trace_map(&gauged, &geos, GAUGE_DENSITY, "schottky", "gauged").unwrap();
    let gauged_dev = compare_trace_maps(&ode, &oracle, ORACLE_TOL).unwrap().max_abs_deviation;
    let gauged_secs = start.elapsed().as_secs_f64();
    outcome(
        dev <= ORACLE_TOL && gauged_dev <= ORACLE_TOL && flat_secs <= ORACLE_SECONDS,
        format!(
            "{} classes, flat dev {dev:.2e} in {flat_secs:.1} s, gauged dev {gauged_dev:.2e} in {gauged_secs:.1} s (tol {ORACLE_TOL:e}, {ORACLE_SECONDS} s)",
            geos.len()
        ),
    )
}

fn gauge_invariance() -> Outcome {
    let g = schottky();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let bump = BumpForm::random(&mut rng, Point::i(), 0.5, 2, 1.0);
    let conn = Connection::new(g.clone(), UnitaryRep::random(&mut rng, 2, 2), vec![bump]).unwrap();
    let geos: Vec<_> = geodesics(&g, 5).into_iter().take(50).collect();
    let base = primitive_trace_map(&conn, &geos, GAUGE_DENSITY, "schottky", "base").unwrap();
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let center = Point::new(rng.random_range(-0.2..0.2), rng.random_range(0.85..1.2));
        let radius = rng.random_range(0.3..0.5);
        let x = random_skew_hermitian(&mut rng, 2, 1.5);
        let gauged = Gauged::new(conn.clone(), GaugeElement::new(center, radius, x).unwrap()).unwrap();
        let t = primitive_trace_map(&gauged, &geos, GAUGE_DENSITY, "schottky", "gauged").unwrap();
        worst = worst.max(compare_trace_maps(&base, &t, GAUGE_TOL).unwrap().max_abs_deviation);
    }
    outcome(worst <= GAUGE_TOL, format!("5 gauges x {} classes, max dev {worst:.2e} (tol {GAUGE_TOL:e})", geos.len()))
}

fn ambrose_singer() -> Outcome {
    let g = schottky();
    let frame = GeodesicFrame::through(Point::i(), Boundary::Infinity);
    let flat = Connection::flat(g.clone(), UnitaryRep::random(&mut ChaCha8Rng::seed_from_u64(1), 2, 2)).unwrap();
    let at_i = FermiSquare::new(frame.clone(), -0.1, -0.1, 0.2);
    let flat_res = ambrose_singer_check(&flat, &at_i, 16, 400).residual;

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = BumpForm::random(&mut rng, Point::i(), 0.5, 2, 1.0);
    let bumpy = Connection::new(g, UnitaryRep::random(&mut rng, 2, 2), vec![f]).unwrap();
    // straddles the edge of the support, where the integrand is not smooth
    let edge = FermiSquare::new(frame, 0.4, 0.0, 0.2);
    let coarse = ambrose_singer_check(&bumpy, &edge, 16, 400).residual;
    let fine = ambrose_singer_check(&bumpy, &edge, 32, 400).residual;
    let ratio = coarse / fine;
    outcome(
        flat_res <= AS_FLAT_TOL && coarse <= AS_BUMP_TOL && ratio >= AS_REFINEMENT,
        format!("flat {flat_res:.2e}, bump n=16 {coarse:.2e}, n=32 {fine:.2e}, ratio {ratio:.2}"),
    )
}

fn mixed_identities() -> Outcome {
    let g = schottky();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let c1 = Connection::new(g.clone(), UnitaryRep::random(&mut rng, 2, 2), vec![BumpForm::random(&mut rng, Point::i(), 0.5, 2, 1.0)])
        .unwrap();
    let c2 = Connection::new(g, UnitaryRep::random(&mut rng, 3, 2), vec![BumpForm::random(&mut rng, Point::new(0.1, 1.05), 0.45, 3, 1.0)])
        .unwrap();
    let point = |rng: &mut ChaCha8Rng| Point::new(rng.random_range(-0.3..0.3), rng.random_range(0.8..1.3));
    let mut transport = 0.0f64;
    for _ in 0..10 {
        let (p, q) = (point(&mut rng), point(&mut rng));
        let u0 = CMat::from_fn(3, 2, |_, _| random_complex(&mut rng));
        let len = p.distance(q);
        let steps = ((400.0 * len).ceil() as usize).max(64);
        let chk = mixed_transport_check(&c1, &c2, &GeodesicFrame::between(p, q), len, &u0, steps).unwrap();
        transport = transport.max(chk.residual);
    }
    let m = mixed_connection(c1.clone(), c2.clone());
    let mut curvature = 0.0f64;
    for _ in 0..20 {
        let z = point(&mut rng);
        let u = CMat::from_fn(3, 2, |_, _| random_complex(&mut rng));
        let lhs = unvec_row_major(&(curvature_eval(&m, z) * vec_row_major(&u)), 3, 2);
        let rhs = curvature_eval(&c2, z) * &u - &u * curvature_eval(&c1, z);
        curvature = curvature.max(frob(&(lhs - rhs)));
    }
    outcome(
        transport <= MIXED_TRANSPORT_TOL && curvature <= MIXED_CURVATURE_TOL,
        format!("transport {transport:.2e} on 10 segments, curvature {curvature:.2e} at 20 points"),
    )
}

fn spiral() -> Outcome {
    let g = schottky();
    let r = ReferenceOrbit::new(&g, &w("a")).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for seed in [5, 6, 7] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = UnitaryRep::random(&mut rng, 2, 2);
        let bump = BumpForm::random(&mut rng, Point::i(), 0.5, 2, 1.0);
        let conn = Connection::new(g.clone(), rep, vec![bump]).unwrap();
        let s = spiral_limit(&conn, &r, r.stable_point(0.35), 8, GAUGE_DENSITY).unwrap();
        let decreasing = s.residuals[2..].windows(2).all(|p| p[1] < p[0]);
        let rate = s.rate.unwrap_or(0.0);
        let r2 = s.r_squared.unwrap_or(0.0);
        pass &= decreasing && rate > 0.0 && r2 >= SPIRAL_MIN_R2;
        parts.push(format!("seed {seed}: slope {:.3}, R2 {r2:.3}{}", -rate, if decreasing { "" } else { ", not decreasing" }));
    }
    outcome(pass, parts.join("; "))
}

fn intertwiners() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut worst = 0.0f64;
    let mut recovered = 0;
    for _ in 0..10 {
        let rho = UnitaryRep::random(&mut rng, 2, 2);
        let u = random_unitary(&mut rng, 2);
        let it = solve_intertwiner(&rho.conjugated_by(&u), &rho).unwrap();
        if let (Some(p), Some(res)) = (it.unitary, it.residual) {
            // p = λu with |λ| = 1
            let phase = (u.adjoint() * &p).trace() / 2.0;
            let err = frob(&(&p - &u * phase)).max((phase.norm() - 1.0).abs()).max(res);
            worst = worst.max(err);
            recovered += (err <= INTERTWINER_TOL) as usize;
        }
    }
    let mut separated = 0;
    for _ in 0..10 {
        let r1 = UnitaryRep::random(&mut rng, 2, 2);
        let r2 = UnitaryRep::random(&mut rng, 2, 2);
        let it = solve_intertwiner(&r1, &r2).unwrap();
        let d = distinguishing_word(&r1, &r2, 4, 1e-8);
        let witnessed = d.is_some_and(|d| (r1.trace(&d.word) - r2.trace(&d.word)).norm() > 1e-8);
        separated += (it.unitary.is_none() && it.basis.is_empty() && witnessed) as usize;
    }
    outcome(
        recovered == 10 && separated == 10,
        format!("{recovered}/10 conjugators recovered (worst {worst:.2e}), {separated}/10 distinct pairs separated"),
    )
}

fn commutants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let chi = UnitaryRep::character(&[0.4, 1.1]);
    let chi2 = UnitaryRep::character(&[-0.3, 2.0]);
    let u = random_unitary(&mut rng, 2);
    let dims = [
        commutant_dimension(&UnitaryRep::random(&mut rng, 2, 2)),
        commutant_dimension(&UnitaryRep::trivial(2, 2)),
        commutant_dimension(&chi.direct_sum(&chi).unwrap().conjugated_by(&u)),
        commutant_dimension(&chi.direct_sum(&chi2).unwrap().conjugated_by(&u)),
    ];
    outcome(dims == [1, 4, 4, 2], format!("irreducible {}, trivial {}, chi+chi {}, chi1+chi2 {}", dims[0], dims[1], dims[2], dims[3]))
}

/// Every reduced word, cyclically reduced by hand, kept if it is not a proper
/// power, keyed by its least rotation.
fn brute_force_classes(max_len: usize) -> BTreeSet<Word> {
    let letters: Vec<Letter> = (0..2).flat_map(|j| [Letter::new(j, false), Letter::new(j, true)]).collect();
    let mut frontier: Vec<Vec<Letter>> = vec![vec![]];
    let mut out = BTreeSet::new();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for v in &frontier {
            for &l in &letters {
                if v.last().is_some_and(|&p| p == l.inv()) {
                    continue;
                }
                let mut u = v.clone();
                u.push(l);
                next.push(u);
            }
        }
        for v in &next {
            if v.first().unwrap().inv() == *v.last().unwrap() {
                continue;
            }
            let n = v.len();
            let power = (1..n).any(|d| n % d == 0 && (0..n).all(|i| v[i] == v[i % d]));
            if power {
                continue;
            }
            let least = (0..n).map(|s| Word([&v[s..], &v[..s]].concat())).min().unwrap();
            out.insert(least);
        }
        frontier = next;
    }
    out
}

fn enumeration() -> Outcome {
    let g = schottky();
    let got: BTreeSet<Word> = enumerate_primitive_classes(&g, 6).into_iter().map(|c| c.word).collect();
    let expect = brute_force_classes(6);
    outcome(got == expect, format!("{} enumerated, {} by brute force", got.len(), expect.len()))
}

fn shadowing() -> Outcome {
    let g = schottky();
    let r = ReferenceOrbit::new(&g, &w("a")).unwrap();
    let labels = [g.element(&w("b")), g.element(&w("B"))];
    let mids: Vec<f64> = [2, 4, 6]
        .iter()
        .map(|&k| {
            let p = shadowing_profile(&r, &labels, &[k], 40).unwrap();
            p.segments.iter().map(|s| s.mid_distance).fold(0.0, f64::max)
        })
        .collect();
    let monotone = mids.windows(2).all(|p| p[1] < p[0]);
    let b = g.element(&w("b"));
    let sym = shadowing_profile(&r, &[b.clone(), b.clone()], &[4], 10).unwrap().primitive;
    let asym = shadowing_profile(&r, &[b.clone(), b], &[4, 7], 10).unwrap().primitive;
    outcome(
        monotone && asym && !sym,
        format!("mid distances {:.2e} {:.2e} {:.2e}; (b,b) wraps 4,4 primitive {sym}, wraps 4,7 primitive {asym}", mids[0], mids[1], mids[2]),
    )
}

fn abelian_recovery() -> Outcome {
    let g = schottky();
    let geos = geodesics(&g, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let mut failures = 0;
    let mut worst = 0.0f64;
    for k in 1..=3usize {
        for _ in 0..20 {
            let args: Vec<Vec<f64>> = (0..k).map(|_| vec![rng.random_range(-PI..PI), rng.random_range(-PI..PI)]).collect();
            let rep = args
                .iter()
                .map(|a| UnitaryRep::character(a))
                .reduce(|a, b| a.direct_sum(&b).unwrap())
                .unwrap();
            let seq = oracle_sequence(&rep, &geos);
            let ok = recover_line_characters(&seq, k, 2, WordFamily::Conjugated).ok().and_then(|r| {
                // each recovered tuple must be one of the inputs
                let matched = args.iter().all(|a| {
                    r.tuples.iter().any(|t| {
                        (t[0] - Complex64::from_polar(1.0, a[0])).norm() <= RECOVERY_TOL
                            && (t[1] - Complex64::from_polar(1.0, a[1])).norm() <= RECOVERY_TOL
                    })
                });
                worst = worst.max(r.residual);
                (matched && r.residual <= RECOVERY_TOL).then_some(())
            });
            failures += ok.is_none() as usize;
        }
    }
    outcome(failures == 0, format!("60 trials (k = 1, 2, 3), {failures} failures, max residual {worst:.2e}"))
}

fn model_construction() -> Outcome {
    let genus2 = build_surface(&SurfaceSpec::Genus2 {}).unwrap();
    let relator = genus2.relator_residual();
    // ping-pong: l⁻¹ carries everything outside the l⁻¹ region into the l region
    let g = schottky();
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let region = |l: Letter| g.sides.iter().find(|s| s.letter == l).unwrap();
    let mut violations = 0;
    let mut tested = 0;
    for l in g.letters() {
        let (from, to) = (region(l.inv()), region(l));
        let m = g.letter_matrix(l.inv());
        let mut n = 0;
        while n < 500 {
            let p = Point::new(rng.random_range(-4.0..4.0), rng.random_range(0.05..4.0));
            if from.contains(p) {
                continue;
            }
            n += 1;
            violations += (!to.contains(m.apply(p))) as usize;
        }
        tested += n;
    }
    // the four boundary arcs are pairwise disjoint
    let mut disjoint = true;
    for (i, s) in g.sides.iter().enumerate() {
        for t in &g.sides[i + 1..] {
            let gap = (s.center_angle - t.center_angle).rem_euclid(2.0 * PI);
            let gap = gap.min(2.0 * PI - gap);
            disjoint &= gap > s.half_width + t.half_width;
        }
    }
    outcome(
        relator <= RELATOR_TOL && violations == 0 && disjoint,
        format!("genus-2 relator {relator:.2e}; ping-pong {violations} violations in {tested} samples, arcs disjoint {disjoint}"),
    )
}

const DETERMINISM_CONFIG: &str = r#"{
  "surface": {"kind": "schottky", "generators": [{"lambda": 3.0, "angle": 0.0}, {"lambda": 3.0, "angle": 1.5707963267948966}]},
  "connections": {
    "bumpy": {"rank": 2, "rep": "random", "bumps": [{"center": [0.0, 1.0], "radius": 0.5}]}
  },
  "run": {"max_word_len": 4, "ode_steps_per_unit": 64, "seed": 3}
}"#;

fn trace_map_bytes(config: &Path, threads: usize) -> Vec<u8> {
    let out = tempfile::tempdir().unwrap();
    let cli = Cli {
        config: config.to_path_buf(),
        out: Some(out.path().to_path_buf()),
        threads: Some(threads),
        seed: None,
        oracle: false,
        command: Command::TraceMap { connection: "bumpy".into() },
    };
    run(&cli).unwrap();
    std::fs::read(out.path().join("trace_map_bumpy.json")).unwrap()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("lab.json");
    std::fs::write(&config, DETERMINISM_CONFIG).unwrap();
    let one = trace_map_bytes(&config, 1);
    let eight = trace_map_bytes(&config, 8);
    outcome(one == eight, format!("{} bytes, threads 1 and 8 identical: {}", one.len(), one == eight))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("flat oracle equivalence", flat_oracle),
        ("gauge invariance", gauge_invariance),
        ("Ambrose-Singer", ambrose_singer),
        ("mixed-connection identities", mixed_identities),
        ("spiral convergence", spiral),
        ("character rigidity", intertwiners),
        ("commutant dimensions", commutants),
        ("enumeration exactness", enumeration),
        ("shadowing signature", shadowing),
        ("abelian recovery", abelian_recovery),
        ("model construction", model_construction),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failed += !o.pass as usize;
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {name}: {} [{:.1} s]", i + 1, o.detail, start.elapsed().as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
