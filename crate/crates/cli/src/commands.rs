//! The five subcommands. Each returns its report after writing it, so the
//! same code serves the binary and the tests.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use holonomy_core::bundle::{curvature_eval, mixed_connection, Bump, ConnectionForm};
use holonomy_core::classes::{class_geodesic, enumerate_primitive_classes, ClosedGeodesic};
use holonomy_core::hyperbolic::{Boundary, GeodesicFrame, Point, SurfaceGroup, SurfaceKind};
use holonomy_core::linalg::{frob, identity, random_complex, unvec_row_major, vec_row_major, CMat};
use holonomy_core::parry::{
    canonical_label, character_table, flat_parry_oracle, homoclinic_geodesic, linear_fit, parry_approximant,
    spiral_limit, HomoclinicOrbit, ReferenceOrbit,
};
use holonomy_core::tracemap::{compare_trace_maps, primitive_trace_map, TraceEntry, TraceSequence};
use holonomy_core::transport::{ambrose_singer_check, mixed_transport_check, FermiSquare};
use holonomy_core::word::Word;
use holonomy_core::LabError;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{stream, Lab, RunConfig};
use crate::error::CliError;
use crate::output::{complex, fmt_f64, matrix, Sink};

pub struct Context {
    pub config: RunConfig,
    pub group: Arc<SurfaceGroup>,
    pub sink: Sink,
}

impl Context {
    pub fn new(config: RunConfig, out: Option<PathBuf>) -> Result<Self, CliError> {
        let group = config.group()?;
        Ok(Context { config, group, sink: Sink::new(out)? })
    }

    fn model(&self) -> &'static str {
        match self.group.kind {
            SurfaceKind::Schottky => "schottky",
            SurfaceKind::Genus2 => "genus2",
        }
    }

    fn geodesics(&self) -> Result<Vec<ClosedGeodesic>, CliError> {
        let classes = enumerate_primitive_classes(&self.group, self.config.run.max_word_len);
        Ok(classes.par_iter().map(|c| class_geodesic(c, &self.group)).collect::<Result<_, LabError>>()?)
    }
}

// ---------------------------------------------------------------- enumerate

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassRow {
    pub word: Word,
    pub length: f64,
    pub primitive: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassTable {
    pub model: String,
    pub max_word_len: usize,
    pub classes: Vec<ClassRow>,
}

pub fn cmd_enumerate(ctx: &Context) -> Result<ClassTable, CliError> {
    let classes = enumerate_primitive_classes(&ctx.group, ctx.config.run.max_word_len);
    let table = ClassTable {
        model: ctx.model().into(),
        max_word_len: ctx.config.run.max_word_len,
        classes: classes.into_iter().map(|c| ClassRow { word: c.word, length: c.length, primitive: c.primitive }).collect(),
    };
    ctx.sink.json("classes.json", &table)?;
    let rows: Vec<Vec<String>> =
        table.classes.iter().map(|c| vec![c.word.to_string(), fmt_f64(c.length), c.primitive.to_string()]).collect();
    ctx.sink.csv("classes.csv", &["word", "length", "primitive"], &rows)?;
    Ok(table)
}

// ---------------------------------------------------------------- trace-map

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceRow {
    pub word: Word,
    pub length: f64,
    pub trace: [f64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceMapFile {
    pub model: String,
    pub connection: String,
    pub rank: usize,
    /// `"ode"` for integrated holonomies, `"oracle"` for matrix products.
    pub source: String,
    pub steps_per_unit: f64,
    pub classes: Vec<TraceRow>,
}

impl TraceMapFile {
    fn from_sequence(seq: &TraceSequence, source: &str) -> Self {
        TraceMapFile {
            model: seq.model.clone(),
            connection: seq.connection_id.clone(),
            rank: seq.rank,
            source: source.into(),
            steps_per_unit: seq.steps_per_unit,
            classes: seq
                .entries
                .iter()
                .map(|e| TraceRow { word: e.word.clone(), length: e.length, trace: complex(e.trace) })
                .collect(),
        }
    }

    pub fn to_sequence(&self) -> TraceSequence {
        TraceSequence {
            model: self.model.clone(),
            connection_id: self.connection.clone(),
            rank: self.rank,
            steps_per_unit: self.steps_per_unit,
            entries: self
                .classes
                .iter()
                .map(|r| TraceEntry { word: r.word.clone(), length: r.length, trace: Complex64::new(r.trace[0], r.trace[1]) })
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

fn trace_sequence(ctx: &Context, name: &str, oracle: bool) -> Result<TraceSequence, CliError> {
    let lab = ctx.config.connection(&ctx.group, name)?;
    let geos = ctx.geodesics()?;
    let density = ctx.config.run.ode_steps_per_unit;
    if !oracle {
        return Ok(primitive_trace_map(&lab, &geos, density, ctx.model(), name)?);
    }
    if lab.is_curved() {
        return Err(CliError::Config(format!("--oracle needs a flat connection, {name:?} has bumps")));
    }
    // Hol = ρ(w)⁻¹, and gauges do not change traces
    let entries = geos
        .par_iter()
        .map(|g| TraceEntry {
            word: g.class.word.clone(),
            length: g.length,
            trace: lab.rep().eval_word(&g.class.word).adjoint().trace(),
        })
        .collect();
    Ok(TraceSequence {
        model: ctx.model().into(),
        connection_id: name.into(),
        rank: lab.rank(),
        steps_per_unit: 0.0,
        entries,
    })
}

pub fn cmd_trace_map(ctx: &Context, name: &str, oracle: bool) -> Result<TraceMapFile, CliError> {
    let seq = trace_sequence(ctx, name, oracle)?;
    let (source, stem) = if oracle { ("oracle", format!("trace_map_{name}.oracle")) } else { ("ode", format!("trace_map_{name}")) };
    let file = TraceMapFile::from_sequence(&seq, source);
    ctx.sink.json(&format!("{stem}.json"), &file)?;
    let rows: Vec<Vec<String>> = file
        .classes
        .iter()
        .map(|r| vec![r.word.to_string(), fmt_f64(r.length), fmt_f64(r.trace[0]), fmt_f64(r.trace[1])])
        .collect();
    ctx.sink.csv(&format!("{stem}.csv"), &["word", "length", "trace_re", "trace_im"], &rows)?;
    Ok(file)
}

// ---------------------------------------------------------------- compare

#[derive(Clone, Debug)]
pub enum CompareInput {
    Connections(String, String),
    Files(PathBuf, PathBuf),
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub first: String,
    pub second: String,
    pub compared: usize,
    pub max_abs_deviation: f64,
    pub argmax: Option<Word>,
    pub tol: f64,
    pub equivalent: bool,
}

/// Writes the report in every case; a deviation above `run.tol` is then
/// returned as a tolerance failure.
pub fn cmd_compare(ctx: &Context, input: &CompareInput) -> Result<CompareReport, CliError> {
    let (first, second, s1, s2) = match input {
        CompareInput::Connections(a, b) => (a.clone(), b.clone(), trace_sequence(ctx, a, false)?, trace_sequence(ctx, b, false)?),
        CompareInput::Files(a, b) => (
            a.display().to_string(),
            b.display().to_string(),
            TraceMapFile::load(a)?.to_sequence(),
            TraceMapFile::load(b)?.to_sequence(),
        ),
    };
    let cmp = compare_trace_maps(&s1, &s2, ctx.config.run.tol).map_err(|e| match e {
        LabError::KeyMismatch(m) => CliError::Mismatch(format!("class lists differ: {m}")),
        other => other.into(),
    })?;
    let report = CompareReport {
        first,
        second,
        compared: cmp.compared,
        max_abs_deviation: cmp.max_abs_deviation,
        argmax: cmp.argmax,
        tol: cmp.tol,
        equivalent: cmp.equivalent,
    };
    ctx.sink.json("compare.json", &report)?;
    if !report.equivalent {
        return Err(CliError::Tolerance(format!(
            "max trace deviation {:e} > {:e} at {}",
            report.max_abs_deviation,
            report.tol,
            report.argmax.as_ref().map(|w| w.to_string()).unwrap_or_default()
        )));
    }
    Ok(report)
}

// ---------------------------------------------------------------- parry

#[derive(Clone, Debug, Serialize)]
pub struct OrbitSummary {
    pub a_minus: f64,
    pub a_plus: f64,
    pub k_minus: i64,
    pub k_plus: i64,
    pub theta: Option<f64>,
    pub approach_minus: Vec<f64>,
    pub approach_plus: Vec<f64>,
}

impl From<&HomoclinicOrbit> for OrbitSummary {
    fn from(o: &HomoclinicOrbit) -> Self {
        OrbitSummary {
            a_minus: o.a_minus,
            a_plus: o.a_plus,
            k_minus: o.k_minus,
            k_plus: o.k_plus,
            theta: o.theta,
            approach_minus: o.approach_minus.clone(),
            approach_plus: o.approach_plus.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LabelReport {
    pub label: Word,
    pub canonical: Word,
    pub degenerate: bool,
    pub error: Option<String>,
    pub orbit: Option<OrbitSummary>,
    pub wraps: Vec<usize>,
    /// `‖ρ_n − ρ_N‖_F` for `n < N`.
    pub residuals: Vec<f64>,
    /// Minus the slope of `ln residual` against the wrap count.
    pub decay_rate: Option<f64>,
    pub limit: Option<Vec<[f64; 2]>>,
    pub max_unitarity_defect: Option<f64>,
    /// Distance of the limit from the closed form, for flat connections.
    pub oracle_deviation: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterRow {
    pub word: Vec<usize>,
    pub trace: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct SpiralReport {
    pub offset: f64,
    pub residuals: Vec<f64>,
    pub rate: Option<f64>,
    pub r_squared: Option<f64>,
    pub max_unitarity_defect: f64,
    pub max_identity_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParryReport {
    pub connection: String,
    pub reference: Word,
    pub period: f64,
    pub reference_holonomy: Vec<[f64; 2]>,
    pub labels: Vec<LabelReport>,
    /// Labels (by position in `labels`) entering the character table.
    pub character_labels: Vec<usize>,
    pub character_table: Vec<CharacterRow>,
    pub spiral: SpiralReport,
}

fn decay_rate(wraps: &[usize], residuals: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        wraps.iter().zip(residuals).filter(|(_, r)| **r > 1e-13).map(|(k, r)| (*k as f64, r.ln())).collect();
    if pts.len() < 3 {
        return None;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    Some(-linear_fit(&xs, &ys).0)
}

fn parry_label(ctx: &Context, lab: &Lab, r: &ReferenceOrbit, label: &Word) -> (LabelReport, Option<CMat>) {
    let p = &ctx.config.parry;
    let density = ctx.config.run.ode_steps_per_unit;
    let canonical = canonical_label(&label.reduced(), &r.g_star.word);
    let mut rep = LabelReport {
        label: label.clone(),
        canonical: canonical.clone(),
        degenerate: false,
        error: None,
        orbit: None,
        wraps: Vec::new(),
        residuals: Vec::new(),
        decay_rate: None,
        limit: None,
        max_unitarity_defect: None,
        oracle_deviation: None,
    };
    if let Err(e) = ctx.group.check_word(&canonical) {
        rep.error = Some(e.to_string());
        return (rep, None);
    }
    let orbit = match homoclinic_geodesic(r, &ctx.group.element(&canonical), p.delta) {
        Ok(o) if !o.degenerate => o,
        Ok(_) | Err(LabError::DegenerateEndpoints) => {
            rep.degenerate = true;
            return (rep, None);
        }
        Err(e) => {
            rep.error = Some(e.to_string());
            return (rep, None);
        }
    };
    rep.orbit = Some(OrbitSummary::from(&orbit));
    match parry_approximant(lab, r, &orbit, p.approximants, p.max_wrap, p.wrap_tol, density) {
        Ok(a) => {
            let k = *a.wraps.last().expect("nonempty wraps");
            rep.decay_rate = decay_rate(&a.wraps, &a.residuals);
            rep.max_unitarity_defect = Some(a.max_unitarity_defect);
            if !lab.is_curved() {
                rep.oracle_deviation = Some(frob(&(&a.limit - flat_parry_oracle(lab.rep(), r, &orbit, k, k))));
            }
            rep.limit = Some(matrix(&a.limit));
            rep.wraps = a.wraps;
            rep.residuals = a.residuals;
            (rep, Some(a.limit))
        }
        Err(e) => {
            rep.error = Some(e.to_string());
            (rep, None)
        }
    }
}

pub fn cmd_parry(ctx: &Context, name: &str, reference: &Word, labels: &[Word]) -> Result<ParryReport, CliError> {
    let lab = ctx.config.connection(&ctx.group, name)?;
    let p = &ctx.config.parry;
    let density = ctx.config.run.ode_steps_per_unit;
    let r = ReferenceOrbit::new(&ctx.group, reference)?;
    let holonomy = r.holonomy(&lab, density)?;

    let results: Vec<(LabelReport, Option<CMat>)> = labels.par_iter().map(|h| parry_label(ctx, &lab, &r, h)).collect();
    let character_labels: Vec<usize> = results.iter().enumerate().filter(|(_, x)| x.1.is_some()).map(|(i, _)| i).collect();
    let limits: Vec<CMat> = results.iter().filter_map(|x| x.1.clone()).collect();
    let table = character_table(&limits, lab.rank(), p.depth)?;

    let s = spiral_limit(&lab, &r, r.stable_point(p.spiral_offset), p.spiral_n, density)?;
    let id = identity(lab.rank());
    let spiral = SpiralReport {
        offset: p.spiral_offset,
        max_identity_deviation: s.q.iter().map(|q| frob(&(q - &id))).fold(0.0, f64::max),
        residuals: s.residuals,
        rate: s.rate,
        r_squared: s.r_squared,
        max_unitarity_defect: s.max_unitarity_defect,
    };

    let report = ParryReport {
        connection: name.into(),
        reference: reference.clone(),
        period: r.period,
        reference_holonomy: matrix(&holonomy),
        labels: results.into_iter().map(|x| x.0).collect(),
        character_labels,
        character_table: table.iter().map(|e| CharacterRow { word: e.word.clone(), trace: complex(e.trace) }).collect(),
        spiral,
    };
    ctx.sink.json(&format!("parry_{name}.json"), &report)?;
    let rows: Vec<Vec<String>> = report
        .labels
        .iter()
        .flat_map(|l| {
            l.residuals
                .iter()
                .enumerate()
                .map(move |(n, x)| vec![l.label.to_string(), (n + 1).to_string(), l.wraps[n].to_string(), fmt_f64(*x)])
        })
        .collect();
    ctx.sink.csv(&format!("parry_{name}_decay.csv"), &["label", "n", "wrap", "residual"], &rows)?;

    let failed: Vec<String> =
        report.labels.iter().filter_map(|l| l.error.as_ref().map(|e| format!("{}: {e}", l.label))).collect();
    if !failed.is_empty() {
        return Err(CliError::Tolerance(failed.join("; ")));
    }
    Ok(report)
}

// ---------------------------------------------------------------- checks

/// Tolerances of the batteries before tightening.
pub const AS_FLAT_TOL: f64 = 1e-10;
pub const AS_GAUGED_TOL: f64 = 1e-6;
pub const AS_BUMP_TOL: f64 = 1e-4;
/// Minimal residual ratio under doubling the quadrature nodes.
pub const AS_REFINEMENT: f64 = 2.0;
pub const MIXED_TRANSPORT_TOL: f64 = 1e-7;
pub const MIXED_CURVATURE_TOL: f64 = 1e-5;
pub const SPIRAL_FLAT_TOL: f64 = 1e-10;
pub const SPIRAL_GAUGED_TOL: f64 = 1e-4;
pub const SPIRAL_MIN_R2: f64 = 0.9;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub battery: String,
    pub connection: String,
    pub case: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChecksReport {
    pub tighten: f64,
    pub passed: bool,
    pub rows: Vec<CheckRow>,
}

fn row(battery: &str, connection: &str, case: String, value: f64, tol: f64) -> CheckRow {
    CheckRow { battery: battery.into(), connection: connection.into(), case, value, tol, pass: value <= tol }
}

/// Square of side 0.2 straddling the edge of a support, where the
/// quadrature has work to do.
fn edge_square(b: &Bump) -> FermiSquare {
    FermiSquare::new(GeodesicFrame::through(b.center, Boundary::Infinity), b.radius - 0.1, 0.0, 0.2)
}

fn ambrose_rows(ctx: &Context, name: &str, lab: &Lab, tighten: f64) -> Vec<CheckRow> {
    let c = &ctx.config.checks;
    let check = |sq: &FermiSquare, n: usize| ambrose_singer_check(lab, sq, n, c.steps_per_unit).residual;
    if lab.is_flat() {
        let sq = FermiSquare::new(GeodesicFrame::through(Point::i(), Boundary::Infinity), -0.1, -0.1, 0.2);
        return vec![row("ambrose-singer", name, "square at i".into(), check(&sq, c.nodes), AS_FLAT_TOL / tighten)];
    }
    if !lab.is_curved() {
        // both sides vanish, but the transports still run through the gauge
        return lab
            .gauges()
            .iter()
            .enumerate()
            .map(|(j, g)| {
                let res = check(&edge_square(g), c.nodes);
                row("ambrose-singer", name, format!("gauge {j} edge"), res, AS_GAUGED_TOL / tighten)
            })
            .collect();
    }
    let mut rows = Vec::new();
    for (j, b) in lab.bumps().iter().enumerate() {
        let sq = edge_square(b);
        let coarse = check(&sq, c.nodes);
        let fine = check(&sq, 2 * c.nodes);
        rows.push(row("ambrose-singer", name, format!("bump {j} edge, n = {}", c.nodes), coarse, AS_BUMP_TOL / tighten));
        let mut r = row("ambrose-singer", name, format!("bump {j} edge, n {} -> {}", c.nodes, 2 * c.nodes), coarse / fine, 0.0);
        r.tol = AS_REFINEMENT;
        r.pass = coarse / fine >= AS_REFINEMENT;
        rows.push(r);
    }
    rows
}

fn random_point<R: Rng>(rng: &mut R) -> Point {
    Point::new(rng.random_range(-0.3..0.3), rng.random_range(0.8..1.3))
}

fn mixed_rows(ctx: &Context, a: &str, first: &Lab, b: &str, second: &Lab, tighten: f64) -> Result<Vec<CheckRow>, CliError> {
    let c = &ctx.config.checks;
    let pair = format!("{a}->{b}");
    let mut rng = stream(ctx.config.run.seed, &format!("mixed:{pair}"));
    let (r1, r2) = (first.rank(), second.rank());
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for _ in 0..c.mixed_segments {
        let (p, q) = (random_point(&mut rng), random_point(&mut rng));
        let u0 = CMat::from_fn(r2, r1, |_, _| random_complex(&mut rng));
        let len = p.distance(q);
        let steps = ((c.steps_per_unit as f64 * len).ceil() as usize).max(64);
        let check = mixed_transport_check(first, second, &GeodesicFrame::between(p, q), len, &u0, steps)?;
        worst = worst.max(check.residual);
    }
    rows.push(row("mixed", &pair, format!("transport, {} segments", c.mixed_segments), worst, MIXED_TRANSPORT_TOL / tighten));
    let m = mixed_connection(first.clone(), second.clone());
    let mut worst = 0.0f64;
    for _ in 0..c.curvature_points {
        let z = random_point(&mut rng);
        let u = CMat::from_fn(r2, r1, |_, _| random_complex(&mut rng));
        let lhs = unvec_row_major(&(curvature_eval(&m, z) * vec_row_major(&u)), r2, r1);
        let rhs = curvature_eval(second, z) * &u - &u * curvature_eval(first, z);
        worst = worst.max(frob(&(lhs - rhs)));
    }
    rows.push(row("mixed", &pair, format!("curvature, {} points", c.curvature_points), worst, MIXED_CURVATURE_TOL / tighten));
    Ok(rows)
}

fn spiral_rows(ctx: &Context, name: &str, lab: &Lab, tighten: f64) -> Result<Vec<CheckRow>, CliError> {
    let p = &ctx.config.parry;
    let r = ReferenceOrbit::new(&ctx.group, &p.reference)?;
    let s = spiral_limit(lab, &r, r.stable_point(p.spiral_offset), p.spiral_n, ctx.config.run.ode_steps_per_unit)?;
    let id = identity(lab.rank());
    let dev = s.q.iter().map(|q| frob(&(q - &id))).fold(0.0, f64::max);
    if !lab.is_curved() {
        let tol = if lab.is_flat() { SPIRAL_FLAT_TOL } else { SPIRAL_GAUGED_TOL };
        return Ok(vec![row("spiral", name, "q_n = I".into(), dev, tol / tighten)]);
    }
    let floor = s.residuals.iter().cloned().fold(0.0, f64::max);
    if floor <= 1e-12 {
        // the bumps miss the reference axis and q_n is already constant
        return Ok(vec![row("spiral", name, "constant q_n".into(), floor, 1e-12)]);
    }
    let decreasing = s.residuals.get(2..).map(|t| t.windows(2).all(|w| w[1] < w[0])).unwrap_or(false);
    let r2 = s.r_squared.unwrap_or(0.0);
    let rate = s.rate.unwrap_or(0.0);
    let monotone = row("spiral", name, "residuals decreasing from n = 3".into(), if decreasing { 0.0 } else { 1.0 }, 0.0);
    let mut slope = row("spiral", name, "decay rate".into(), rate, 0.0);
    slope.pass = rate > 0.0;
    let mut fit = row("spiral", name, "log-linear fit R^2".into(), r2, SPIRAL_MIN_R2);
    fit.pass = r2 >= SPIRAL_MIN_R2;
    Ok(vec![monotone, slope, fit])
}

pub fn cmd_checks(ctx: &Context, tighten: f64) -> Result<ChecksReport, CliError> {
    if !(tighten > 0.0) {
        return Err(CliError::Config(format!("--tighten must be positive, got {tighten}")));
    }
    let names = ctx.config.connection_names();
    if names.is_empty() {
        return Err(CliError::Config("checks need at least one connection".into()));
    }
    let labs: Vec<Lab> = names.iter().map(|n| ctx.config.connection(&ctx.group, n)).collect::<Result<_, _>>()?;
    let mut pairs: Vec<(usize, usize)> = (0..names.len()).flat_map(|i| (i + 1..names.len()).map(move |j| (i, j))).collect();
    if pairs.is_empty() {
        pairs.push((0, 0));
    }

    let per_conn: Vec<Vec<CheckRow>> = (0..names.len())
        .into_par_iter()
        .map(|i| -> Result<Vec<CheckRow>, CliError> {
            let mut rows = ambrose_rows(ctx, &names[i], &labs[i], tighten);
            rows.extend(spiral_rows(ctx, &names[i], &labs[i], tighten)?);
            Ok(rows)
        })
        .collect::<Result<_, _>>()?;
    let per_pair: Vec<Vec<CheckRow>> = pairs
        .par_iter()
        .map(|&(i, j)| mixed_rows(ctx, &names[i], &labs[i], &names[j], &labs[j], tighten))
        .collect::<Result<_, _>>()?;

    let rows: Vec<CheckRow> = per_conn.into_iter().chain(per_pair).flatten().collect();
    let passed = rows.iter().all(|r| r.pass);
    let report = ChecksReport { tighten, passed, rows };
    ctx.sink.json("checks.json", &report)?;
    if !passed {
        let bad: Vec<String> = report
            .rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| format!("{} {} {}: {:e} vs {:e}", r.battery, r.connection, r.case, r.value, r.tol))
            .collect();
        return Err(CliError::Tolerance(bad.join("; ")));
    }
    Ok(report)
}
