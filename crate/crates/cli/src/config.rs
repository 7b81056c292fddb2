//! The JSON run configuration and its realisation as concrete connections.
//!
//! Complex matrices are row-major arrays of `[re, im]` pairs. Anything left
//! unspecified that needs randomness (representations, bump coefficients,
//! gauge generators) is drawn from a ChaCha8 stream derived from the run seed
//! and the connection name, so adding a connection never perturbs the others.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use holonomy_core::bundle::{Bump, BumpForm, Connection, ConnectionForm, GaugeElement, Gauged, UnitaryRep};
use holonomy_core::hyperbolic::{build_surface, Point, SurfaceGroup, SurfaceSpec};
use holonomy_core::linalg::{random_skew_hermitian, CMat};
use holonomy_core::word::Word;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Row-major `[re, im]` pairs.
pub type MatrixSpec = Vec<[f64; 2]>;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub connections: BTreeMap<String, ConnectionSpec>,
    #[serde(default)]
    pub run: RunParams,
    #[serde(default)]
    pub parry: ParrySpec,
    #[serde(default)]
    pub checks: ChecksSpec,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunParams {
    pub max_word_len: usize,
    pub ode_steps_per_unit: f64,
    pub tol: f64,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams { max_word_len: 4, ode_steps_per_unit: 32.0, tol: 1e-6, seed: 0, threads: None }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSpec {
    /// Optional when `base` is given.
    pub rank: Option<usize>,
    /// Start from another connection: its representation and bumps are
    /// reused, and the bumps and gauges here are added on top.
    pub base: Option<String>,
    #[serde(default)]
    pub rep: Option<RepSpec>,
    #[serde(default)]
    pub bumps: Vec<BumpSpec>,
    /// Applied in order, each to the result of the previous one.
    #[serde(default)]
    pub gauges: Vec<GaugeSpec>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepSpec {
    #[default]
    Trivial,
    Random,
    /// One matrix per generator.
    Matrices(Vec<MatrixSpec>),
    /// Rank 1 only: the phase of each generator.
    Phases(Vec<f64>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub coeff_dx: Option<MatrixSpec>,
    pub coeff_dy: Option<MatrixSpec>,
    /// Scale of the random coefficients used when none are given.
    #[serde(default = "one")]
    pub scale: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub generator: Option<MatrixSpec>,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParrySpec {
    pub reference: Word,
    pub labels: Vec<Word>,
    pub depth: usize,
    pub approximants: usize,
    pub max_wrap: usize,
    pub wrap_tol: f64,
    pub delta: f64,
    /// Horocyclic offset of the spiral base point `x₀`.
    pub spiral_offset: f64,
    pub spiral_n: usize,
}

impl Default for ParrySpec {
    fn default() -> Self {
        ParrySpec {
            reference: Word::gen(0),
            labels: vec![Word::gen(1)],
            depth: 2,
            approximants: 6,
            max_wrap: 1000,
            wrap_tol: 0.1,
            delta: holonomy_core::parry::DEFAULT_DELTA,
            spiral_offset: 0.35,
            spiral_n: 8,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksSpec {
    /// Gauss–Legendre nodes per direction.
    pub nodes: usize,
    pub steps_per_unit: usize,
    pub mixed_segments: usize,
    pub curvature_points: usize,
}

impl Default for ChecksSpec {
    fn default() -> Self {
        ChecksSpec { nodes: 16, steps_per_unit: 400, mixed_segments: 10, curvature_points: 20 }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let run = &self.run;
        if !(run.tol > 0.0) {
            return bad(format!("run.tol must be positive, got {}", run.tol));
        }
        if !(run.ode_steps_per_unit > 0.0) {
            return bad(format!("run.ode_steps_per_unit must be positive, got {}", run.ode_steps_per_unit));
        }
        if run.max_word_len == 0 {
            return bad("run.max_word_len must be at least 1".into());
        }
        if run.threads == Some(0) {
            return bad("run.threads must be at least 1".into());
        }
        for (name, c) in &self.connections {
            match (&c.base, c.rank) {
                (None, None) => return bad(format!("connections.{name}: rank is required")),
                (None, Some(0)) => return bad(format!("connections.{name}.rank must be at least 1")),
                (Some(b), _) if !self.connections.contains_key(b) => {
                    return bad(format!("connections.{name}.base: no connection named {b:?}"))
                }
                (Some(_), _) if c.rep.is_some() => {
                    return bad(format!("connections.{name}: rep cannot be combined with base"))
                }
                _ => {}
            }
        }
        if self.parry.depth > 3 {
            return bad(format!("parry.depth must be at most 3, got {}", self.parry.depth));
        }
        if self.parry.spiral_n < 3 {
            return bad(format!("parry.spiral_n must be at least 3, got {}", self.parry.spiral_n));
        }
        if !(self.parry.wrap_tol > 0.0) || !(self.parry.delta > 0.0) {
            return bad("parry.wrap_tol and parry.delta must be positive".into());
        }
        Ok(())
    }

    pub fn group(&self) -> Result<Arc<SurfaceGroup>, CliError> {
        Ok(Arc::new(build_surface(&self.surface)?))
    }

    pub fn connection_names(&self) -> Vec<String> {
        self.connections.keys().cloned().collect()
    }

    pub fn connection(&self, group: &Arc<SurfaceGroup>, name: &str) -> Result<Lab, CliError> {
        Ok(self.parts(group, name, 0)?.finish())
    }

    fn parts(&self, group: &Arc<SurfaceGroup>, name: &str, depth: usize) -> Result<Parts, CliError> {
        let spec = self
            .connections
            .get(name)
            .ok_or_else(|| CliError::Config(format!("no connection named {name:?}")))?;
        if depth > self.connections.len() {
            return Err(CliError::Config(format!("connections.{name}: cyclic base chain")));
        }
        let base = match &spec.base {
            Some(b) => Some(self.parts(group, b, depth + 1)?),
            None => None,
        };
        spec.build(group, name, base, &mut stream(self.run.seed, name))
    }
}

/// ChaCha8 stream `hash(name)` of the run seed.
pub fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    // FNV-1a, fixed so that streams do not depend on the std hasher
    let key = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    rng
}

pub fn matrix(spec: &MatrixSpec, rank: usize, what: &str) -> Result<CMat, CliError> {
    if spec.len() != rank * rank {
        return Err(CliError::Config(format!("{what}: expected {} entries, got {}", rank * rank, spec.len())));
    }
    Ok(CMat::from_row_iterator(rank, rank, spec.iter().map(|[re, im]| Complex64::new(*re, *im))))
}

fn point(p: [f64; 2], what: &str) -> Result<Point, CliError> {
    if !(p[1] > 0.0) {
        return Err(CliError::Config(format!("{what}: center must lie in the upper half-plane")));
    }
    Ok(Point::new(p[0], p[1]))
}

/// A connection before its gauges are applied.
struct Parts {
    conn: Connection,
    gauges: Vec<GaugeElement>,
}

impl Parts {
    fn finish(self) -> Lab {
        let bumps: Vec<Bump> = self.conn.bumps().iter().map(|b| b.bump).collect();
        let gauges: Vec<Bump> = self.gauges.iter().map(|g| g.bump).collect();
        let mut form: Arc<dyn ConnectionForm> = Arc::new(self.conn);
        for g in self.gauges {
            let inner = Lab { form, bumps: bumps.clone(), gauges: Vec::new() };
            form = Arc::new(Gauged::new(inner, g).expect("gauge checked when built"));
        }
        Lab { form, bumps, gauges }
    }
}

impl ConnectionSpec {
    fn build(&self, group: &Arc<SurfaceGroup>, name: &str, base: Option<Parts>, rng: &mut ChaCha8Rng) -> Result<Parts, CliError> {
        let n = group.rank();
        let r = match (&base, self.rank) {
            (Some(b), Some(r)) if b.conn.rank() != r => {
                return Err(CliError::Config(format!("connections.{name}: rank {r} differs from its base")))
            }
            (Some(b), _) => b.conn.rank(),
            (None, r) => r.expect("validated"),
        };
        let rep = match (&base, self.rep.as_ref().unwrap_or(&RepSpec::Trivial)) {
            (Some(b), _) => b.conn.rep().clone(),
            (None, RepSpec::Trivial) => UnitaryRep::trivial(r, n),
            (None, RepSpec::Random) => UnitaryRep::random(rng, r, n),
            (None, RepSpec::Matrices(ms)) => {
                let gens = ms
                    .iter()
                    .enumerate()
                    .map(|(j, m)| matrix(m, r, &format!("connections.{name}.rep[{j}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                UnitaryRep::new(gens)?
            }
            (None, RepSpec::Phases(args)) => {
                if r != 1 {
                    return Err(CliError::Config(format!("connections.{name}: phases need rank 1")));
                }
                UnitaryRep::character(args)
            }
        };
        let mut bumps = base.as_ref().map(|b| b.conn.bumps().to_vec()).unwrap_or_default();
        for (j, b) in self.bumps.iter().enumerate() {
            let what = format!("connections.{name}.bumps[{j}]");
            let center = point(b.center, &what)?;
            bumps.push(match (&b.coeff_dx, &b.coeff_dy) {
                (Some(dx), Some(dy)) => BumpForm::new(center, b.radius, matrix(dx, r, &what)?, matrix(dy, r, &what)?)?,
                (None, None) => BumpForm::random(rng, center, b.radius, r, b.scale),
                _ => return Err(CliError::Config(format!("{what}: give both coeff_dx and coeff_dy or neither"))),
            });
        }
        let conn = Connection::new(group.clone(), rep, bumps)?;
        let mut gauges = base.map(|b| b.gauges).unwrap_or_default();
        for (j, g) in self.gauges.iter().enumerate() {
            let what = format!("connections.{name}.gauges[{j}]");
            let x = match &g.generator {
                Some(m) => matrix(m, r, &what)?,
                None => random_skew_hermitian(rng, r, g.scale),
            };
            let gauge = GaugeElement::new(point(g.center, &what)?, g.radius, x)?;
            gauge.bump.check(group)?;
            gauges.push(gauge);
        }
        Ok(Parts { conn, gauges })
    }
}

/// A configured connection of any shape, cheap to clone.
#[derive(Clone)]
pub struct Lab {
    form: Arc<dyn ConnectionForm>,
    bumps: Vec<Bump>,
    gauges: Vec<Bump>,
}

impl Lab {
    /// False when the connection is a gauge transform of a flat one.
    pub fn is_curved(&self) -> bool {
        !self.bumps.is_empty()
    }

    /// Supports of the curvature terms.
    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    /// Supports of the gauge transformations.
    pub fn gauges(&self) -> &[Bump] {
        &self.gauges
    }
}

impl ConnectionForm for Lab {
    fn rank(&self) -> usize {
        self.form.rank()
    }

    fn rep(&self) -> &UnitaryRep {
        self.form.rep()
    }

    fn group(&self) -> &SurfaceGroup {
        self.form.group()
    }

    fn eval(&self, z: Point, v: Complex64) -> CMat {
        self.form.eval(z, v)
    }

    fn is_flat(&self) -> bool {
        self.form.is_flat()
    }

    fn edge_offsets(&self, z: Point, out: &mut Vec<f64>) {
        self.form.edge_offsets(z, out)
    }
}
