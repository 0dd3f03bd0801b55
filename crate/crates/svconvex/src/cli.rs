//! Problem/solution file formats and the command dispatcher behind the
//! `svconvex` binary.
//!
//! A problem file carries a version tag, one shared ordered-space block, and
//! named objects (set-valued functions, scalar functions, upper sets, linear
//! maps), plus optional direction and dual-triple lists. Reports echo the
//! command, list one verdict per check, and emit every produced set in
//! canonical H-representation so that downstream diffing is textual. Two runs
//! on identical input produce byte-identical reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::duality;
use crate::error::{Error, Result};
use crate::linalg::LinMap;
use crate::oracle;
use crate::polyhedra::Polyhedron;
use crate::scalar_fn::ScalarFn;
use crate::upperset_fn::{OrderedSpace, SetFn, UpperSet};
use crate::xreal::{parse_rat, Rat, XReal};

pub const DEFAULT_MAX_DIM: usize = 6;

fn max_dim() -> usize {
    std::env::var("SVCONVEX_MAX_DIM")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

// ---------------------------------------------------------------------------
// problem files
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct RawSpace {
    m: usize,
    cone_rays: Vec<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawObject {
    Setfn {
        n: usize,
        epi: serde_json::Value,
    },
    Scalarfn {
        n: usize,
        epi: serde_json::Value,
    },
    Upperset {
        body: serde_json::Value,
    },
    Linmap {
        matrix: Vec<Vec<String>>,
    },
}

#[derive(Deserialize)]
struct RawProblem {
    version: u32,
    space: Option<RawSpace>,
    #[serde(default)]
    objects: BTreeMap<String, RawObject>,
    #[serde(default)]
    directions: Vec<Vec<String>>,
    #[serde(default)]
    triples: Vec<RawTriple>,
}

#[derive(Deserialize)]
struct RawTriple {
    xstar: Vec<String>,
    zstar: Vec<String>,
    r: String,
}

/// A named object loaded from a problem file.
#[derive(Clone, Debug)]
pub enum Object {
    Set(SetFn),
    Scalar(ScalarFn),
    Upper(UpperSet),
    Map(LinMap),
}

/// Validated problem file.
#[derive(Debug)]
pub struct ProblemFile {
    pub version: u32,
    pub space: Option<OrderedSpace>,
    pub objects: BTreeMap<String, Object>,
    pub directions: Vec<Vec<Rat>>,
    pub triples: Vec<(Vec<Rat>, Vec<Rat>, XReal)>,
}

fn parse_rat_vec(path: &str, raw: &[String]) -> Result<Vec<Rat>> {
    raw.iter()
        .enumerate()
        .map(|(i, s)| {
            parse_rat(s).map_err(|e| Error::schema(format!("{path}/{i}"), e.to_string()))
        })
        .collect()
}

/// Parse and validate a problem file; errors carry JSON-pointer paths.
pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let raw: RawProblem = serde_json::from_str(text)
        .map_err(|e| Error::schema("/", format!("malformed problem file: {e}")))?;
    if raw.version != 1 {
        return Err(Error::schema(
            "/version",
            format!("unsupported version {}", raw.version),
        ));
    }
    let cap = max_dim();
    let space = match &raw.space {
        None => None,
        Some(s) => {
            if s.m > cap {
                return Err(Error::dim(format!(
                    "/space/m: ambient dimension {} exceeds cap {cap}",
                    s.m
                )));
            }
            let mut rays = Vec::new();
            for (i, ray) in s.cone_rays.iter().enumerate() {
                rays.push(parse_rat_vec(&format!("/space/cone_rays/{i}"), ray)?);
            }
            Some(OrderedSpace::new(s.m, &rays)?)
        }
    };

    let mut objects = BTreeMap::new();
    for (name, obj) in &raw.objects {
        let path = format!("/objects/{name}");
        let parsed = match obj {
            RawObject::Setfn { n, epi } => {
                let sp = space.clone().ok_or_else(|| {
                    Error::cone(format!("{path}: setfn requires a cone block"))
                })?;
                if *n > cap {
                    return Err(Error::dim(format!("{path}/n: exceeds cap {cap}")));
                }
                let epi: Polyhedron = serde_json::from_value(epi.clone())
                    .map_err(|e| Error::schema(format!("{path}/epi"), e.to_string()))?;
                Object::Set(SetFn::from_epi(*n, sp, epi)?)
            }
            RawObject::Scalarfn { n, epi } => {
                if *n > cap {
                    return Err(Error::dim(format!("{path}/n: exceeds cap {cap}")));
                }
                let epi: Polyhedron = serde_json::from_value(epi.clone())
                    .map_err(|e| Error::schema(format!("{path}/epi"), e.to_string()))?;
                Object::Scalar(ScalarFn::from_epi(*n, epi)?)
            }
            RawObject::Upperset { body } => {
                let sp = space.clone().ok_or_else(|| {
                    Error::cone(format!("{path}: upperset requires a cone block"))
                })?;
                let body: Polyhedron = serde_json::from_value(body.clone())
                    .map_err(|e| Error::schema(format!("{path}/body"), e.to_string()))?;
                Object::Upper(UpperSet::new(sp, body)?)
            }
            RawObject::Linmap { matrix } => {
                let mut rows = Vec::new();
                for (i, row) in matrix.iter().enumerate() {
                    rows.push(parse_rat_vec(&format!("{path}/matrix/{i}"), row)?);
                }
                Object::Map(LinMap::new(rows)?)
            }
        };
        objects.insert(name.clone(), parsed);
    }

    let mut directions = Vec::new();
    for (i, d) in raw.directions.iter().enumerate() {
        directions.push(parse_rat_vec(&format!("/directions/{i}"), d)?);
    }
    let mut triples = Vec::new();
    for (i, t) in raw.triples.iter().enumerate() {
        let xstar = parse_rat_vec(&format!("/triples/{i}/xstar"), &t.xstar)?;
        let zstar = parse_rat_vec(&format!("/triples/{i}/zstar"), &t.zstar)?;
        let r: XReal = t
            .r
            .parse()
            .map_err(|e: Error| Error::schema(format!("/triples/{i}/r"), e.to_string()))?;
        triples.push((xstar, zstar, r));
    }

    Ok(ProblemFile {
        version: raw.version,
        space,
        objects,
        directions,
        triples,
    })
}

/// Canonical emission of a problem file; `parse ∘ emit` is the identity on
/// canonical files.
pub fn emit_problem(p: &ProblemFile) -> String {
    let mut root = serde_json::Map::new();
    root.insert("version".into(), serde_json::json!(p.version));
    if let Some(space) = &p.space {
        root.insert(
            "space".into(),
            serde_json::to_value(space).expect("space serializes"),
        );
    }
    let mut objs = serde_json::Map::new();
    for (name, obj) in &p.objects {
        let v = match obj {
            Object::Set(g) => {
                let mut m = serde_json::Map::new();
                m.insert("kind".into(), "setfn".into());
                m.insert("n".into(), serde_json::json!(g.n()));
                m.insert("epi".into(), serde_json::to_value(g.epi()).unwrap());
                serde_json::Value::Object(m)
            }
            Object::Scalar(f) => {
                let mut m = serde_json::Map::new();
                m.insert("kind".into(), "scalarfn".into());
                m.insert("n".into(), serde_json::json!(f.n()));
                m.insert("epi".into(), serde_json::to_value(f.epi()).unwrap());
                serde_json::Value::Object(m)
            }
            Object::Upper(a) => {
                let mut m = serde_json::Map::new();
                m.insert("kind".into(), "upperset".into());
                m.insert("body".into(), serde_json::to_value(a.body()).unwrap());
                serde_json::Value::Object(m)
            }
            Object::Map(t) => {
                let mut m = serde_json::Map::new();
                m.insert("kind".into(), "linmap".into());
                m.insert("matrix".into(), serde_json::to_value(t).unwrap());
                serde_json::Value::Object(m)
            }
        };
        objs.insert(name.clone(), v);
    }
    root.insert("objects".into(), serde_json::Value::Object(objs));
    if !p.directions.is_empty() {
        let dirs: Vec<Vec<String>> = p
            .directions
            .iter()
            .map(|d| d.iter().map(crate::xreal::rat_to_string).collect())
            .collect();
        root.insert("directions".into(), serde_json::to_value(dirs).unwrap());
    }
    if !p.triples.is_empty() {
        let ts: Vec<serde_json::Value> = p
            .triples
            .iter()
            .map(|(xs, zs, r)| {
                serde_json::json!({
                    "xstar": xs.iter().map(crate::xreal::rat_to_string).collect::<Vec<_>>(),
                    "zstar": zs.iter().map(crate::xreal::rat_to_string).collect::<Vec<_>>(),
                    "r": r.to_string(),
                })
            })
            .collect();
        root.insert("triples".into(), serde_json::Value::Array(ts));
    }
    let mut out = serde_json::to_string_pretty(&serde_json::Value::Object(root)).unwrap();
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// report files
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Equal,
    Contained,
    Strict,
    Failed,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    /// What the check verifies, stated by mathematical content.
    pub statement: String,
    pub verdict: Verdict,
}

#[derive(Serialize)]
pub struct ReportFile {
    pub version: u32,
    pub command: String,
    pub checks: Vec<CheckReport>,
    pub sets: BTreeMap<String, serde_json::Value>,
    pub values: BTreeMap<String, serde_json::Value>,
    pub exit_code: i32,
}

impl ReportFile {
    fn new(command: &str) -> Self {
        ReportFile {
            version: 1,
            command: command.to_string(),
            checks: Vec::new(),
            sets: BTreeMap::new(),
            values: BTreeMap::new(),
            exit_code: 0,
        }
    }

    fn check(&mut self, name: impl Into<String>, statement: &str, verdict: Verdict) {
        self.checks.push(CheckReport {
            name: name.into(),
            statement: statement.to_string(),
            verdict,
        });
        if verdict == Verdict::Failed {
            self.exit_code = 2;
        }
    }

    fn set(&mut self, name: impl Into<String>, p: &Polyhedron, emit_vrep: bool) {
        let mut v = serde_json::to_value(p).expect("polyhedron serializes");
        if emit_vrep {
            v.as_object_mut().unwrap().insert(
                "vrep".into(),
                serde_json::to_value(p.vrep()).expect("vrep serializes"),
            );
        }
        self.sets.insert(name.into(), v);
    }

    fn value(&mut self, name: impl Into<String>, v: impl Serialize) {
        self.values
            .insert(name.into(), serde_json::to_value(v).expect("serializes"));
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

// ---------------------------------------------------------------------------
// command line
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "svconvex",
    about = "Exact set-valued convex analysis over polyhedral ordering cones"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Also include V-representations in emitted sets.
    #[arg(long, global = true)]
    pub emit_vrep: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Scalarize a set-valued function along a dual direction.
    Scalarize {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        object: Option<String>,
        #[arg(long)]
        zstar: String,
    },
    /// Lift a scalar function to halfspace-valued form along a direction.
    Setify {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        object: Option<String>,
        #[arg(long)]
        zstar: String,
    },
    /// Evaluate the set-valued conjugate at a dual triple.
    Conjugate {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        object: Option<String>,
        #[arg(long)]
        xstar: String,
        #[arg(long)]
        zstar: String,
        #[arg(long)]
        r: String,
    },
    /// Biconjugate with the two-route cross-check.
    Biconj {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        object: Option<String>,
    },
    /// Inf-residuation of two upper sets: a ⊖ b.
    Residuate {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Minkowski sum of two upper sets.
    Minkowski {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Chain-rule evaluation at dual triples.
    Chain {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long = "T")]
        t: String,
        #[arg(long = "S")]
        s: Option<String>,
        /// Dual triples: "auto" or a problem file with a triples block.
        #[arg(long, default_value = "auto")]
        triples: String,
    },
    /// Sandwich theorem along a direction.
    Sandwich {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long = "T")]
        t: String,
        #[arg(long)]
        zstar: String,
    },
    /// Fenchel–Rockafellar duality with per-direction dual values.
    Fr {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long = "T")]
        t: String,
        /// "auto" (facet normals plus dual rays) or a problem file with a
        /// directions block.
        #[arg(long, default_value = "auto")]
        directions: String,
    },
    /// Fundamental duality formula on a product domain.
    Fundamental {
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        object: Option<String>,
        /// Size of the perturbation block (last ny domain coordinates).
        #[arg(long)]
        ny: usize,
        #[arg(long, default_value = "auto")]
        directions: String,
        #[arg(long)]
        xbar: Option<String>,
    },
    /// Grid-based brute-force evaluators.
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
    /// Run the built-in invariant suite on fixed instances.
    Selftest,
}

#[derive(Subcommand, Debug)]
pub enum OracleOp {
    /// Reproduce the non-closed scalarization phenomenon.
    NonclosedDemo,
    /// Conjugate sweep over scalar samples.
    Conjugate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        xstar: String,
    },
    /// Scalarization sweep over set-valued samples.
    Scalarize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        zstar: String,
    },
    /// Pairwise Minkowski sweep.
    Minkowski {
        #[arg(long)]
        input: PathBuf,
    },
    /// Residual sweep over a lattice.
    Residual {
        #[arg(long)]
        input: PathBuf,
    },
}

fn parse_vec_flag(flag: &str) -> Result<Vec<Rat>> {
    flag.split(',')
        .map(|s| parse_rat(s.trim()))
        .collect::<Result<Vec<Rat>>>()
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<ProblemFile> {
    parse_problem(&read_file(path)?)
}

fn pick_setfn(p: &ProblemFile, name: Option<&str>, default: &str) -> Result<SetFn> {
    let key = name.unwrap_or(default);
    if let Some(Object::Set(g)) = p.objects.get(key) {
        return Ok(g.clone());
    }
    let sets: Vec<&SetFn> = p
        .objects
        .values()
        .filter_map(|o| match o {
            Object::Set(g) => Some(g),
            _ => None,
        })
        .collect();
    match sets.as_slice() {
        [only] => Ok((*only).clone()),
        _ => Err(Error::schema(
            format!("/objects/{key}"),
            "no such set-valued function (and no unique default)",
        )),
    }
}

fn pick_scalarfn(p: &ProblemFile, name: Option<&str>, default: &str) -> Result<ScalarFn> {
    let key = name.unwrap_or(default);
    if let Some(Object::Scalar(f)) = p.objects.get(key) {
        return Ok(f.clone());
    }
    let fns: Vec<&ScalarFn> = p
        .objects
        .values()
        .filter_map(|o| match o {
            Object::Scalar(f) => Some(f),
            _ => None,
        })
        .collect();
    match fns.as_slice() {
        [only] => Ok((*only).clone()),
        _ => Err(Error::schema(
            format!("/objects/{key}"),
            "no such scalar function (and no unique default)",
        )),
    }
}

fn pick_upperset(p: &ProblemFile, default: &str) -> Result<UpperSet> {
    if let Some(Object::Upper(a)) = p.objects.get(default) {
        return Ok(a.clone());
    }
    let us: Vec<&UpperSet> = p
        .objects
        .values()
        .filter_map(|o| match o {
            Object::Upper(a) => Some(a),
            _ => None,
        })
        .collect();
    match us.as_slice() {
        [only] => Ok((*only).clone()),
        _ => Err(Error::schema(
            format!("/objects/{default}"),
            "no such upper set (and no unique default)",
        )),
    }
}

/// `id` or `idN`, or a problem file holding a linmap object.
fn load_map(spec: &str, default_dim: usize) -> Result<LinMap> {
    if spec == "id" {
        return Ok(LinMap::identity(default_dim));
    }
    if let Some(stripped) = spec.strip_prefix("id") {
        if let Ok(n) = stripped.parse::<usize>() {
            return Ok(LinMap::identity(n));
        }
    }
    let p = load_problem(Path::new(spec))?;
    let maps: Vec<&LinMap> = p
        .objects
        .values()
        .filter_map(|o| match o {
            Object::Map(t) => Some(t),
            _ => None,
        })
        .collect();
    match maps.as_slice() {
        [only] => Ok((*only).clone()),
        _ => Err(Error::schema("/objects", "expected exactly one linmap")),
    }
}

fn verdict_of(b: bool, on_true: Verdict) -> Verdict {
    if b {
        on_true
    } else {
        Verdict::Failed
    }
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

/// Execute a parsed command; `Err` means a usage/input error (exit 1), while
/// theorem-level failures come back as reports with exit code 2.
pub fn dispatch(cli: &Cli) -> Result<ReportFile> {
    let ev = cli.emit_vrep;
    match &cli.command {
        Command::Scalarize { g, object, zstar } => {
            let p = load_problem(g)?;
            let g = pick_setfn(&p, object.as_deref(), "g")?;
            let zs = parse_vec_flag(zstar)?;
            let phi = g.scalarize(&zs)?;
            let mut report = ReportFile::new("scalarize");
            report.set("scalarization_epi", phi.epi(), ev);
            Ok(report)
        }
        Command::Setify { f, object, zstar } => {
            let p = load_problem(f)?;
            let space = p
                .space
                .clone()
                .ok_or_else(|| Error::cone("setify requires a cone block"))?;
            let f = pick_scalarfn(&p, object.as_deref(), "f")?;
            let zs = parse_vec_flag(zstar)?;
            let s = SetFn::setify(&f, &space, &zs)?;
            let mut report = ReportFile::new("setify");
            report.set("setification_epi", s.epi(), ev);
            Ok(report)
        }
        Command::Conjugate {
            g,
            object,
            xstar,
            zstar,
            r,
        } => {
            let p = load_problem(g)?;
            let g = pick_setfn(&p, object.as_deref(), "g")?;
            let xs = parse_vec_flag(xstar)?;
            let zs = parse_vec_flag(zstar)?;
            let rv: XReal = r.parse()?;
            let v = g.conjugate(&xs, &zs, &rv)?;
            let mut report = ReportFile::new("conjugate");
            report.value("conjugate", &v);
            report.set("conjugate_value", &v.materialize(), ev);
            Ok(report)
        }
        Command::Biconj { g, object } => {
            let p = load_problem(g)?;
            let g = pick_setfn(&p, object.as_deref(), "g")?;
            let mut report = ReportFile::new("biconj");
            match g.biconjugate() {
                Ok(bi) => {
                    report.check(
                        "biconjugate-routes",
                        "generator hull equals the conaffine-minorant intersection",
                        Verdict::Equal,
                    );
                    report.set("biconjugate_epi", bi.epi(), ev);
                }
                Err(Error::TheoremViolation(msg)) => {
                    report.check("biconjugate-routes", &msg, Verdict::Failed);
                }
                Err(e) => return Err(e),
            }
            Ok(report)
        }
        Command::Residuate { a, b } => {
            let pa = load_problem(a)?;
            let pb = load_problem(b)?;
            let a = pick_upperset(&pa, "a")?;
            let b = pick_upperset(&pb, "b")?;
            let res = a.residual(&b)?;
            let mut report = ReportFile::new("residuate");
            report.set("residual", res.body(), ev);
            Ok(report)
        }
        Command::Minkowski { a, b } => {
            let pa = load_problem(a)?;
            let pb = load_problem(b)?;
            let a = pick_upperset(&pa, "a")?;
            let b = pick_upperset(&pb, "b")?;
            let sum = a.add(&b)?;
            let mut report = ReportFile::new("minkowski");
            report.set("sum", sum.body(), ev);
            Ok(report)
        }
        Command::Chain { g, f, t, s, triples } => {
            let pg = load_problem(g)?;
            let pf = load_problem(f)?;
            let gfn = pick_setfn(&pg, None, "g")?;
            let ffn = pick_setfn(&pf, None, "f")?;
            let tmap = load_map(t, gfn.n())?;
            let smap = match s {
                Some(spec) => load_map(spec, ffn.n())?,
                None => load_map(t, gfn.n())?.adjoint(),
            };
            let trs: Vec<(Vec<Rat>, Vec<Rat>, XReal)> = if triples == "auto" {
                if !pg.triples.is_empty() {
                    pg.triples.clone()
                } else {
                    gfn.scalarization_directions()
                        .into_iter()
                        .filter(|z| !crate::linalg::is_zero_vec(z))
                        .map(|z| (crate::linalg::zeros(gfn.n()), z, XReal::zero()))
                        .collect()
                }
            } else {
                load_problem(Path::new(triples))?.triples
            };
            let rep = duality::set_chain_rule(&gfn, &ffn, &tmap, &smap, &trs)?;
            let mut report = ReportFile::new("chain");
            for (i, e) in rep.entries.iter().enumerate() {
                report.check(
                    format!("chain-containment[{i}]"),
                    "conjugate of the sum contains the convolution chain",
                    verdict_of(e.chain_ok, Verdict::Contained),
                );
                report.check(
                    format!("square-identity[{i}]"),
                    "conjugate of the convolution equals its attainment form",
                    verdict_of(e.square_lhs_eq_attain, Verdict::Equal),
                );
                if e.qualified {
                    report.check(
                        format!("sum-strong[{i}]"),
                        "qualified instances close the chain with a witness",
                        verdict_of(e.sum_equalities_hold && e.witness.is_some(), Verdict::Equal),
                    );
                } else {
                    report.check(
                        format!("sum-strong[{i}]"),
                        "unqualified instance: chain reported only",
                        if e.sum_equalities_hold {
                            Verdict::Equal
                        } else {
                            Verdict::Strict
                        },
                    );
                }
                report.value(format!("entry_{i}"), e);
            }
            Ok(report)
        }
        Command::Sandwich { g, f, t, zstar } => {
            let pg = load_problem(g)?;
            let pf = load_problem(f)?;
            let gfn = pick_setfn(&pg, None, "g")?;
            let ffn = pick_setfn(&pf, None, "f")?;
            let tmap = load_map(t, gfn.n())?;
            let zs = parse_vec_flag(zstar)?;
            let rep = duality::sandwich(&gfn, &ffn, &tmap, &zs)?;
            let mut report = ReportFile::new("sandwich");
            report.check(
                "inclusions",
                "g ⊆ conaffine middle ⊆ residuated upper bound",
                verdict_of(rep.inclusions_verified, Verdict::Contained),
            );
            report.check(
                "memberships",
                "z₀ lies in both conjugate values",
                verdict_of(rep.membership_verified, Verdict::Contained),
            );
            if let Some(touch) = &rep.touching {
                report.check(
                    "touching-conjugates",
                    "touching instances pin both conjugate values",
                    verdict_of(touch.conjugate_equalities_hold, Verdict::Equal),
                );
            }
            report.value("witness", &rep);
            Ok(report)
        }
        Command::Fr { g, f, t, directions } => {
            let pg = load_problem(g)?;
            let pf = load_problem(f)?;
            let gfn = pick_setfn(&pg, None, "g")?;
            let ffn = pick_setfn(&pf, None, "f")?;
            let tmap = load_map(t, gfn.n())?;
            let dirs = if directions == "auto" {
                if pg.directions.is_empty() {
                    None
                } else {
                    Some(pg.directions.clone())
                }
            } else {
                Some(load_problem(Path::new(directions))?.directions)
            };
            let rep = duality::fenchel_rockafellar(&gfn, &ffn, &tmap, dirs.as_deref())?;
            let mut report = ReportFile::new("fr");
            report.set("primal", rep.primal.body(), ev);
            for e in &rep.entries {
                let tag = e
                    .zstar
                    .iter()
                    .map(crate::xreal::rat_to_string)
                    .collect::<Vec<_>>()
                    .join(",");
                report.check(
                    format!("weak-duality[{tag}]"),
                    "the dual value contains the primal set",
                    verdict_of(e.weak_ok, Verdict::Contained),
                );
                match e.strong_ok {
                    Some(ok) if e.qualified => report.check(
                        format!("strong-duality[{tag}]"),
                        "closure of primal plus halfspace equals the dual value",
                        verdict_of(ok, Verdict::Equal),
                    ),
                    Some(ok) => report.check(
                        format!("strong-duality[{tag}]"),
                        "unqualified instance: equality reported only",
                        if ok { Verdict::Equal } else { Verdict::Strict },
                    ),
                    None => report.check(
                        format!("strong-duality[{tag}]"),
                        "zero direction: dual value is the whole space",
                        Verdict::Skipped,
                    ),
                }
                report.set(format!("dual[{tag}]"), &e.dual_value.materialize(), ev);
                if let Some(w) = &e.witness {
                    report.value(
                        format!("witness[{tag}]"),
                        w.iter().map(crate::xreal::rat_to_string).collect::<Vec<_>>(),
                    );
                }
            }
            if let Some(ok) = rep.intersection_equals_primal {
                report.check(
                    "primal-intersection",
                    "the directionwise dual values intersect to the primal set",
                    verdict_of(ok, Verdict::Equal),
                );
            }
            Ok(report)
        }
        Command::Fundamental {
            h,
            object,
            ny,
            directions,
            xbar,
        } => {
            let ph = load_problem(h)?;
            let hfn = pick_setfn(&ph, object.as_deref(), "h")?;
            let dirs = if directions == "auto" {
                if ph.directions.is_empty() {
                    None
                } else {
                    Some(ph.directions.clone())
                }
            } else {
                Some(load_problem(Path::new(directions))?.directions)
            };
            let xb = match xbar {
                Some(s) => Some(parse_vec_flag(s)?),
                None => None,
            };
            let rep = duality::fundamental_duality(&hfn, *ny, dirs.as_deref(), xb.as_deref())?;
            let mut report = ReportFile::new("fundamental");
            report.set("projection", rep.projection.body(), ev);
            for e in &rep.entries {
                let tag = e
                    .zstar
                    .iter()
                    .map(crate::xreal::rat_to_string)
                    .collect::<Vec<_>>()
                    .join(",");
                if e.weak_only {
                    report.check(
                        format!("duality[{tag}]"),
                        "improper direction: weak inclusion only",
                        Verdict::Skipped,
                    );
                } else {
                    report.check(
                        format!("duality[{tag}]"),
                        "union of slices equals the residuated dual intersection",
                        verdict_of(e.equal, Verdict::Equal),
                    );
                }
                if let Some(att) = &e.attainment {
                    report.check(
                        format!("attainment[{tag}]"),
                        "direct slice equality matches the subdifferential inclusion",
                        verdict_of(att.attains_direct == att.subdiff_inclusion, Verdict::Equal),
                    );
                }
            }
            if let Some(ok) = rep.intersection_equals_projection {
                report.check(
                    "projection-intersection",
                    "facet-direction duals intersect to the hull of the slices",
                    verdict_of(ok, Verdict::Equal),
                );
            }
            report.value("entries", &rep.entries);
            Ok(report)
        }
        Command::Oracle { op } => oracle_dispatch(op),
        Command::Selftest => Ok(selftest()),
    }
}

// ---------------------------------------------------------------------------
// oracle subcommands
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct ScalarSamplesJson {
    samples: Vec<ScalarSampleJson>,
}

#[derive(Deserialize)]
struct ScalarSampleJson {
    x: Vec<String>,
    value: String,
}

#[derive(Deserialize)]
struct SetSamplesJson {
    samples: Vec<SetSampleJson>,
}

#[derive(Deserialize)]
struct SetSampleJson {
    x: Vec<String>,
    points: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct MinkowskiInputJson {
    a_points: Vec<Vec<String>>,
    b_points: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct ResidualInputJson {
    a_rows: Vec<ResidualRowJson>,
    b_points: Vec<Vec<String>>,
    lattice: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct ResidualRowJson {
    a: Vec<String>,
    b: String,
}

fn parse_points(path: &str, raw: &[Vec<String>]) -> Result<Vec<Vec<Rat>>> {
    raw.iter()
        .enumerate()
        .map(|(i, p)| parse_rat_vec(&format!("{path}/{i}"), p))
        .collect()
}

fn oracle_dispatch(op: &OracleOp) -> Result<ReportFile> {
    match op {
        OracleOp::NonclosedDemo => {
            let rep = oracle::nonclosed_scalarization_demo();
            let mut report = ReportFile::new("oracle nonclosed-demo");
            let ok_pos = rep
                .positive_values
                .iter()
                .all(|(_, v)| *v == XReal::zero());
            report.check(
                "positive-values",
                "the scalarization vanishes at every sampled x > 0",
                verdict_of(ok_pos, Verdict::Equal),
            );
            report.check(
                "value-at-zero",
                "the scalarization is +inf at 0",
                verdict_of(rep.phi_at_zero == XReal::PosInf, Verdict::Equal),
            );
            report.check(
                "closure-at-zero",
                "the lower closure at 0 is 0",
                verdict_of(rep.closure_at_zero == XReal::zero(), Verdict::Equal),
            );
            report.value("demo", &rep);
            Ok(report)
        }
        OracleOp::Conjugate { input, xstar } => {
            let raw: ScalarSamplesJson = serde_json::from_str(&read_file(input)?)
                .map_err(|e| Error::schema("/", e.to_string()))?;
            let mut samples = Vec::new();
            for (i, s) in raw.samples.iter().enumerate() {
                let x = parse_rat_vec(&format!("/samples/{i}/x"), &s.x)?;
                let v: XReal = s.value.parse()?;
                samples.push((x, v));
            }
            let g = oracle::GridScalarFn { samples };
            let xs = parse_vec_flag(xstar)?;
            let v = oracle::grid_conjugate(&g, &xs);
            let mut report = ReportFile::new("oracle conjugate");
            report.value("conjugate_lower_bound", &v);
            Ok(report)
        }
        OracleOp::Scalarize { input, zstar } => {
            let raw: SetSamplesJson = serde_json::from_str(&read_file(input)?)
                .map_err(|e| Error::schema("/", e.to_string()))?;
            let mut samples = Vec::new();
            for (i, s) in raw.samples.iter().enumerate() {
                let x = parse_rat_vec(&format!("/samples/{i}/x"), &s.x)?;
                let pts = parse_points(&format!("/samples/{i}/points"), &s.points)?;
                samples.push((x, pts));
            }
            let g = oracle::GridSetFn { samples };
            let zs = parse_vec_flag(zstar)?;
            let phi = oracle::grid_scalarize(&g, &zs);
            let mut report = ReportFile::new("oracle scalarize");
            let vals: Vec<serde_json::Value> = phi
                .samples
                .iter()
                .map(|(x, v)| {
                    serde_json::json!({
                        "x": x.iter().map(crate::xreal::rat_to_string).collect::<Vec<_>>(),
                        "value": v.to_string(),
                    })
                })
                .collect();
            report.value("scalarization_upper_bounds", vals);
            Ok(report)
        }
        OracleOp::Minkowski { input } => {
            let raw: MinkowskiInputJson = serde_json::from_str(&read_file(input)?)
                .map_err(|e| Error::schema("/", e.to_string()))?;
            let a = parse_points("/a_points", &raw.a_points)?;
            let b = parse_points("/b_points", &raw.b_points)?;
            let sums = oracle::grid_minkowski(&a, &b);
            let mut report = ReportFile::new("oracle minkowski");
            let vals: Vec<Vec<String>> = sums
                .iter()
                .map(|p| p.iter().map(crate::xreal::rat_to_string).collect())
                .collect();
            report.value("inner_points", vals);
            Ok(report)
        }
        OracleOp::Residual { input } => {
            let raw: ResidualInputJson = serde_json::from_str(&read_file(input)?)
                .map_err(|e| Error::schema("/", e.to_string()))?;
            let mut rows = Vec::new();
            for (i, row) in raw.a_rows.iter().enumerate() {
                let a = parse_rat_vec(&format!("/a_rows/{i}/a"), &row.a)?;
                let b = parse_rat(&row.b)
                    .map_err(|e| Error::schema(format!("/a_rows/{i}/b"), e.to_string()))?;
                rows.push((a, b));
            }
            let b = parse_points("/b_points", &raw.b_points)?;
            let lattice = parse_points("/lattice", &raw.lattice)?;
            let pts = oracle::grid_residual(&rows, &b, &lattice);
            let mut report = ReportFile::new("oracle residual");
            let vals: Vec<Vec<String>> = pts
                .iter()
                .map(|p| p.iter().map(crate::xreal::rat_to_string).collect())
                .collect();
            report.value("lattice_points", vals);
            Ok(report)
        }
    }
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

/// Deterministic invariant suite over built-in fixtures; returns a report
/// whose exit code is 2 when any check fails.
pub fn selftest() -> ReportFile {
    use crate::xreal::{rat, idif, inf_add, sup_add, sdif};
    let mut report = ReportFile::new("selftest");

    // residuation adjunction over the symbolic grid
    let grid = [
        XReal::NegInf,
        XReal::from_int(-1),
        XReal::zero(),
        XReal::from_int(1),
        XReal::PosInf,
    ];
    let mut adjunction_ok = true;
    let mut duality_ok = true;
    for a in &grid {
        for b in &grid {
            duality_ok &= idif(a, b) == sup_add(a, &b.negate());
            duality_ok &= sdif(a, b) == inf_add(a, &b.negate());
            for t in &grid {
                adjunction_ok &= (*a <= inf_add(b, t)) == (idif(a, b) <= *t);
            }
        }
    }
    report.check(
        "residuation-adjunction",
        "a ≤ b ⊕ t iff a ⊖ b ≤ t on the symbolic grid",
        verdict_of(adjunction_ok, Verdict::Equal),
    );
    report.check(
        "residuation-identities",
        "both residuations reduce to additions with negation",
        verdict_of(duality_ok, Verdict::Equal),
    );

    let r = |n: i64| rat(n, 1);
    let space = OrderedSpace::orthant(2);

    // halfspace calculus on a fixed instance
    let a_set = Polyhedron::from_generators(
        2,
        &[vec![r(1), r(2)]],
        &[vec![r(1), r(0)], vec![r(0), r(1)]],
    );
    let zstar = vec![r(0), r(-1)];
    let alpha = XReal::from_int(1);
    let sigma = a_set.support(&zstar);
    let lhs = a_set
        .minkowski_sum(
            &crate::upperset_fn::HalfSpaceValue::new(space.clone(), zstar.clone(), alpha.clone())
                .expect("dual direction")
                .materialize(),
        )
        .expect("same dim");
    let rhs = crate::upperset_fn::HalfSpaceValue::new(
        space.clone(),
        zstar.clone(),
        inf_add(&alpha, &sigma.negate()),
    )
    .expect("dual direction")
    .materialize();
    report.check(
        "halfspace-shift",
        "cl(A + H_α(z*)) matches the support-shifted halfspace",
        verdict_of(lhs.equal(&rhs), Verdict::Equal),
    );

    // staircase duality fixture
    let g = SetFn::from_generators(
        1,
        space.clone(),
        &[vec![r(0), r(0), r(1)], vec![r(1), r(1), r(0)]],
        &[],
    )
    .expect("fixture");
    let cone_value =
        UpperSet::closure_of(space.clone(), &Polyhedron::singleton(vec![r(0), r(0)]))
            .expect("fixture");
    let f = SetFn::constant(1, &cone_value).expect("fixture");
    let t = LinMap::identity(1);
    match duality::fenchel_rockafellar(&g, &f, &t, None) {
        Ok(rep) => {
            let weak = rep.entries.iter().all(|e| e.weak_ok);
            let strong = rep
                .entries
                .iter()
                .all(|e| e.strong_ok.unwrap_or(true));
            report.check(
                "staircase-weak-duality",
                "every dual value contains the primal set",
                verdict_of(weak, Verdict::Contained),
            );
            report.check(
                "staircase-strong-duality",
                "every qualified direction closes the gap",
                verdict_of(strong, Verdict::Equal),
            );
            report.check(
                "staircase-intersection",
                "dual values intersect to the primal set",
                verdict_of(
                    rep.intersection_equals_primal == Some(true),
                    Verdict::Equal,
                ),
            );
        }
        Err(e) => report.check("staircase-duality", &e.to_string(), Verdict::Failed),
    }

    // biconjugate route agreement on the staircase
    match g.biconjugate() {
        Ok(bi) => report.check(
            "biconjugate-routes",
            "generator hull equals the conaffine intersection",
            verdict_of(bi.equal(&g), Verdict::Equal),
        ),
        Err(e) => report.check("biconjugate-routes", &e.to_string(), Verdict::Failed),
    }

    // chain-rule gap fixture
    let empty = SetFn::constant_empty(1, space.clone());
    let whole = SetFn::constant(1, &UpperSet::whole(space.clone())).expect("fixture");
    let triples = vec![(vec![r(0)], vec![r(0), r(-1)], XReal::zero())];
    match duality::set_chain_rule(&empty, &whole, &t, &LinMap::identity(1), &triples) {
        Ok(rep) => {
            let e = &rep.entries[0];
            report.check(
                "chain-gap",
                "the improper pair leaves a strict convolution gap",
                verdict_of(
                    e.sum_lhs.is_whole() && e.sum_rhs.is_empty() && e.chain_ok,
                    Verdict::Strict,
                ),
            );
        }
        Err(e) => report.check("chain-gap", &e.to_string(), Verdict::Failed),
    }

    // non-closed scalarization demo
    let demo = oracle::nonclosed_scalarization_demo();
    report.check(
        "nonclosed-demo",
        "closed epigraph with a jump in the scalarization at 0",
        verdict_of(
            demo.phi_at_zero == XReal::PosInf && demo.closure_at_zero == XReal::zero(),
            Verdict::Equal,
        ),
    );

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes() {
        let rep = selftest();
        assert_eq!(rep.exit_code, 0, "{}", rep.to_json());
    }

    #[test]
    fn rational_validation() {
        let text = r#"{
  "version": 1,
  "space": {"m": 2, "cone_rays": [["1","0"],["0","1"]]},
  "objects": {"g": {"kind": "setfn", "n": 1, "epi": {"dim": 3, "hrep": {"A": [["1","0","1/0"]], "b": ["0"]}}}}
}"#;
        let err = parse_problem(text).unwrap_err();
        assert!(err.to_string().contains("E_SCHEMA") || err.code() == "E_RAT");
    }

    #[test]
    fn cone_required_for_setfn() {
        let text = r#"{
  "version": 1,
  "objects": {"g": {"kind": "setfn", "n": 1, "epi": {"dim": 3, "hrep": {"A": [], "b": []}}}}
}"#;
        let err = parse_problem(text).unwrap_err();
        assert_eq!(err.code(), "E_CONE");
    }

    #[test]
    fn trivial_cone_rejected() {
        let text = r#"{
  "version": 1,
  "space": {"m": 2, "cone_rays": []},
  "objects": {}
}"#;
        let err = parse_problem(text).unwrap_err();
        assert_eq!(err.code(), "E_CONE");
    }

    #[test]
    fn dimension_cap() {
        let text = r#"{
  "version": 1,
  "space": {"m": 9, "cone_rays": [["1","0","0","0","0","0","0","0","0"]]},
  "objects": {}
}"#;
        let err = parse_problem(text).unwrap_err();
        assert_eq!(err.code(), "E_DIM");
    }
}
