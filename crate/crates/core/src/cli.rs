//! The `teichcalc` front end: file schemas, argument parsing, command
//! implementations and the run manifest.
//!
//! [`run`] executes a command line in-process and returns the exit code with
//! everything that would be written, so the binary is a thin wrapper and the
//! commands are testable without spawning processes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::boundary::{
    busemann_limit_check, detour_metric, dual_eval, eq_eval_sq, flip_sup, modular_equivalent,
    modular_solve, same_part, sup_ratio, BusemannVerdict, HmOracle, QDRecord, SequenceDeclaration,
    SolveOptions, SyntheticOracle, TorusOracle, TrackLimit,
};
use crate::error::{Error, Result};
use crate::extremal::{
    discrete_ext_length, distance::distance_estimate, origami_record, CurveClass, SquareTiledPoint,
};
use crate::foliation::{ComponentBasis, ComponentDescriptor, ComponentKind, Direction, MeasuredFoliation, ProbeFamily, TorusLine};
use crate::iet::{classify_direction, first_return, rauzy_step, Classification, FlowDirection, IetJson, RauzyOutcome, Transversal};
use crate::scalar::{ExtReal, Scalar};
use crate::square_tiled::{check_conditions, geodesic_flow_origami, straighten, Chord, ChordCurve, Origami};
use crate::torus::{distance, ext_length, ray, TorusPoint, TorusQD};

pub const EXIT_OK: i32 = 0;
/// A check ran to completion and its verdict was negative.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "teichcalc", version, about = "Teichmüller-metric asymptotics on tori and square-tiled surfaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalOpts {
    /// Probe cap N: primitive torus directions with |p|, |q| <= N.
    #[arg(long, global = true, default_value_t = 50)]
    pub probes: i64,
    /// Grid resolution k for discrete extremal length.
    #[arg(long, global = true, default_value_t = 32)]
    pub grid: usize,
    /// Tolerance; each command documents its default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomised starts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    #[arg(long, global = true)]
    pub csv: bool,
    /// Write the run manifest (input digests, parameters, wall clock) here.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Gap between e^{-2t} Ext along a ray and E_q(F)^2.
    #[command(name = "verify-thm1")]
    VerifyThm1(VerifyArgs),
    /// Extremal length of a class along the diagonal flow.
    Extlen(ExtlenArgs),
    /// Torus distance: closed form and the probe estimate.
    Distance(DistanceArgs),
    /// E_q(F), E*_q(F) and the flip supremum.
    #[command(name = "eq-eval")]
    EqEval(EqEvalArgs),
    /// Detour metric between two records.
    Detour(PairArgs),
    /// Coefficients realising a modular class at a point.
    #[command(name = "modular-solve")]
    ModularSolve(ModularArgs),
    /// Part membership and modular equivalence of two records.
    #[command(name = "part-check")]
    PartCheck(PairArgs),
    /// Convergence check for a declared sequence of records.
    #[command(name = "busemann-check")]
    BusemannCheck(BusemannArgs),
    /// Rauzy induction on an exchange, or a first return on an origami.
    Iet(IetArgs),
    /// Straighten a chord curve on a square-tiled surface.
    Straighten(StraightenArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    /// Torus point as `re,im`; ignored with --origami.
    #[arg(long, default_value = "0,1")]
    pub tau: String,
    /// Origami JSON file `{n, h, v}` (1-based permutations).
    #[arg(long)]
    pub origami: Option<PathBuf>,
    /// Vertical direction `p,q` of the quadratic differential.
    #[arg(long, default_value = "0,1")]
    pub direction: String,
    /// Test class `p,q,w`.
    #[arg(long, default_value = "1,1,1")]
    pub foliation: String,
    /// Comma separated times.
    #[arg(long, default_value = "0,1,2,3,4,5")]
    pub t: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExtlenArgs {
    #[arg(long, default_value = "0,1")]
    pub tau: String,
    #[arg(long)]
    pub origami: Option<PathBuf>,
    /// Class `p,q,w`.
    #[arg(long, default_value = "1,0,1")]
    pub class: String,
    #[arg(long, default_value = "0")]
    pub t: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DistanceArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EqEvalArgs {
    /// Record JSON (`qdrecord.v1`); without it the torus record at --tau is used.
    #[arg(long)]
    pub record: Option<PathBuf>,
    #[arg(long, default_value = "0,1")]
    pub tau: String,
    #[arg(long, default_value = "0,1")]
    pub direction: String,
    /// Torus class `p,q,w`, or component coefficients with --record.
    #[arg(long)]
    pub foliation: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PairArgs {
    pub first: PathBuf,
    pub second: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ModularArgs {
    /// Target record JSON.
    #[arg(long)]
    pub record: PathBuf,
    /// Synthetic oracle matrix, rows separated by `;`.
    #[arg(long, conflicts_with = "tau")]
    pub matrix: Option<String>,
    /// Use the torus oracle at this point (single-component records).
    #[arg(long)]
    pub tau: Option<String>,
    /// Torus oracle direction.
    #[arg(long, default_value = "0,1")]
    pub direction: String,
    #[arg(long, default_value_t = 10_000)]
    pub max_iterations: usize,
    /// Start from a seeded random point instead of all ones.
    #[arg(long)]
    pub random_start: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BusemannArgs {
    pub sequence: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct IetArgs {
    /// Interval lengths in domain order.
    #[arg(long, conflicts_with = "origami")]
    pub lengths: Option<String>,
    /// 0-based image positions.
    #[arg(long)]
    pub perm: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long)]
    pub origami: Option<PathBuf>,
    /// Flow slope as `p/q` or `p,q` (integer direction), or a decimal shift.
    #[arg(long)]
    pub slope: Option<String>,
    /// Use the golden slope F(n+1)/F(n).
    #[arg(long)]
    pub golden: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct StraightenArgs {
    /// Curve JSON `{origami?, t?, chords: [{rect, p, q}]}`.
    pub curve: PathBuf,
}

/// `qdrecord.v1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_ref: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<String>>,
    /// Component kinds; annular when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinds: Option<Vec<ComponentKind>>,
    pub coeffs: Vec<Scalar>,
    pub areas: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_area: Option<f64>,
}

impl RecordJson {
    pub fn from_record(q: &QDRecord) -> Self {
        RecordJson {
            basis_ref: None,
            components: Some(q.basis().components().iter().map(|c| c.id.clone()).collect()),
            kinds: Some(q.basis().components().iter().map(|c| c.kind).collect()),
            coeffs: q.coeffs().to_vec(),
            areas: q.areas().to_vec(),
            total_area: Some(q.total_area().to_f64()),
        }
    }

    fn ids(&self) -> Vec<String> {
        match &self.components {
            Some(ids) => ids.clone(),
            None => (1..=self.coeffs.len()).map(|j| format!("G{j}")).collect(),
        }
    }

    /// A basis of mutually disjoint components named by `components`.
    pub fn basis(&self) -> Result<Arc<ComponentBasis>> {
        let ids = self.ids();
        let n = ids.len();
        let kinds = match &self.kinds {
            Some(k) if k.len() != n => return Err(Error::input("one kind per component required")),
            Some(k) => k.clone(),
            None => vec![ComponentKind::Annular; n],
        };
        let comps = ids
            .into_iter()
            .zip(kinds)
            .map(|(id, kind)| ComponentDescriptor::new(id, kind))
            .collect();
        Ok(Arc::new(ComponentBasis::new(comps, vec![vec![Scalar::zero(); n]; n])?))
    }

    pub fn to_record_in(&self, basis: Arc<ComponentBasis>) -> Result<QDRecord> {
        let q = QDRecord::new(basis, self.coeffs.clone(), self.areas.clone())?;
        if let Some(t) = self.total_area {
            if (q.total_area().to_f64() - t).abs() > 1e-9 * (1.0 + t.abs()) {
                return Err(Error::input("total_area does not match the areas"));
            }
        }
        Ok(q)
    }

    pub fn to_record(&self) -> Result<QDRecord> {
        self.to_record_in(self.basis()?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SequenceJson {
    pub records: Vec<RecordJson>,
    pub record_limit: RecordJson,
    pub tracks: Vec<TrackLimit>,
    /// Proposed limit; defaults to `record_limit`.
    #[serde(default)]
    pub limit: Option<RecordJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveJson {
    #[serde(default)]
    pub origami: Option<Origami>,
    #[serde(default)]
    pub t: f64,
    pub chords: Vec<Chord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub parameters: Value,
    pub version: String,
    pub wall_clock_ms: f64,
}

/// What a command produced: a JSON document, an optional table for CSV, and
/// whether its check passed.
struct Report {
    json: Value,
    table: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    passed: bool,
}

impl Report {
    fn new(json: Value) -> Self {
        Report { json, table: None, passed: true }
    }
}

/// Collected input files with their digests.
#[derive(Default)]
struct Inputs {
    digests: Vec<InputDigest>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
        self.digests.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes).map_err(|_| Error::input(format!("{} is not UTF-8", path.display())))
    }

    fn json<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Result<T> {
        let s = self.read(path)?;
        serde_json::from_str(&s).map_err(|e| Error::input(format!("{}: {e}", path.display())))
    }
}

/// Exit code, standard output and standard error of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Outcome {
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let (name, params) = describe(&cli.command);
    let result = dispatch(&cli.command, &cli.global, &mut inputs);
    let manifest = RunManifest {
        command: name.to_string(),
        inputs: inputs.digests,
        parameters: json!({"global": cli.global, "command": params}),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    if let Some(path) = &cli.global.manifest {
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
        if let Err(e) = std::fs::write(path, text + "\n") {
            return error_outcome(&Error::input(format!("cannot write manifest: {e}")));
        }
    }
    match result {
        Ok(report) => {
            let stdout = if cli.global.csv { to_csv(&report) } else { pretty(&report.json) };
            Outcome {
                code: if report.passed { EXIT_OK } else { EXIT_CHECK_FAILED },
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => error_outcome(&e),
    }
}

fn error_outcome(e: &Error) -> Outcome {
    let (code, kind) = match e {
        Error::NonConvergence { .. } => (EXIT_NONCONVERGENCE, "nonconvergence"),
        Error::RepresentationMismatch(_) => (EXIT_INPUT, "representation-mismatch"),
        Error::Input(_) => (EXIT_INPUT, "input"),
        Error::Construction(_) => (EXIT_INPUT, "construction"),
        Error::Normalization(_) => (EXIT_INPUT, "normalization"),
        Error::Unsupported(_) => (EXIT_INPUT, "unsupported"),
    };
    let mut body = json!({"kind": kind, "message": e.to_string()});
    if let Error::NonConvergence { iterations, last, residuals } = e {
        body["iterations"] = json!(iterations);
        body["last_residual"] = json!(last);
        body["residuals"] = json!(residuals);
    }
    Outcome {
        code,
        stdout: String::new(),
        stderr: pretty(&json!({ "error": body })),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialise") + "\n"
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn to_csv(r: &Report) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    match &r.table {
        Some((header, rows)) => {
            w.write_record(header).expect("in-memory write");
            for row in rows {
                w.write_record(row).expect("in-memory write");
            }
        }
        None => {
            let obj = r.json.as_object().cloned().unwrap_or_default();
            let keys: Vec<&String> = obj.keys().collect();
            w.write_record(&keys).expect("in-memory write");
            w.write_record(obj.values().map(cell)).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("CSV is UTF-8")
}

fn describe(c: &Command) -> (&'static str, Value) {
    let v = |x: &dyn erased::Ser| x.value();
    match c {
        Command::VerifyThm1(a) => ("verify-thm1", v(a)),
        Command::Extlen(a) => ("extlen", v(a)),
        Command::Distance(a) => ("distance", v(a)),
        Command::EqEval(a) => ("eq-eval", v(a)),
        Command::Detour(a) => ("detour", v(a)),
        Command::ModularSolve(a) => ("modular-solve", v(a)),
        Command::PartCheck(a) => ("part-check", v(a)),
        Command::BusemannCheck(a) => ("busemann-check", v(a)),
        Command::Iet(a) => ("iet", v(a)),
        Command::Straighten(a) => ("straighten", v(a)),
    }
}

mod erased {
    pub trait Ser {
        fn value(&self) -> serde_json::Value;
    }
    impl<T: serde::Serialize> Ser for T {
        fn value(&self) -> serde_json::Value {
            serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
        }
    }
}

fn dispatch(c: &Command, g: &GlobalOpts, io: &mut Inputs) -> Result<Report> {
    if g.probes < 1 {
        return Err(Error::input("--probes must be at least 1"));
    }
    if g.grid < 1 {
        return Err(Error::input("--grid must be at least 1"));
    }
    if let Some(t) = g.tol {
        if !(t > 0.0) {
            return Err(Error::input("--tol must be positive"));
        }
    }
    match c {
        Command::VerifyThm1(a) => cmd_verify_thm1(a, g, io),
        Command::Extlen(a) => cmd_extlen(a, g, io),
        Command::Distance(a) => cmd_distance(a, g),
        Command::EqEval(a) => cmd_eq_eval(a, io),
        Command::Detour(a) => cmd_detour(a, io),
        Command::ModularSolve(a) => cmd_modular_solve(a, g, io),
        Command::PartCheck(a) => cmd_part_check(a, io),
        Command::BusemannCheck(a) => cmd_busemann(a, io),
        Command::Iet(a) => cmd_iet(a, io),
        Command::Straighten(a) => cmd_straighten(a, io),
    }
}

fn floats(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::input(format!("{what}: cannot parse {x:?}")))
        })
        .collect()
}

fn ints(s: &str, what: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| Error::input(format!("{what}: cannot parse {x:?}"))))
        .collect()
}

fn pair_f(s: &str, what: &str) -> Result<(f64, f64)> {
    match floats(s, what)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::input(format!("{what} takes two numbers"))),
    }
}

fn tau(s: &str) -> Result<TorusPoint> {
    let (re, im) = pair_f(s, "tau")?;
    TorusPoint::new(re, im)
}

fn direction(s: &str) -> Result<(i64, i64)> {
    match ints(s, "direction")?.as_slice() {
        [p, q] => Ok((*p, *q)),
        _ => Err(Error::input("direction takes `p,q`")),
    }
}

/// `p,q,w` with integer direction and positive weight.
fn class(s: &str) -> Result<(i64, i64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::input("class takes `p,q,w`"));
    }
    let d = ints(&parts[..2].join(","), "class")?;
    let w = floats(parts[2], "class weight")?[0];
    Ok((d[0], d[1], w))
}

fn torus_line(p: i64, q: i64, w: f64) -> Result<TorusLine> {
    let weight = if w.fract() == 0.0 && w.abs() < 1e15 {
        Scalar::int(w as i64)
    } else {
        Scalar::Float(w)
    };
    TorusLine::new(Direction::int(p, q)?, weight)
}

fn ext_json(e: &ExtReal) -> Value {
    serde_json::to_value(e).expect("extended reals serialise")
}

fn cmd_verify_thm1(a: &VerifyArgs, g: &GlobalOpts, io: &mut Inputs) -> Result<Report> {
    let ts = floats(&a.t, "t")?;
    let (p, q, w) = class(&a.foliation)?;
    let dir = direction(&a.direction)?;
    let t_max = ts.iter().cloned().fold(f64::MIN, f64::max);
    let mut rows = Vec::new();
    let mut out = Vec::new();
    let (passed, tol);
    if let Some(path) = &a.origami {
        let o: Origami = io.json(path)?;
        let f = CurveClass::new(p, q, w)?;
        let (rec, fol) = origami_record(&o, dir, &f)?;
        let rhs = eq_eval_sq(&rec, &fol)?.to_f64();
        tol = g.tol.unwrap_or(0.05);
        let mut last_width = f64::INFINITY;
        for &t in &ts {
            let point = SquareTiledPoint::new(o.clone(), t);
            let est = discrete_ext_length(&point, &f, g.grid)?;
            let s = (-2.0 * t).exp();
            let lo = est.lower * s;
            let hi = est.upper.finite().map(|u| u * s);
            let gap_hi = hi.map(|h| h - rhs);
            if (t - t_max).abs() == 0.0 {
                // bracket of the scaled length, relative to the limit
                last_width = hi.map_or(f64::INFINITY, |h| (h.max(rhs) - lo.min(rhs)) / rhs);
            }
            rows.push(vec![t.to_string(), lo.to_string(), hi.map_or("inf".into(), |h| h.to_string()), rhs.to_string(), gap_hi.map_or("inf".into(), |x| x.to_string())]);
            out.push(json!({"t": t, "lhs_lower": lo, "lhs_upper": hi, "rhs": rhs, "gap_upper": gap_hi, "converged": est.converged}));
        }
        passed = last_width <= tol;
        let header = vec!["t", "lhs_lower", "lhs_upper", "rhs", "gap"];
        return Ok(Report {
            json: json!({"mode": "origami", "rows": out, "tolerance": tol, "relative_width_at_max_t": last_width, "passed": passed}),
            table: Some((header, rows)),
            passed,
        });
    }
    let base = tau(&a.tau)?;
    let qd = TorusQD::unit(base, Direction::int(dir.0, dir.1)?);
    let line = torus_line(p, q, w)?;
    let rec = QDRecord::from_torus(&qd);
    let rhs = eq_eval_sq(&rec, &MeasuredFoliation::TorusLine(line.clone()))?.to_f64();
    tol = g.tol.unwrap_or(1e-8);
    let mut last_gap = f64::INFINITY;
    for &t in &ts {
        let x = ray(&qd, t)?;
        let lhs = (-2.0 * t).exp() * ext_length(&x, &line);
        let gap = lhs - rhs;
        if t == t_max {
            last_gap = gap;
        }
        rows.push(vec![t.to_string(), lhs.to_string(), rhs.to_string(), gap.to_string()]);
        out.push(json!({"t": t, "lhs": lhs, "rhs": rhs, "gap": gap}));
    }
    passed = last_gap.abs() < tol;
    Ok(Report {
        json: json!({"mode": "torus", "rows": out, "tolerance": tol, "passed": passed}),
        table: Some((vec!["t", "lhs", "rhs", "gap"], rows)),
        passed,
    })
}

fn cmd_extlen(a: &ExtlenArgs, g: &GlobalOpts, io: &mut Inputs) -> Result<Report> {
    let ts = floats(&a.t, "t")?;
    let (p, q, w) = class(&a.class)?;
    let mut rows = Vec::new();
    let mut out = Vec::new();
    if let Some(path) = &a.origami {
        let o: Origami = io.json(path)?;
        let f = CurveClass::new(p, q, w)?;
        for &t in &ts {
            let est = discrete_ext_length(&SquareTiledPoint::new(o.clone(), t), &f, g.grid)?;
            rows.push(vec![t.to_string(), est.lower.to_string(), est.upper.to_string(), est.converged.to_string()]);
            out.push(json!({"t": t, "lower": est.lower, "upper": ext_json(&est.upper), "converged": est.converged, "iterations": est.iterations, "methods": est.methods}));
        }
    } else {
        let qd = TorusQD::unit(tau(&a.tau)?, Direction::int(0, 1)?);
        let line = torus_line(p, q, w)?;
        for &t in &ts {
            let e = ext_length(&ray(&qd, t)?, &line);
            rows.push(vec![t.to_string(), e.to_string(), e.to_string(), "true".into()]);
            out.push(json!({"t": t, "lower": e, "upper": e, "converged": true}));
        }
    }
    Ok(Report {
        json: json!({ "rows": out }),
        table: Some((vec!["t", "lower", "upper", "converged"], rows)),
        passed: true,
    })
}

fn cmd_distance(a: &DistanceArgs, g: &GlobalOpts) -> Result<Report> {
    let (x, y) = (tau(&a.x)?, tau(&a.y)?);
    let exact = distance(&x, &y);
    let probes = ProbeFamily::torus_primitive(g.probes);
    let est = distance_estimate(&x, &y, &probes)?;
    Ok(Report::new(json!({"distance": exact, "probe_estimate": est, "probe_cap": g.probes})))
}

fn cmd_eq_eval(a: &EqEvalArgs, io: &mut Inputs) -> Result<Report> {
    let (rec, f) = match &a.record {
        Some(path) => {
            let r: RecordJson = io.json(path)?;
            let rec = r.to_record()?;
            let coeffs = floats(&a.foliation, "foliation")?.into_iter().map(Scalar::Float).collect();
            let f = MeasuredFoliation::component_sum(rec.basis().clone(), coeffs)?;
            (rec, f)
        }
        None => {
            let (dp, dq) = direction(&a.direction)?;
            let qd = TorusQD::unit(tau(&a.tau)?, Direction::int(dp, dq)?);
            let (p, q, w) = class(&a.foliation)?;
            (QDRecord::from_torus(&qd), MeasuredFoliation::TorusLine(torus_line(p, q, w)?))
        }
    };
    let sq = eq_eval_sq(&rec, &f)?;
    Ok(Report::new(json!({
        "eq": sq.to_f64().sqrt(),
        "eq_sq": sq.to_f64(),
        "eq_sq_exact": sq.to_string(),
        "dual": ext_json(&dual_eval(&rec, &f)?),
        "flip_sup": flip_sup(&rec, &f)?,
    })))
}

/// Reads two records over a shared basis.
fn record_pair(a: &PairArgs, io: &mut Inputs) -> Result<(QDRecord, QDRecord)> {
    let r1: RecordJson = io.json(&a.first)?;
    let r2: RecordJson = io.json(&a.second)?;
    let b1 = r1.basis()?;
    let b2 = if r1.ids() == r2.ids() { b1.clone() } else { r2.basis()? };
    Ok((r1.to_record_in(b1)?, r2.to_record_in(b2)?))
}

fn half_log(e: ExtReal) -> ExtReal {
    match e {
        ExtReal::Finite(x) => ExtReal::Finite(0.5 * x.ln()),
        ExtReal::Infinite => ExtReal::Infinite,
    }
}

fn cmd_detour(a: &PairArgs, io: &mut Inputs) -> Result<Report> {
    let (q1, q2) = record_pair(a, io)?;
    let metric = detour_metric(&q1, &q2);
    Ok(Report::new(json!({
        "metric": ext_json(&metric),
        "cost_12": ext_json(&half_log(sup_ratio(&q1, &q2).0)),
        "cost_21": ext_json(&half_log(sup_ratio(&q2, &q1).0)),
        "part": metric.is_finite(),
    })))
}

fn cmd_part_check(a: &PairArgs, io: &mut Inputs) -> Result<Report> {
    let (q1, q2) = record_pair(a, io)?;
    let m = modular_equivalent(&q1, &q2);
    Ok(Report::new(json!({
        "same_part": same_part(&q1, &q2),
        "modular_equivalent": m.equivalent,
        "constant": m.constant.map(|c| c.to_f64()),
        "reason": m.reason,
    })))
}

fn matrix(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';').map(|row| floats(row, "matrix")).collect()
}

fn cmd_modular_solve(a: &ModularArgs, g: &GlobalOpts, io: &mut Inputs) -> Result<Report> {
    let r: RecordJson = io.json(&a.record)?;
    let target = r.to_record()?;
    let n = target.support().len();
    let start = if a.random_start {
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
        Some((0..n).map(|_| rng.gen_range(0.05..1.0)).collect())
    } else {
        None
    };
    let opts = SolveOptions {
        max_iterations: a.max_iterations,
        tolerance: g.tol.unwrap_or(1e-13),
        start,
    };
    let sol = match (&a.matrix, &a.tau) {
        (Some(m), None) => solve_with(&target, &(), &SyntheticOracle::new(matrix(m)?)?, &opts)?,
        (None, Some(t)) => {
            let (p, q) = direction(&a.direction)?;
            solve_with(&target, &tau(t)?, &TorusOracle { direction: Direction::int(p, q)? }, &opts)?
        }
        _ => return Err(Error::input("give exactly one of --matrix or --tau")),
    };
    Ok(Report::new(serde_json::to_value(sol).expect("solution serialises")))
}

fn solve_with<O: HmOracle>(
    target: &QDRecord,
    x: &O::Point,
    oracle: &O,
    opts: &SolveOptions,
) -> Result<crate::boundary::ModularSolution> {
    modular_solve(target, x, oracle, opts)
}

fn cmd_busemann(a: &BusemannArgs, io: &mut Inputs) -> Result<Report> {
    let s: SequenceJson = io.json(&a.sequence)?;
    let basis = s.record_limit.basis()?;
    let records = s
        .records
        .iter()
        .map(|r| r.to_record())
        .collect::<Result<Vec<_>>>()?;
    let record_limit = s.record_limit.to_record_in(basis.clone())?;
    let limit = match &s.limit {
        Some(l) => l.to_record_in(if l.ids() == s.record_limit.ids() { basis } else { l.basis()? })?,
        None => record_limit.clone(),
    };
    let seq = SequenceDeclaration { records, record_limit, tracks: s.tracks.clone() };
    let verdict = busemann_limit_check(&seq, &limit)?;
    let json = match &verdict {
        BusemannVerdict::Converges => json!({"converges": true}),
        BusemannVerdict::FailsI { reason } => json!({"converges": false, "failed": "record-limit", "reason": reason}),
        BusemannVerdict::FailsII { track } => json!({"converges": false, "failed": "decomposable-track", "track": track}),
    };
    Ok(Report::new(json))
}

fn flow_direction(a: &IetArgs) -> Result<FlowDirection> {
    if let Some(n) = a.golden {
        if n == 0 {
            return Err(Error::input("--golden needs n >= 1"));
        }
        return Ok(FlowDirection::golden(n));
    }
    let s = a.slope.as_deref().unwrap_or("0,1");
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| Error::input("bad slope numerator"))?;
        let q: i64 = q.trim().parse().map_err(|_| Error::input("bad slope denominator"))?;
        if q == 0 {
            return Err(Error::input("slope denominator must be nonzero"));
        }
        return Ok(FlowDirection::Shift(BigRational::new(BigInt::from(p), BigInt::from(q))));
    }
    if s.contains(',') {
        let (p, q) = direction(s)?;
        if p == 0 && q == 0 {
            return Err(Error::input("direction must be nonzero"));
        }
        let gcd = num_integer::Integer::gcd(&p, &q);
        return Ok(FlowDirection::Rational(p / gcd, q / gcd));
    }
    let x: f64 = s.trim().parse().map_err(|_| Error::input("bad slope"))?;
    Ok(FlowDirection::Real(x, 1.0))
}

fn cmd_iet(a: &IetArgs, io: &mut Inputs) -> Result<Report> {
    if let Some(path) = &a.origami {
        let o: Origami = io.json(path)?;
        let dir = flow_direction(a)?;
        let (iet, dec) = first_return(&o, &dir, &Transversal::BottomEdges)?;
        let class = match classify_direction(&o, &dir, a.steps.max(1))? {
            Classification::Periodic(c) => json!({"kind": "periodic", "cylinders": c.len()}),
            Classification::MinimalCertified { steps } => json!({"kind": "minimal-certified", "steps": steps}),
            Classification::Connection { step } => json!({"kind": "connection", "step": step}),
            Classification::Inconclusive { steps } => json!({"kind": "inconclusive", "steps": steps}),
        };
        let area: f64 = num_traits::ToPrimitive::to_f64(&dec.area()).unwrap_or(f64::NAN);
        return Ok(Report::new(json!({
            "iet": iet.to_json(),
            "return_area": area,
            "surface_area": o.n(),
            "rectangles": dec.rects.len(),
            "classification": class,
        })));
    }
    let (Some(l), Some(p)) = (&a.lengths, &a.perm) else {
        return Err(Error::input("give --lengths and --perm, or --origami"));
    };
    let lengths = floats(l, "lengths")?;
    let perm = ints(p, "perm")?
        .into_iter()
        .map(|x| usize::try_from(x).map_err(|_| Error::input("perm entries must be nonnegative")))
        .collect::<Result<Vec<_>>>()?;
    let mut t = IetJson { lengths, perm }.to_iet()?;
    let mut rows = Vec::new();
    let mut out = Vec::new();
    for step in 1..=a.steps {
        match rauzy_step(&t)? {
            RauzyOutcome::Induced { iet, winner, loser, top_wins } => {
                let row = if top_wins { "top" } else { "bottom" };
                let j = iet.to_json();
                rows.push(vec![step.to_string(), row.into(), winner.to_string(), loser.to_string(), format!("{:?}", j.lengths)]);
                out.push(json!({"step": step, "winner_row": row, "winner": winner, "loser": loser, "iet": j}));
                t = iet;
            }
            RauzyOutcome::Connection { top, bottom } => {
                out.push(json!({"step": step, "connection": [top, bottom]}));
                rows.push(vec![step.to_string(), "connection".into(), top.to_string(), bottom.to_string(), String::new()]);
                break;
            }
        }
    }
    Ok(Report {
        json: json!({"steps": out, "final": t.to_json()}),
        table: Some((vec!["step", "winner_row", "winner", "loser", "lengths"], rows)),
        passed: true,
    })
}

fn cmd_straighten(a: &StraightenArgs, io: &mut Inputs) -> Result<Report> {
    let c: CurveJson = io.json(&a.curve)?;
    let o = c.origami.clone().unwrap_or_else(Origami::torus);
    let r = geodesic_flow_origami(&o, c.t);
    let curve = ChordCurve::new(c.chords.clone());
    let before = check_conditions(&curve, &r)?;
    let s = straighten(&curve, &r)?;
    let after = check_conditions(&s.curve, &r)?;
    let mut conditions = BTreeMap::new();
    conditions.insert("before", serde_json::to_value(&before).expect("serialises"));
    conditions.insert("after", serde_json::to_value(&after).expect("serialises"));
    let passed = after.all();
    Ok(Report {
        json: json!({
            "straightened": s,
            "holonomy_before": curve.holonomy(),
            "holonomy_after": s.curve.holonomy(),
            "conditions": conditions,
            "chords_before": curve.len(),
            "chords_after": s.curve.len(),
        }),
        table: None,
        passed,
    })
}
