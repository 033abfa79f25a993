//! Command-line front end: reads coefficient tables, runs the library
//! pipelines and reports the outcome as JSON.
//!
//! [`run`] is the whole program minus process plumbing, so it can be
//! driven from tests. Exit codes are 0 on pass, 1 on fail and 2 on usage
//! or data errors.

pub mod table;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use qms::coset::{fj_pair, GramTriple, IndexPair};
use qms::lifts::{self, CheckReport, QuatTable, SiegelTable};
use qms::orbits::{self, SplitLattice};
use qms::verify::{self, SuiteReport};
use qms::whittaker::{self, ArchimedeanInput};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

pub use table::{Kind, Table, TableFile};

/// Seed used when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 1;

/// Failures that end a command with exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("data error: {0}")]
    Data(String),
    #[error(transparent)]
    Library(#[from] qms::Error),
}

/// Final status of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

/// The machine-readable outcome printed on standard output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub details: Vec<Value>,
    pub seed: Option<u64>,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
}

#[derive(Parser, Debug)]
#[command(name = "qms", version, about = "Verification pipelines for the quaternionic Maass Spezialschar on split SO(8)")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Seed for every pseudo-random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Size bound; its meaning depends on the subcommand.
    #[arg(long, global = true, allow_hyphen_values = true)]
    bound: Option<i64>,
    /// Weight of the forms involved.
    #[arg(long, global = true)]
    weight: Option<i64>,
    /// Tolerance for numeric checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for parallel pipelines.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Input table.
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    /// Output table or CSV file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
enum Cmd {
    /// Octonion identities on random exact cases (--bound cases).
    OctCheck,
    /// The isomorphism, triality triples and cube transformation (--bound random triples).
    TrialityVerify,
    /// Classical Maass lift of a half-integral weight table (--bound discriminant bound).
    Lift,
    /// theta* of a Siegel cusp form table (--bound determinant bound of the key set).
    ThetaStar {
        /// Compute instead the keys the Dirichlet series at this pair needs up to --bound.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Option<Vec<i64>>,
    },
    /// Maass relations of a Siegel table or Spezialschar conditions of a quaternionic one.
    MaassCheck,
    /// Siegel coefficients extracted from a quaternionic table through triality.
    Fj,
    /// Dirichlet series factorization at a strongly primitive pair (--bound series length).
    Dirichlet {
        /// The pair as eight integers `T1 row by row, then T2 row by row`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Vec<i64>,
        /// Primes whose multiples are left out of the series.
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<u64>,
    },
    /// Reduction of an integral pair to canonical form in the split lattice.
    Reduce {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t1: Vec<i128>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t2: Vec<i128>,
    },
    /// Archimedean Fourier-Jacobi integral against its closed form.
    Whittaker {
        /// Parameter of the test vector `T = [g, -1, -1, -g]`.
        #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "-0.5,0,0.7", allow_hyphen_values = true)]
        angle: Vec<f64>,
    },
    /// Truncated Poincare sum at the identity (--bound radius).
    Poincare {
        #[arg(long, value_delimiter = ',', default_value = "1,1,1", allow_hyphen_values = true)]
        triple: Vec<i64>,
    },
    /// Deterministic synthetic coefficient table.
    Synth {
        #[arg(long, value_enum)]
        kind: Kind,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::OctCheck => "oct-check",
            Cmd::TrialityVerify => "triality-verify",
            Cmd::Lift => "lift",
            Cmd::ThetaStar { .. } => "theta-star",
            Cmd::MaassCheck => "maass-check",
            Cmd::Fj => "fj",
            Cmd::Dirichlet { .. } => "dirichlet",
            Cmd::Reduce { .. } => "reduce",
            Cmd::Whittaker { .. } => "whittaker",
            Cmd::Poincare { .. } => "poincare",
            Cmd::Synth { .. } => "synth",
        }
    }
}

/// What a command produced before the report is assembled.
struct Outcome {
    ok: bool,
    details: Vec<Value>,
}

impl Outcome {
    fn pass(details: Vec<Value>) -> Self {
        Outcome { ok: true, details }
    }
}

impl From<SuiteReport> for Outcome {
    fn from(r: SuiteReport) -> Self {
        let mut d = json!({ "checked": r.checked });
        if let Some(f) = &r.failure {
            d["counterexample"] = json!(f);
        }
        if let Some(e) = r.max_error {
            d["max_error"] = json!(e);
        }
        Outcome { ok: r.ok, details: vec![d] }
    }
}

impl From<CheckReport> for Outcome {
    fn from(r: CheckReport) -> Self {
        SuiteReport::from(r).into()
    }
}

struct Ctx {
    opts: Opts,
    timings: BTreeMap<String, f64>,
}

impl Ctx {
    fn seed(&self) -> u64 {
        self.opts.seed.unwrap_or(DEFAULT_SEED)
    }

    fn bound(&self, default: i64) -> Result<i64, CliError> {
        match self.opts.bound.unwrap_or(default) {
            b if b >= 0 => Ok(b),
            b => Err(CliError::Usage(format!("--bound must be nonnegative, got {b}"))),
        }
    }

    fn input(&self) -> Result<&Path, CliError> {
        self.opts.input.as_deref().ok_or_else(|| CliError::Usage("--in <FILE> is required".into()))
    }

    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.insert(phase.into(), start.elapsed().as_secs_f64());
        out
    }

    fn read(&mut self) -> Result<Table, CliError> {
        let path = self.input()?.to_path_buf();
        self.time("read", || table::read_table(&path))
    }

    fn write_or_describe(&self, t: &Table, details: &mut Vec<Value>) -> Result<(), CliError> {
        let f = TableFile::from_table(t);
        match &self.opts.out {
            Some(p) => {
                table::write_table(p, t)?;
                details.push(json!({ "written": p.display().to_string(), "entries": f.entries.len() }));
            }
            None => details.push(serde_json::to_value(&f).expect("tables serialize")),
        }
        Ok(())
    }
}

fn siegel_input(t: Table) -> Result<SiegelTable, CliError> {
    match t {
        Table::Siegel(t) => Ok(t),
        _ => Err(CliError::Data("expected a siegel table".into())),
    }
}

fn quat_input(t: Table) -> Result<QuatTable, CliError> {
    match t {
        Table::Quaternionic(t) => Ok(t),
        _ => Err(CliError::Data("expected a quaternionic table".into())),
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn oct_check(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let (seed, cases) = (ctx.seed(), ctx.bound(1000)? as usize);
    Ok(ctx.time("octonion", || verify::octonion_suite(seed, cases)).into())
}

fn triality_verify(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let (seed, n) = (ctx.seed(), ctx.bound(100)? as usize);
    let tri = ctx.time("triality", || verify::triality_suite(seed, n))?;
    let cube = ctx.time("cube", || verify::cube_suite(seed, n))?;
    let (a, b): (Outcome, Outcome) = (tri.into(), cube.into());
    let mut details = vec![json!({ "suite": "triality", "result": a.details[0] })];
    details.push(json!({ "suite": "cube", "result": b.details[0] }));
    Ok(Outcome { ok: a.ok && b.ok, details })
}

fn lift(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let Table::HalfIntegral(c) = ctx.read()? else {
        return Err(CliError::Data("lift expects a halfintegral table".into()));
    };
    let weight = ctx.opts.weight.unwrap_or(c.weight);
    let bound = ctx.bound(100)?;
    let f = ctx.time("lift", || lifts::classical_maass_lift(&c, weight, bound))?;
    let mut details = Vec::new();
    ctx.write_or_describe(&Table::Siegel(f), &mut details)?;
    Ok(Outcome::pass(details))
}

fn theta_star(ctx: &mut Ctx, lambda: Option<&[i64]>) -> Result<Outcome, CliError> {
    let f = siegel_input(ctx.read()?)?;
    if !f.cuspidal {
        return Err(CliError::Data("theta* needs a cusp form table".into()));
    }
    let bound = ctx.bound(12)?;
    let keys = match lambda {
        Some(v) => lifts::dirichlet_keys(&parse_pair(v)?, bound as u64)?,
        None => lifts::standard_keys(bound)?,
    };
    let phi = ctx.time("theta-star", || -> Result<QuatTable, CliError> {
        let mut out = QuatTable::new(f.weight);
        if f.entries.is_empty() {
            return Ok(out);
        }
        let keys: Vec<IndexPair> = keys.into_iter().collect();
        let values = keys.par_iter().map(|k| lifts::theta_star(&f, k)).collect::<qms::Result<Vec<_>>>()?;
        out.entries.extend(keys.into_iter().zip(values));
        Ok(out)
    })?;
    let mut details = Vec::new();
    ctx.write_or_describe(&Table::Quaternionic(phi), &mut details)?;
    Ok(Outcome::pass(details))
}

fn maass_check(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let r = match ctx.read()? {
        Table::Siegel(f) => ctx.time("check", || lifts::classical_maass_check(&f))?,
        Table::Quaternionic(phi) => ctx.time("check", || lifts::maass_membership(&phi))?,
        Table::HalfIntegral(_) => return Err(CliError::Data("maass-check expects a siegel or quaternionic table".into())),
    };
    Ok(r.into())
}

fn fj(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let phi = quat_input(ctx.read()?)?;
    let disc_bound = ctx.bound(lifts::max_disc(&phi.entries.keys().copied().collect()))?;
    let f = ctx.time("extract", || -> Result<SiegelTable, CliError> {
        let mut f = SiegelTable::new(phi.weight, true);
        for t in qms::coset::reduced_triples(disc_bound) {
            if phi.entries.contains_key(&fj_pair(&t)) {
                f.insert(&t, lifts::fj_extract(&phi, &t)?)?;
            }
        }
        Ok(f)
    })?;
    let mut details = Vec::new();
    ctx.write_or_describe(&Table::Siegel(f), &mut details)?;
    Ok(Outcome::pass(details))
}

fn parse_pair(v: &[i64]) -> Result<IndexPair, CliError> {
    let [a, b, c, d, e, f, g, h] = v else {
        return Err(CliError::Usage(format!("--lambda needs eight integers, got {}", v.len())));
    };
    Ok(IndexPair::new([[*a, *b], [*c, *d]], [[*e, *f], [*g, *h]]))
}

fn dirichlet(ctx: &mut Ctx, lambda: &[i64], exclude: &[u64]) -> Result<Outcome, CliError> {
    let l = parse_pair(lambda)?;
    let phi = quat_input(ctx.read()?)?;
    let n_max = ctx.bound(12)? as u64;
    let series = ctx.time("series", || lifts::dirichlet_series(&phi, &l, n_max, exclude))?;
    let check = ctx.time("factorization", || lifts::dirichlet_factor_check(&phi, &l, n_max, exclude))?;
    let coeffs: BTreeMap<String, Value> = series
        .coeffs
        .iter()
        .map(|(n, v)| (n.to_string(), json!({ "re": v.re.to_string(), "im": v.im.to_string() })))
        .collect();
    let mut out: Outcome = check.into();
    out.details.push(json!({ "lambda": l.to_string(), "coefficients": coeffs }));
    Ok(out)
}

fn reduce(ctx: &mut Ctx, t1: &[i128], t2: &[i128]) -> Result<Outcome, CliError> {
    if t1.len() != t2.len() || !t1.len().is_multiple_of(2) {
        return Err(CliError::Usage("--t1 and --t2 need the same even number of coordinates".into()));
    }
    let l = SplitLattice::new(t1.len() / 2)?;
    let (g, s) = ctx.time("reduce", || orbits::reduce_pair(&l, t1, t2))?;
    let (c1, c2) = orbits::canonical_pair(&l, &s);
    let ok = g.apply(t1)? == c1 && g.apply(t2)? == c2;
    let details = vec![json!({
        "gram": [s.a, s.b, s.c],
        "canonical": [c1, c2],
        "g": g.g,
    })];
    Ok(Outcome { ok, details })
}

fn whittaker_cmd(ctx: &mut Ctx, gamma: f64, ts: &[f64], angles: &[f64]) -> Result<Outcome, CliError> {
    let ell = ctx.opts.weight.unwrap_or(4);
    if ell < 1 {
        return Err(CliError::Usage("--weight must be positive".into()));
    }
    let tol = ctx.opts.tol.unwrap_or(1e-6);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    let mut at = Value::Null;
    let start = Instant::now();
    for &t in ts {
        for &theta in angles {
            let input = ArchimedeanInput {
                t_vec: verify::archimedean_t(gamma),
                t,
                u: whittaker::boost_y1(theta),
                ell: ell as usize,
            };
            let (num, closed) = whittaker::archimedean_integral_check(&input)?;
            let err = num.rel_diff(&closed);
            if err >= worst {
                worst = err;
                at = json!({ "t": t, "angle": theta });
            }
            for v in -ell..=ell {
                let (a, b) = (num.get(v), closed.get(v));
                rows.push(vec![float(t), float(theta), v.to_string(), float(a.re), float(a.im), float(b.re), float(b.im)]);
            }
        }
    }
    ctx.timings.insert("integrals".into(), start.elapsed().as_secs_f64());
    let mut details = vec![json!({ "cases": ts.len() * angles.len(), "max_error": worst, "worst_case": at })];
    if let Some(p) = &ctx.opts.out {
        let header = ["t", "angle", "v", "numeric_re", "numeric_im", "closed_re", "closed_im"];
        write_csv(p, &header, &rows)?;
        details.push(json!({ "written": p.display().to_string(), "rows": rows.len() }));
    }
    let ok = worst < tol;
    if !ok {
        details.push(json!({ "counterexample": at }));
    }
    Ok(Outcome { ok, details })
}

fn poincare(ctx: &mut Ctx, triple: &[i64]) -> Result<Outcome, CliError> {
    let [a, b, c] = triple else {
        return Err(CliError::Usage("--triple needs three integers".into()));
    };
    let t = GramTriple::new(*a, *b, *c);
    let ell = ctx.opts.weight.unwrap_or(16) as usize;
    let radius = ctx.bound(1)?;
    let g = whittaker::mat8_identity();
    let sum = ctx.time("sum", || whittaker::q_poincare(&t, ell, &g, radius))?;
    let norm = sum.value.norm();
    let rel = if norm > 0.0 { sum.last_shell / norm } else { sum.last_shell };
    let mut details = vec![json!({ "terms": sum.terms, "norm": norm, "last_shell": sum.last_shell, "relative_last_shell": rel })];
    if let Some(p) = &ctx.opts.out {
        let rows: Vec<Vec<String>> = (-(ell as i64)..=ell as i64)
            .map(|v| {
                let z = sum.value.get(v);
                vec![v.to_string(), float(z.re), float(z.im)]
            })
            .collect();
        write_csv(p, &["v", "re", "im"], &rows)?;
        details.push(json!({ "written": p.display().to_string(), "rows": rows.len() }));
    }
    let ok = ctx.opts.tol.is_none_or(|tol| rel < tol);
    Ok(Outcome { ok, details })
}

/// A deterministic synthetic table of the given kind.
///
/// `bound` is the largest index for half-integral tables, the
/// discriminant bound for Siegel tables and the determinant bound of the
/// key set for quaternionic tables.
pub fn synth_table(kind: Kind, seed: u64, weight: i64, bound: i64) -> qms::Result<Table> {
    Ok(match kind {
        Kind::Halfintegral => Table::HalfIntegral(verify::synth_halfintegral(seed, weight, bound)),
        Kind::Siegel => Table::Siegel(verify::synth_siegel(seed, weight, bound)),
        Kind::Quaternionic => Table::Quaternionic(verify::synth_quaternionic(seed, weight, bound)?),
    })
}

fn synth(ctx: &mut Ctx, kind: Kind) -> Result<Outcome, CliError> {
    let (seed, weight) = (ctx.seed(), ctx.opts.weight.unwrap_or(10));
    let bound = match kind {
        Kind::Halfintegral => ctx.bound(100)?,
        Kind::Siegel => ctx.bound(40)?,
        Kind::Quaternionic => ctx.bound(12)?,
    };
    let t = ctx.time("synth", || synth_table(kind, seed, weight, bound))?;
    let mut details = Vec::new();
    ctx.write_or_describe(&t, &mut details)?;
    Ok(Outcome::pass(details))
}

fn dispatch(ctx: &mut Ctx, cmd: &Cmd) -> Result<Outcome, CliError> {
    match cmd {
        Cmd::OctCheck => oct_check(ctx),
        Cmd::TrialityVerify => triality_verify(ctx),
        Cmd::Lift => lift(ctx),
        Cmd::ThetaStar { lambda } => theta_star(ctx, lambda.as_deref()),
        Cmd::MaassCheck => maass_check(ctx),
        Cmd::Fj => fj(ctx),
        Cmd::Dirichlet { lambda, exclude } => dirichlet(ctx, lambda, exclude),
        Cmd::Reduce { t1, t2 } => reduce(ctx, t1, t2),
        Cmd::Whittaker { gamma, t, angle } => whittaker_cmd(ctx, *gamma, t, angle),
        Cmd::Poincare { triple } => poincare(ctx, triple),
        Cmd::Synth { kind } => synth(ctx, *kind),
    }
}

fn error_report(command: &str, seed: Option<u64>, message: String) -> Report {
    Report {
        command: command.into(),
        status: Status::Error,
        details: vec![json!({ "error": message })],
        seed,
        timings: BTreeMap::new(),
    }
}

/// Parses `argv` (including the program name) and runs the command.
///
/// Help and version requests are surfaced as `Err` with the text clap
/// renders, so the caller can print it verbatim.
pub fn run<I, T>(argv: I) -> Result<(i32, Report), String>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => return Err(e.to_string()),
        Err(e) => {
            let r = error_report("", None, e.to_string());
            return Ok((2, r));
        }
    };
    let command = cli.cmd.name();
    let seed = Some(cli.opts.seed.unwrap_or(DEFAULT_SEED));
    let mut ctx = Ctx { opts: cli.opts.clone(), timings: BTreeMap::new() };
    let result = match cli.opts.threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&mut ctx, &cli.cmd)),
            Err(e) => Err(CliError::Usage(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(&mut ctx, &cli.cmd),
    };
    let report = match result {
        Ok(o) => Report {
            command: command.into(),
            status: if o.ok { Status::Pass } else { Status::Fail },
            details: o.details,
            seed,
            timings: ctx.timings,
        },
        Err(e) => error_report(command, seed, e.to_string()),
    };
    Ok((report.status.exit_code(), report))
}
