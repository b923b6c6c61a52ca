//! Batch runner behind the `wolffkit` binary.
//!
//! Exit codes: 0 when every row passes, 1 on a verdict mismatch or an
//! undecided/failed computation, 2 on a configuration error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{
    BoundInstance, CriterionInstance, CriterionKind, EnergyInstance, OracleInstance,
    PotentialInstance, RunConfig, SCHEMA,
};
use crate::criteria::{hoelder_sup_inf_check, morrey_density_check, CriterionReport};
use crate::error::Error;
use crate::radial::{
    check_int_div, default_bumps, default_fit_range, fit_asymptotics, solve_radial,
    verify_two_sided_bound, verify_weak_form,
};
use crate::rearrangement::{lorentz_functional, marcinkiewicz_check};
use crate::wolff::{hedberg_wolff_energy, wolff_potential, WolffOptions, WolffResult};

pub const DEFAULT_TOL: f64 = 1e-9;
const DEFAULT_BRACKET: [f64; 2] = [0.02, 50.0];

#[derive(Debug, Parser)]
#[command(
    name = "wolffkit",
    version,
    about = "Wolff potentials, radial oracles and regularity criteria"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wolff potentials W(x0, R) for every (measure, x0, R).
    Potential(Common),
    /// Radial solutions: profile values, weak-form residuals, exponent fits.
    Oracle(Common),
    /// Two-sided potential bound ratios on radial instances.
    VerifyBounds(Common),
    /// Lorentz, Marcinkiewicz, Morrey, Hölder, int-div and energy criteria.
    Criteria(Common),
    /// Hedberg–Wolff energies.
    HedbergWolff(Common),
    /// Every section of the config in one report.
    Report(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; reports go to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "WOLFFKIT_TOL")]
    pub tol: Option<f64>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

/// One report row. Numbers are written in shortest round-trip `e` notation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub id: String,
    pub operation: String,
    pub digest: String,
    pub x0: String,
    #[serde(rename = "R")]
    pub radius: String,
    pub value: String,
    pub status: String,
    pub error: String,
    pub panels: String,
    pub check: Check,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Pass,
    Warn,
    Fail,
}

pub fn fmt_f(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:e}")
    }
}

fn fmt_point(x: &[f64]) -> String {
    x.iter().map(|v| fmt_f(*v)).collect::<Vec<_>>().join(";")
}

impl Row {
    fn new(id: &str, operation: &str, digest: &str) -> Self {
        Row {
            id: id.into(),
            operation: operation.into(),
            digest: digest.into(),
            x0: String::new(),
            radius: String::new(),
            value: String::new(),
            status: String::new(),
            error: String::new(),
            panels: String::new(),
            check: Check::Pass,
            note: String::new(),
        }
    }

    fn failed(mut self, e: &Error) -> Self {
        self.status = match e {
            Error::Undecided(_) => "undecided",
            _ => "error",
        }
        .into();
        self.check = Check::Fail;
        self.note = e.to_string();
        self
    }

    fn wolff(mut self, w: &WolffResult) -> Self {
        self.value = fmt_f(w.value);
        self.status = w.status.as_str().into();
        self.error = fmt_f(w.error);
        self.panels = w.panels.to_string();
        if let Some(d) = &w.diagnostic {
            self.note = d.clone();
        }
        self
    }

    fn criterion(mut self, r: &CriterionReport) -> Self {
        self.value = fmt_f(r.value);
        self.status = r.verdict.as_str().into();
        let mut notes = Vec::new();
        if let Some(w) = r.witness {
            notes.push(format!("witness={}", fmt_f(w)));
        }
        if let Some(s) = r.spread {
            notes.push(format!("spread={}", fmt_f(s)));
        }
        if let Some(d) = &r.detail {
            notes.push(d.clone());
        }
        self.note = notes.join("; ");
        self
    }
}

/// Settings shared by all instances of a run.
struct Ctx<'a> {
    cfg: &'a RunConfig,
    base: PathBuf,
    opts: WolffOptions,
}

/// Configuration problems found while building an instance.
struct ConfigProblem(String);

type Built<T> = std::result::Result<T, ConfigProblem>;

fn cfg_err(id: &str) -> impl Fn(Error) -> ConfigProblem + '_ {
    move |e| ConfigProblem(format!("instance '{id}': {e}"))
}

fn digest<T: Serialize>(
    ctx: &Ctx,
    inst: &T,
    n: Option<usize>,
    f: &Option<crate::config::NFunctionSpec>,
) -> String {
    let mut v = serde_json::to_value(inst).unwrap_or(Value::Null);
    if let Value::Object(map) = &mut v {
        map.insert("n".into(), json!(n.or(ctx.cfg.n)));
        map.insert(
            "nfunction".into(),
            serde_json::to_value(f.as_ref().or(ctx.cfg.nfunction.as_ref())).unwrap_or(Value::Null),
        );
    }
    let canonical = serde_json::to_string(&v).unwrap_or_default();
    Sha256::digest(canonical.as_bytes())
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn expectation_met(expect: Option<&str>, status: &str) -> bool {
    status == expect.unwrap_or("converged")
}

fn run_potential(ctx: &Ctx, inst: &PotentialInstance) -> Built<Vec<Row>> {
    let e = cfg_err(&inst.id);
    let space = ctx.cfg.space(inst.n).map_err(&e)?;
    let f = ctx.cfg.nfunction(&inst.nfunction).map_err(&e)?;
    let m = inst.measure.build(space, &f, &ctx.base).map_err(&e)?;
    let dg = digest(ctx, inst, inst.n, &inst.nfunction);
    let mut rows = Vec::new();
    for x0 in &inst.x0 {
        for &radius in &inst.radius {
            let mut row = Row::new(&inst.id, "potential", &dg);
            row.x0 = fmt_point(x0);
            row.radius = fmt_f(radius);
            let row = match wolff_potential(&m, &f, x0, radius, &ctx.opts) {
                Err(err) => row.failed(&err),
                Ok(w) => {
                    let mut row = row.wolff(&w);
                    let mut ok = expectation_met(inst.expect.as_deref(), w.status.as_str());
                    if let Some(target) = inst.value {
                        let tol = inst.value_tol.unwrap_or(1e-8);
                        if !((w.value - target).abs() <= tol) {
                            ok = false;
                            row.note = format!("expected {} ± {}", fmt_f(target), fmt_f(tol));
                        }
                    }
                    if !ok {
                        row.check = Check::Fail;
                    }
                    row
                }
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

fn run_oracle(ctx: &Ctx, inst: &OracleInstance) -> Built<Vec<Row>> {
    let e = cfg_err(&inst.id);
    let space = ctx.cfg.space(inst.n).map_err(&e)?;
    let f = ctx.cfg.nfunction(&inst.nfunction).map_err(&e)?;
    let m = inst.measure.build(space, &f, &ctx.base).map_err(&e)?;
    let sol = solve_radial(&f, &m, inst.r_out).map_err(&e)?;
    let dg = digest(ctx, inst, inst.n, &inst.nfunction);
    let mut rows = Vec::new();
    for &p in &inst.probes {
        let mut row = Row::new(&inst.id, "u", &dg);
        row.x0 = fmt_f(p);
        rows.push(match sol.value(p) {
            Ok(u) => {
                row.value = fmt_f(u);
                row.status = if u.is_finite() { "finite" } else { "infinite" }.into();
                row
            }
            Err(err) => row.failed(&err),
        });
    }
    let bumps = default_bumps(inst.r_out, inst.bumps.unwrap_or(20));
    let tol = inst.weak_tol.unwrap_or(1e-6);
    let mut row = Row::new(&inst.id, "weak_residual", &dg);
    row.error = fmt_f(tol);
    rows.push(match verify_weak_form(&sol, &bumps, tol) {
        Ok(rep) => {
            row.value = fmt_f(rep.max_residual);
            row.status = "pass".into();
            row
        }
        Err(err) => row.failed(&err),
    });
    if inst.fit {
        let range = default_fit_range(&f);
        let mut row = Row::new(&inst.id, "fit", &dg);
        row.note = format!("range=[{}, {}]", fmt_f(range.0), fmt_f(range.1));
        rows.push(match fit_asymptotics(&sol, range) {
            Ok(fit) => {
                row.value = fmt_f(fit.exponent);
                row.status = "fitted".into();
                row.error = fmt_f(fit.rms_residual);
                if let Some(l) = fit.log_exponent {
                    row.note = format!("{}; log_exponent={}", row.note, fmt_f(l));
                }
                row
            }
            Err(err) => row.failed(&err),
        });
    }
    Ok(rows)
}

fn run_bounds(ctx: &Ctx, inst: &BoundInstance) -> Built<Vec<Row>> {
    let e = cfg_err(&inst.id);
    let space = ctx.cfg.space(inst.n).map_err(&e)?;
    let f = ctx.cfg.nfunction(&inst.nfunction).map_err(&e)?;
    let m = inst.measure.build(space, &f, &ctx.base).map_err(&e)?;
    let sol = solve_radial(&f, &m, inst.r_out).map_err(&e)?;
    let dg = digest(ctx, inst, inst.n, &inst.nfunction);
    let [lo, hi] = ctx.cfg.bracket.unwrap_or(DEFAULT_BRACKET);
    let rep = match verify_two_sided_bound(&sol, &inst.probes, &inst.r_sweep, &ctx.opts) {
        Ok(r) => r,
        Err(err) => return Ok(vec![Row::new(&inst.id, "two_sided", &dg).failed(&err)]),
    };
    let mut rows = Vec::new();
    for r in &rep.rows {
        if let Some(why) = &r.skipped {
            let mut row = Row::new(&inst.id, "two_sided", &dg);
            row.x0 = fmt_f(r.probe);
            row.radius = fmt_f(r.radius);
            row.status = "skipped".into();
            row.check = Check::Warn;
            row.note = why.clone();
            rows.push(row);
            continue;
        }
        let note = format!(
            "u={}; inf={}; W={}",
            fmt_f(r.u),
            fmt_f(r.inf),
            fmt_f(r.wolff)
        );
        for (op, ratio) in [("ratio_up", r.ratio_up), ("ratio_low", r.ratio_low)] {
            let mut row = Row::new(&inst.id, op, &dg);
            row.x0 = fmt_f(r.probe);
            row.radius = fmt_f(r.radius);
            row.note = note.clone();
            match ratio {
                Some(v) if v > 0.0 => {
                    row.value = fmt_f(v);
                    let inside = v >= lo && v <= hi;
                    row.status = if inside { "inside" } else { "outside" }.into();
                    if !inside {
                        row.check = Check::Fail;
                    }
                }
                Some(v) => {
                    row.value = fmt_f(v);
                    row.status = "vacuous".into();
                }
                None => row.status = "vacuous".into(),
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

fn energy_row(
    id: &str,
    dg: &str,
    r: std::result::Result<WolffResult, Error>,
    expect: Option<&str>,
) -> Row {
    let row = Row::new(id, "hedberg_wolff", dg);
    match r {
        Err(err) => row.failed(&err),
        Ok(w) => {
            let mut row = row.wolff(&w);
            if !expectation_met(expect, w.status.as_str()) {
                row.check = Check::Fail;
            }
            row
        }
    }
}

fn run_criterion(ctx: &Ctx, inst: &CriterionInstance) -> Built<Vec<Row>> {
    let e = cfg_err(&inst.id);
    let space = ctx.cfg.space(inst.n).map_err(&e)?;
    let f = ctx.cfg.nfunction(&inst.nfunction).map_err(&e)?;
    let dg = digest(ctx, inst, inst.n, &inst.nfunction);
    let expect = inst.expect.as_deref();
    let verdict_row =
        |op: &str, r: std::result::Result<CriterionReport, Error>, max_spread: Option<f64>| {
            let row = Row::new(&inst.id, op, &dg);
            match r {
                Err(err) => row.failed(&err),
                Ok(rep) => {
                    let mut row = row.criterion(&rep);
                    let mut ok = rep.verdict.as_str() == expect.unwrap_or("satisfied");
                    if let (Some(limit), Some(s)) = (max_spread, rep.spread) {
                        if s > limit {
                            ok = false;
                            row.note = format!("{}; spread above {}", row.note, fmt_f(limit));
                        }
                    }
                    if !ok {
                        row.check = Check::Fail;
                    }
                    row
                }
            }
        };
    let row = match &inst.kind {
        CriterionKind::Lorentz { function } => {
            let sf = function.build(&ctx.base).map_err(&e)?;
            verdict_row("lorentz", lorentz_functional(&sf, &f, space.n()), None)
        }
        CriterionKind::Marcinkiewicz { function, theta } => {
            let sf = function.build(&ctx.base).map_err(&e)?;
            verdict_row(
                "marcinkiewicz",
                marcinkiewicz_check(&sf, &f, space.n(), *theta),
                None,
            )
        }
        CriterionKind::Morrey {
            measure,
            theta,
            samples,
            threshold,
        } => {
            let m = measure.build(space, &f, &ctx.base).map_err(&e)?;
            let s: Vec<(Vec<f64>, f64)> = samples.iter().map(|s| (s.x.clone(), s.r)).collect();
            verdict_row(
                "morrey",
                morrey_density_check(&m, &f, *theta, &s, threshold.unwrap_or(1e3)),
                None,
            )
        }
        CriterionKind::Hoelder {
            measure,
            r_out,
            theta,
            centers,
            radii,
            threshold,
            max_spread,
        } => {
            let m = measure.build(space, &f, &ctx.base).map_err(&e)?;
            let sol = solve_radial(&f, &m, *r_out).map_err(&e)?;
            let rep = hoelder_sup_inf_check(&sol, *theta, centers, radii, threshold.unwrap_or(1e3))
                .map(|r| r.0);
            verdict_row("hoelder", rep, *max_spread)
        }
        CriterionKind::IntDiv {} => {
            let row = Row::new(&inst.id, "int_div", &dg);
            match check_int_div(&f, &space) {
                Err(err) => row.failed(&err),
                Ok(rep) => {
                    let mut row = row;
                    row.status = if rep.bounded { "bounded" } else { "unbounded" }.into();
                    row.value = rep.bounded.to_string();
                    row.panels = (rep.kernel_terms.len() + rep.conjugate_terms.len()).to_string();
                    if let Some(want) = expect {
                        if want != row.status {
                            row.check = Check::Fail;
                        }
                    }
                    row
                }
            }
        }
        CriterionKind::HedbergWolff { measure, radius } => {
            let m = measure.build(space, &f, &ctx.base).map_err(&e)?;
            let mut row = energy_row(
                &inst.id,
                &dg,
                hedberg_wolff_energy(&m, &f, *radius, &ctx.opts),
                expect,
            );
            row.radius = fmt_f(*radius);
            row
        }
    };
    Ok(vec![row])
}

fn run_energy(ctx: &Ctx, inst: &EnergyInstance) -> Built<Vec<Row>> {
    let e = cfg_err(&inst.id);
    let space = ctx.cfg.space(inst.n).map_err(&e)?;
    let f = ctx.cfg.nfunction(&inst.nfunction).map_err(&e)?;
    let m = inst.measure.build(space, &f, &ctx.base).map_err(&e)?;
    let dg = digest(ctx, inst, inst.n, &inst.nfunction);
    let res = hedberg_wolff_energy(&m, &f, inst.radius, &ctx.opts);
    let value = res.as_ref().ok().map(|w| w.value);
    let mut row = energy_row(&inst.id, &dg, res, inst.expect.as_deref());
    row.radius = fmt_f(inst.radius);
    if let (Some(target), Some(v)) = (inst.value, value) {
        let tol = inst.value_tol.unwrap_or(1e-6);
        if !((v - target).abs() <= tol) {
            row.check = Check::Fail;
            row.note = format!("expected {} ± {}", fmt_f(target), fmt_f(tol));
        }
    }
    Ok(vec![row])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Potential,
    Oracle,
    Bounds,
    Criteria,
    Energy,
}

fn run_section<T: Sync>(
    ctx: &Ctx,
    items: &[T],
    f: impl Fn(&Ctx, &T) -> Built<Vec<Row>> + Sync,
) -> std::result::Result<Vec<Row>, String> {
    let parts: Vec<Built<Vec<Row>>> = items.par_iter().map(|i| f(ctx, i)).collect();
    let mut rows = Vec::new();
    for p in parts {
        rows.extend(p.map_err(|ConfigProblem(m)| m)?);
    }
    // ids are unique, so a stable sort keeps each instance's rows in order
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(rows)
}

fn run_sections(ctx: &Ctx, sections: &[Section]) -> std::result::Result<Vec<Row>, String> {
    let cfg = ctx.cfg;
    let mut rows = Vec::new();
    for s in sections {
        rows.extend(match s {
            Section::Potential => run_section(ctx, &cfg.potential, run_potential)?,
            Section::Oracle => run_section(ctx, &cfg.oracle, run_oracle)?,
            Section::Bounds => run_section(ctx, &cfg.bounds, run_bounds)?,
            Section::Criteria => run_section(ctx, &cfg.criteria, run_criterion)?,
            Section::Energy => run_section(ctx, &cfg.hedberg_wolff, run_energy)?,
        });
    }
    Ok(rows)
}

/// Runs `sections` of a parsed config on a pool of `jobs` threads.
pub fn execute(
    cfg: &RunConfig,
    base: &Path,
    tol: f64,
    jobs: Option<usize>,
    command: &str,
) -> std::result::Result<Vec<Row>, String> {
    let sections: &[Section] = match command {
        "potential" => &[Section::Potential],
        "oracle" => &[Section::Oracle],
        "verify-bounds" => &[Section::Bounds],
        "criteria" => &[Section::Criteria],
        "hedberg-wolff" => &[Section::Energy],
        _ => &[
            Section::Potential,
            Section::Oracle,
            Section::Bounds,
            Section::Criteria,
            Section::Energy,
        ],
    };
    let ctx = Ctx {
        cfg,
        base: base.to_path_buf(),
        opts: WolffOptions {
            tol,
            ..Default::default()
        },
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| format!("cannot start worker pool: {e}"))?;
    pool.install(|| run_sections(&ctx, sections))
}

/// CSV body: a schema comment line, the header, then one line per row.
pub fn to_csv(rows: &[Row], command: &str) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize to csv");
    }
    if rows.is_empty() {
        w.write_record([
            "id",
            "operation",
            "digest",
            "x0",
            "R",
            "value",
            "status",
            "error",
            "panels",
            "check",
            "note",
        ])
        .expect("header writes");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv");
    format!("# {SCHEMA} command={command}\n{body}")
}

fn summary(rows: &[Row], command: &str, seconds: f64) -> Value {
    let count = |c: Check| rows.iter().filter(|r| r.check == c).count();
    let range = |op: &str| {
        let vals: Vec<f64> = rows
            .iter()
            .filter(|r| r.operation == op && (r.status == "inside" || r.status == "outside"))
            .filter_map(|r| r.value.parse().ok())
            .collect();
        if vals.is_empty() {
            Value::Null
        } else {
            json!([
                vals.iter().copied().fold(f64::INFINITY, f64::min),
                vals.iter().copied().fold(0.0, f64::max)
            ])
        }
    };
    let failed = count(Check::Fail);
    json!({
        "schema": SCHEMA,
        "command": command,
        "rows": rows.len(),
        "passed": count(Check::Pass),
        "warnings": count(Check::Warn),
        "failed": failed,
        "bracket": {"ratio_up": range("ratio_up"), "ratio_low": range("ratio_low")},
        "verdict": if failed == 0 { "pass" } else { "fail" },
        "wall_seconds": seconds,
    })
}

fn command_name(c: &Command) -> (&'static str, &Common) {
    match c {
        Command::Potential(a) => ("potential", a),
        Command::Oracle(a) => ("oracle", a),
        Command::VerifyBounds(a) => ("verify-bounds", a),
        Command::Criteria(a) => ("criteria", a),
        Command::HedbergWolff(a) => ("hedberg-wolff", a),
        Command::Report(a) => ("report", a),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, common) = command_name(&cli.command);
    let started = Instant::now();
    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", common.config.display());
            return 2;
        }
    };
    let cfg = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", common.config.display());
            return 2;
        }
    };
    let tol = common.tol.or(cfg.tol).unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        eprintln!("config error: tolerance must be positive, got {tol}");
        return 2;
    }
    let base = common
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let rows = match execute(&cfg, &base, tol, common.jobs, name) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return 2;
        }
    };
    let summary = summary(&rows, name, started.elapsed().as_secs_f64());
    let body = match common.format {
        Format::Csv => to_csv(&rows, name),
        Format::Json => {
            serde_json::to_string_pretty(&json!({"schema": SCHEMA, "command": name, "rows": rows}))
                .expect("rows serialize to json")
        }
    };
    let ext = match common.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    match &common.out {
        Some(dir) => {
            let written = std::fs::create_dir_all(dir)
                .and_then(|_| std::fs::write(dir.join(format!("{name}.{ext}")), &body))
                .and_then(|_| {
                    std::fs::write(
                        dir.join("summary.json"),
                        serde_json::to_string_pretty(&summary).expect("summary serializes"),
                    )
                });
            if let Err(e) = written {
                eprintln!("cannot write report to {}: {e}", dir.display());
                return 1;
            }
        }
        None => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(body.as_bytes());
            eprintln!("{summary}");
        }
    }
    if rows.iter().any(|r| r.check == Check::Fail) {
        1
    } else {
        0
    }
}
