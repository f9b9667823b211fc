//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 when an `--expect` assertion or a verify-paper check
//! fails, 2 on usage, input or parse errors.

pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::exactalg::{FieldCtx, FieldError};
use crate::families::{FamilyError, FamilySpec};
use crate::groupact::{invariance_report, isomorphic, GroupError, InvarianceVerdict, IsoOutcome, Subgroup};
use crate::jumploci::{self, JumpError, ScanMode};
use crate::presentation::{parse_bundle, Colength, Presentation, PresentationError};
use crate::projgeom::{GeomError, LineP2, PointP2};
use crate::splitting::{splitting_on, SplittingError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ShellError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Bundle { path: PathBuf, source: PresentationError },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Jump(#[from] JumpError),
    #[error(transparent)]
    Splitting(#[from] SplittingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupArg {
    #[value(name = "Gp")]
    Gp,
    #[value(name = "GL")]
    Gl,
    #[value(name = "B")]
    B,
    #[value(name = "T")]
    T,
    #[value(name = "PGL")]
    Full,
}

#[derive(Debug, Parser)]
#[command(name = "planebundles", version, about = "Splitting types, jumping lines and group invariance of rank two bundles on the plane")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// `Q` or `Fp:<prime>`.
    #[arg(long, global = true)]
    field: Option<String>,
    /// `key=value` assertion on the JSON report, e.g. `classification=pencil`.
    #[arg(long, global = true)]
    expect: Vec<String>,
    #[arg(long, global = true, hide = true)]
    mutate: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Source {
    /// Family spec such as `en:3` or `kaneyama:1,2,3`.
    #[arg(long, conflicts_with = "bundle")]
    family: Option<String>,
    /// Bundle file.
    #[arg(long)]
    bundle: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Splitting type on one line.
    Splitting {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        line: String,
    },
    /// Jumping-line scan.
    Scan {
        #[command(flatten)]
        source: Source,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Sampled invariance under a subgroup.
    Invariance {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        group: GroupArg,
        #[arg(long = "p")]
        point: Option<String>,
        #[arg(long = "L")]
        line: Option<String>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Chern classes and stability.
    Chern {
        #[command(flatten)]
        source: Source,
    },
    /// Basis of global sections of a twist.
    Sections {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_hyphen_values = true)]
        twist: i64,
    },
    /// Graded isomorphism between two presentations.
    Isomorphic {
        #[arg(long)]
        bundle: Vec<PathBuf>,
        #[arg(long)]
        family: Vec<String>,
    },
    /// Rerun every acceptance check.
    VerifyPaper {
        #[arg(long)]
        quick: bool,
        /// Add wall-clock times; the JSON is then no longer reproducible.
        #[arg(long)]
        timings: bool,
    },
}

struct Report {
    json: Value,
    text: String,
    /// False when the command itself reports a failed check.
    ok: bool,
}

fn with_header(command: &str, mut body: Value) -> Value {
    let obj = body.as_object_mut().expect("reports are objects");
    obj.insert("schema".into(), json!(SCHEMA_VERSION));
    obj.insert("command".into(), json!(command));
    body
}

fn field_flag(cli: &Cli) -> Result<Option<FieldCtx>, ShellError> {
    cli.field.as_deref().map(FieldCtx::parse).transpose().map_err(Into::into)
}

fn load_bundle(path: &Path, flag: Option<FieldCtx>) -> Result<Presentation, ShellError> {
    let text = std::fs::read_to_string(path).map_err(|source| ShellError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let (p, explicit) = parse_bundle(&text, flag.unwrap_or(FieldCtx::Rationals)).map_err(|source| ShellError::Bundle {
        path: path.to_path_buf(),
        source,
    })?;
    if let (true, Some(f)) = (explicit, flag) {
        if f != p.ctx() {
            return Err(ShellError::Usage(format!(
                "{} declares field {} but --field is {f}",
                path.display(),
                p.ctx()
            )));
        }
    }
    Ok(p)
}

fn load(source: &Source, flag: Option<FieldCtx>) -> Result<(Presentation, String), ShellError> {
    match (&source.family, &source.bundle) {
        (Some(spec), None) => {
            let spec = FamilySpec::parse(spec)?;
            Ok((spec.build(flag.unwrap_or(FieldCtx::Rationals))?, spec.to_string()))
        }
        (None, Some(path)) => Ok((load_bundle(path, flag)?, path.display().to_string())),
        _ => Err(ShellError::Usage("give exactly one of --family or --bundle".into())),
    }
}

fn execute(cli: &Cli) -> Result<Report, ShellError> {
    let flag = field_flag(cli)?;
    match &cli.command {
        Command::Splitting { source, line } => {
            let (p, name) = load(source, flag)?;
            let l = LineP2::parse(line, p.ctx())?;
            let s = splitting_on(&p, &l)?;
            Ok(Report {
                json: with_header(
                    "splitting",
                    json!({"bundle": name, "field": p.ctx().to_string(), "line": l, "a": s.a, "b": s.b}),
                ),
                text: format!("{name} on {l}: O({}) + O({})\n", s.a, s.b),
                ok: true,
            })
        }
        Command::Scan {
            source,
            exhaustive,
            samples,
        } => {
            let (p, name) = load(source, flag)?;
            let mode = match (exhaustive, samples) {
                (true, _) => {
                    if !p.ctx().is_prime_field() {
                        return Err(ShellError::Usage(
                            "exhaustive scans need a prime field; pass --field Fp:<prime>".into(),
                        ));
                    }
                    ScanMode::Exhaustive
                }
                (false, Some(n)) => ScanMode::Sampled { n: *n, seed: cli.seed },
                (false, None) => return Err(ShellError::Usage("scan needs --exhaustive or --samples N".into())),
            };
            let report = jumploci::scan(&p, mode)?;
            let mut body = serde_json::to_value(&report).expect("serializable");
            body["bundle"] = json!(name);
            Ok(Report {
                json: with_header("scan", body),
                text: format!("bundle:         {name}\n{}", jumploci::render_text(&report)),
                ok: true,
            })
        }
        Command::Invariance {
            source,
            group,
            point,
            line,
            samples,
        } => {
            let (p, name) = load(source, flag)?;
            let ctx = p.ctx();
            let pt = match point {
                Some(t) => PointP2::parse(t, ctx)?,
                None => PointP2::from_i64(ctx, [1, 0, 0]).expect("nonzero"),
            };
            let ln = match line {
                Some(t) => LineP2::parse(t, ctx)?,
                None => LineP2::from_i64(ctx, [0, 0, 1]).expect("nonzero"),
            };
            let subgroup = match group {
                GroupArg::Gp => Subgroup::Gp(pt),
                GroupArg::Gl => Subgroup::GL(ln),
                GroupArg::B => Subgroup::borel(pt, ln)?,
                GroupArg::T => Subgroup::Torus,
                GroupArg::Full => Subgroup::Full,
            };
            let report = invariance_report(&p, &subgroup, *samples, cli.seed)?;
            let verdict = match &report.verdict {
                InvarianceVerdict::Invariant { elements_checked, .. } => {
                    format!("invariant on {elements_checked} tested elements (sampled, not a proof)")
                }
                InvarianceVerdict::NotInvariant {
                    element,
                    origin,
                    certified,
                } => format!(
                    "not invariant: {origin} {element} ({})",
                    if *certified { "certified" } else { "probabilistic" }
                ),
            };
            let mut body = serde_json::to_value(&report).expect("serializable");
            body["bundle"] = json!(name);
            Ok(Report {
                json: with_header("invariance", body),
                text: format!("{name} under {}: {verdict}\n", report.group),
                ok: true,
            })
        }
        Command::Chern { source } => {
            let (p, name) = load(source, flag)?;
            let ch = p.chern();
            let (norm, m) = p.normalize();
            let stab = p.stability_class();
            Ok(Report {
                json: with_header(
                    "chern",
                    json!({
                        "bundle": name,
                        "c1": ch.c1,
                        "c2": ch.c2,
                        "normalizing_twist": m,
                        "normalized": norm.chern(),
                        "stability": stab,
                    }),
                ),
                text: format!(
                    "{name}: c1 = {}, c2 = {}; normalized by twist {m}: c1 = {}, c2 = {}; {stab}\n",
                    ch.c1,
                    ch.c2,
                    norm.chern().c1,
                    norm.chern().c2
                ),
                ok: true,
            })
        }
        Command::Sections { source, twist } => {
            let (p, name) = load(source, flag)?;
            let basis = match p.section_basis(*twist) {
                Err(PresentationError::EmptyBasis(_)) => Vec::new(),
                other => other?,
            };
            let shown: Vec<Vec<String>> = basis
                .iter()
                .map(|s| s.reps.iter().map(|f| f.to_string()).collect())
                .collect();
            let mut text = format!("{name}: h0(F({twist})) = {}\n", basis.len());
            for (i, s) in basis.iter().enumerate() {
                let zs = p.section_zero_scheme(s)?;
                let len = match zs.colength {
                    Colength::Finite(n) => n.to_string(),
                    Colength::NotFinite => "not finite".into(),
                };
                text.push_str(&format!("  s{i} = ({}), zero scheme length {len}\n", shown[i].join(", ")));
            }
            Ok(Report {
                json: with_header(
                    "sections",
                    json!({"bundle": name, "twist": twist, "h0": basis.len(), "basis": shown}),
                ),
                text,
                ok: true,
            })
        }
        Command::Isomorphic { bundle, family } => {
            let mut inputs = Vec::new();
            for path in bundle {
                inputs.push((load_bundle(path, flag)?, path.display().to_string()));
            }
            for spec in family {
                let spec = FamilySpec::parse(spec)?;
                inputs.push((spec.build(flag.unwrap_or(FieldCtx::Rationals))?, spec.to_string()));
            }
            let [(p1, n1), (p2, n2)]: [(Presentation, String); 2] = inputs
                .try_into()
                .map_err(|_| ShellError::Usage("isomorphic needs exactly two bundles".into()))?;
            let outcome = isomorphic(&p1, &p2);
            let text = match &outcome {
                IsoOutcome::Witness(w) => {
                    let rows: Vec<String> = w
                        .n
                        .iter()
                        .map(|r| format!("  [{}]", r.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")))
                        .collect();
                    format!(
                        "{n1} and {n2} are isomorphic: lambda = {}, det N = {}\n{}\n",
                        w.lambda,
                        w.det_value,
                        rows.join("\n")
                    )
                }
                IsoOutcome::NotIsomorphic { certified } => format!(
                    "{n1} and {n2}: no isomorphism ({})\n",
                    if *certified { "certified" } else { "probabilistic" }
                ),
            };
            Ok(Report {
                json: with_header(
                    "isomorphic",
                    json!({"first": n1, "second": n2, "isomorphic": outcome.witness().is_some(), "outcome": outcome}),
                ),
                text,
                ok: true,
            })
        }
        Command::VerifyPaper { quick, timings } => {
            if let Some(id) = &cli.mutate {
                if verify::find_check(id).is_none() {
                    return Err(ShellError::Usage(format!("unknown check id {id:?}")));
                }
            }
            let opts = verify::SuiteOptions {
                quick: *quick,
                seed: cli.seed,
                mutate: cli.mutate.clone(),
                timings: *timings,
            };
            let report = verify::verify_paper(&opts);
            Ok(Report {
                json: serde_json::to_value(&report).expect("serializable"),
                text: verify::render_text(&report),
                ok: report.passed,
            })
        }
    }
}

/// Looks up a dotted path; objects with a `kind` tag compare by their tag.
fn lookup<'a>(v: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').try_fold(v, |cur, key| match key.parse::<usize>() {
        Ok(i) if cur.is_array() => cur.get(i),
        _ => cur.get(key),
    })
}

fn expectation_failures(report: &Value, expects: &[String]) -> Result<Vec<String>, ShellError> {
    let mut failures = Vec::new();
    for e in expects {
        let (key, want) = e
            .split_once('=')
            .ok_or_else(|| ShellError::Usage(format!("--expect needs key=value, got {e:?}")))?;
        let got = lookup(report, key.trim()).map(|v| match v {
            Value::Object(m) if m.contains_key("kind") => m["kind"].clone(),
            other => other.clone(),
        });
        let shown = match &got {
            Some(Value::String(s)) => s.clone(),
            Some(other) => other.to_string(),
            None => "<missing>".into(),
        };
        if shown != want.trim() {
            failures.push(format!("expected {key} = {want}, found {shown}"));
        }
    }
    Ok(failures)
}

/// Parses `args` (including the program name), runs the command and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let _ = match cli.format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report.json).expect("serializable")
        ),
        Format::Text => write!(out, "{}", report.text),
    };
    let failures = match expectation_failures(&report.json, &cli.expect) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    for f in &failures {
        let _ = writeln!(err, "{f}");
    }
    if !failures.is_empty() || !report.ok {
        if !report.ok {
            let _ = writeln!(err, "verification failed");
        }
        return 1;
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("planebundles").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn splitting_json() {
        let (code, out, _) = call(&["--format", "json", "splitting", "--family", "en:3", "--line", "[0,1,0]"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!((v["a"].as_i64(), v["b"].as_i64()), (Some(1), Some(-2)));
        assert_eq!(v["schema"], 1);
    }

    #[test]
    fn scan_expectations() {
        let base = ["scan", "--family", "ex61:r=2,k=1,c1=0,f=z^6", "--field", "Fp:7", "--exhaustive"];
        let mut args = base.to_vec();
        args.extend(["--expect", "classification=pencil", "--expect", "classification.point=(0:0:1)"]);
        assert_eq!(call(&args).0, 0);
        let mut args = base.to_vec();
        args.extend(["--expect", "classification=uniform"]);
        let (code, _, err) = call(&args);
        assert_eq!(code, 1);
        assert!(err.contains("found pencil"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["scan", "--family", "en:3", "--exhaustive"]).0, 2);
        assert_eq!(call(&["chern", "--family", "en:0"]).0, 2);
        assert_eq!(call(&["chern", "--bundle", "/nonexistent/bundle.txt"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn negative_twists_parse() {
        let (code, out, _) = call(&["--format", "json", "sections", "--family", "en:3", "--twist", "-1"]);
        assert_eq!(code, 0, "{out}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["twist"], -1);
        assert_eq!(v["h0"], 0);
    }
}
