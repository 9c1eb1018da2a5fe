use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cubic_span::census::{self, CensusOptions, Family, Interpretation};
use cubic_span::surface::StrictBudget;
use cubic_span::{CubicSurface, Point, SpanContext};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "cubic-span",
    version,
    about = "Secant-and-tangent spans on cubic surfaces over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Verb {
    /// Classify points (Eckardt / cusp / node).
    Classify,
    /// K-lines on the surface.
    Lines,
    /// Span of the given points.
    Span,
    /// Points whose span is all of S(K), with pairs as a fallback.
    Generators,
    /// Exact smoothness test.
    Smooth,
    /// Enumerate all 2^16 F2 models.
    #[command(name = "census-f2")]
    CensusF2,
    /// Enumerate the 3^7 F3 normal-form models.
    #[command(name = "census-f3")]
    CensusF3,
    /// Enumerate the 3^10 F3 models with Q2 = YZ + Z^2.
    #[command(name = "census-f3-superset")]
    CensusF3Superset,
    /// Sample surfaces with a skew pair of K-lines and test single-point generation.
    #[command(name = "verify-theorem")]
    VerifyTheorem,
    /// Sample surfaces and run the structural property checks.
    #[command(name = "lemma-suite")]
    LemmaSuite,
}

#[derive(Args)]
struct Opts {
    /// Field size for sampled runs.
    #[arg(long, global = true)]
    q: Option<u32>,
    /// Surface as "q=p^k; F=c0,...,c19".
    #[arg(long, global = true)]
    surface: Option<String>,
    /// Read the surface string from a file.
    #[arg(long = "in", global = true, value_name = "FILE")]
    input: Option<PathBuf>,
    /// A point a:b:c:d (repeatable).
    #[arg(long = "point", global = true, value_name = "a:b:c:d")]
    points: Vec<String>,
    #[arg(long, global = true, default_value_t = 100)]
    samples: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Resumable cursor file for enumerations.
    #[arg(long, global = true, value_name = "FILE")]
    checkpoint: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also search for singular points over extensions (degree ≤ 6).
    #[arg(long = "strict-smooth", global = true)]
    strict_smooth: bool,
    #[arg(long, global = true, default_value = "eYW", value_parser = parse_interp)]
    interpretation: Interpretation,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

fn parse_interp(s: &str) -> Result<Interpretation, String> {
    s.parse()
}

/// Usage-level failure: bad input rather than a mathematical verdict.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

struct Output {
    value: Value,
    counterexample: bool,
}

impl Output {
    fn ok(value: Value) -> Output {
        Output {
            value,
            counterexample: false,
        }
    }
}

fn load_surface(opts: &Opts) -> Result<CubicSurface, UsageError> {
    let text = match (&opts.surface, &opts.input) {
        (Some(s), None) => s.clone(),
        (None, Some(path)) => {
            let raw = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            raw.lines()
                .map(str::trim)
                .find(|l| !l.is_empty() && !l.starts_with('#'))
                .ok_or_else(|| UsageError(format!("{}: no surface found", path.display())))?
                .to_string()
        }
        (Some(_), Some(_)) => {
            return Err(UsageError("give either --surface or --in, not both".into()))
        }
        (None, None) => return Err(UsageError("this verb needs --surface or --in".into())),
    };
    Ok(CubicSurface::parse(&text)?)
}

fn parse_points(s: &CubicSurface, opts: &Opts) -> Result<Vec<Point>, UsageError> {
    opts.points
        .iter()
        .map(|p| Point::parse(s.field(), p).map_err(UsageError::from))
        .collect()
}

fn require_smooth(s: &CubicSurface, opts: &Opts) -> Result<(), UsageError> {
    let smooth = if opts.strict_smooth {
        s.is_smooth_strict(StrictBudget::default())
    } else {
        s.is_smooth()
    };
    if smooth {
        Ok(())
    } else {
        Err(UsageError("surface is singular".into()))
    }
}

fn census_opts(opts: &Opts) -> CensusOptions {
    CensusOptions {
        workers: opts.workers,
        checkpoint: opts.checkpoint.clone(),
        ..CensusOptions::default()
    }
}

fn report(r: census::CensusReport) -> Output {
    Output {
        counterexample: r.has_counterexamples(),
        value: serde_json::to_value(&r).expect("serializable"),
    }
}

fn run(verb: Verb, opts: &Opts) -> Result<Output, UsageError> {
    Ok(match verb {
        Verb::Classify => {
            let s = load_surface(opts)?;
            require_smooth(&s, opts)?;
            let mut pts = parse_points(&s, opts)?;
            if pts.is_empty() {
                pts = s.points();
            }
            let rows = pts
                .iter()
                .map(|p| {
                    let c = s.classify_point(p)?;
                    Ok(json!({ "point": p, "class": c }))
                })
                .collect::<Result<Vec<Value>, UsageError>>()?;
            Output::ok(json!(rows))
        }
        Verb::Lines => {
            let s = load_surface(opts)?;
            let lines: Vec<String> = s
                .k_lines_on_surface()
                .iter()
                .map(|l| l.to_string())
                .collect();
            Output::ok(json!({ "count": lines.len(), "lines": lines }))
        }
        Verb::Span => {
            let s = load_surface(opts)?;
            let pts = parse_points(&s, opts)?;
            if pts.is_empty() {
                return Err(UsageError("span needs at least one --point".into()));
            }
            let ctx = SpanContext::new(&s);
            let members = ctx.closure_points(&pts)?;
            Output::ok(json!({
                "seeds": pts,
                "size": members.len(),
                "points": ctx.len(),
                "generates": members.len() == ctx.len(),
                "members": members,
            }))
        }
        Verb::Generators => {
            let s = load_surface(opts)?;
            require_smooth(&s, opts)?;
            let r = SpanContext::new(&s).generator_report(2);
            Output::ok(serde_json::to_value(&r)?)
        }
        Verb::Smooth => {
            let s = load_surface(opts)?;
            let mut v = json!({ "smooth": s.is_smooth() });
            if let Some(p) = s.rational_singular_point() {
                v["singular_point"] = json!(p);
            }
            if opts.strict_smooth {
                let budget = StrictBudget::default();
                let found = s.singular_point_search(budget);
                v["strict"] = json!({ "budget": budget, "singular_search": found });
                v["smooth"] = json!(s.is_smooth() && found.is_none());
            }
            Output::ok(v)
        }
        Verb::CensusF2 => report(census::run_census(
            Family::F2,
            0..Family::F2.total(),
            &census_opts(opts),
        )?),
        Verb::CensusF3 => {
            let fam = Family::F3Family(opts.interpretation);
            report(census::run_census(fam, 0..fam.total(), &census_opts(opts))?)
        }
        Verb::CensusF3Superset => {
            let fam = Family::F3Superset;
            report(census::run_census(fam, 0..fam.total(), &census_opts(opts))?)
        }
        Verb::VerifyTheorem => {
            let q = opts
                .q
                .ok_or_else(|| UsageError("verify-theorem needs --q".into()))?;
            report(census::verify_main_theorem(
                q,
                opts.samples,
                opts.seed,
                opts.workers,
            )?)
        }
        Verb::LemmaSuite => {
            let q = opts
                .q
                .ok_or_else(|| UsageError("lemma-suite needs --q".into()))?;
            report(census::lemma_suite(
                q,
                opts.samples,
                opts.seed,
                opts.workers,
            )?)
        }
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// Flat key/value rendering; arrays of objects become one line per entry.
fn table(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
            for (k, x) in map {
                match x {
                    Value::Array(items) if !items.is_empty() => {
                        let _ = writeln!(out, "{k:width$}  ({} entries)", items.len());
                        for item in items {
                            let _ = writeln!(out, "  {}", inline(item));
                        }
                    }
                    Value::Object(_) => {
                        let _ = writeln!(out, "{k}:");
                        for line in table(x).lines() {
                            let _ = writeln!(out, "  {line}");
                        }
                    }
                    _ => {
                        let _ = writeln!(out, "{k:width$}  {}", inline(x));
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                let _ = writeln!(out, "{}", inline(item));
            }
        }
        other => {
            let _ = writeln!(out, "{}", scalar(other));
        }
    }
    out
}

fn inline(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, x)| format!("{k}={}", inline(x)))
            .collect::<Vec<_>>()
            .join(" "),
        Value::Array(items) => format!(
            "[{}]",
            items.iter().map(inline).collect::<Vec<_>>().join(", ")
        ),
        other => scalar(other),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.verb, &cli.opts) {
        Ok(out) => {
            let text = match cli.opts.format {
                Format::Json => serde_json::to_string_pretty(&out.value).expect("json") + "\n",
                Format::Table => table(&out.value),
            };
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            if out.counterexample {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
