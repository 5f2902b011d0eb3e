//! The `crforge` command line: classification, normalization, frames and
//! verification of CR germs read from JSON documents.
//!
//! Every input file yields exactly one output document, in input order.
//! Exit status is the largest over all files: 0 on success, 1 on a domain
//! failure (the report is still written), 2 on a parse or I/O error.

pub mod document;
pub mod render;

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use crforge_core::classify::{classify_with, ClassReport, ClassifyOptions};
use crforge_core::frames::{rank_at_origin, standard_fields, TangentFrameField};
use crforge_core::manifold::{check_reality, solve_theta, verify_theta_identities};
use crforge_core::normalize::{
    assert_normal_form_with_tol, default_order, model, model_iv1, normalize, NormalFormReport, NormalizeError,
};
use crforge_core::{ClassTag, DefiningEquations, Mode};
use serde_json::{json, Value};

use document::{ModeName, Overrides};

/// Float reports compare coefficients no tighter than this.
pub const REPORT_FLOAT_TOL: f64 = 1e-7;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_PARSE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "crforge", version, about = "Classify and normalize generic CR germs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Truncation order N (overrides the document and CRFORGE_ORDER).
    #[arg(long, global = true)]
    pub order: Option<i32>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeName>,
    /// Float-mode tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Class tag: I, II, III1, III2, IV1, IV2.
    #[arg(long, global = true)]
    pub tag: Option<ClassTag>,
    /// Recentered base points at which open conditions are re-checked.
    #[arg(long, global = true, default_value_t = 0)]
    pub sample_points: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide the class of each germ.
    Classify { files: Vec<PathBuf> },
    /// Bring each germ to the normal form of its class (or of --tag).
    Normalize { files: Vec<PathBuf> },
    /// Standard frame fields, their origin values and ranks.
    Frame { files: Vec<PathBuf> },
    /// Reality, the graph identities and, with --tag, the normal form.
    Verify { files: Vec<PathBuf> },
    /// Emit the model germ of --tag as an input document.
    Model {
        /// Levi signature of the IV1 model.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        sign: i32,
    },
}

/// Output and exit status of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// One document's result.
struct Emitted {
    code: i32,
    value: Option<Value>,
    error: Option<String>,
}

impl Emitted {
    fn ok(value: Value) -> Emitted {
        Emitted { code: EXIT_OK, value: Some(value), error: None }
    }

    fn domain(value: Value) -> Emitted {
        Emitted { code: EXIT_DOMAIN, value: Some(value), error: None }
    }

    fn parse(message: String) -> Emitted {
        Emitted { code: EXIT_PARSE, value: None, error: Some(message) }
    }
}

/// Runs a parsed command line. `env_order` is the raw `CRFORGE_ORDER`
/// value; `stdin` is read only when a command gets no files.
pub fn run(cli: &Cli, env_order: Option<&str>, stdin: &mut dyn Read) -> Outcome {
    let default_order = match env_order.map(|s| s.trim().parse::<i32>()) {
        None => None,
        Some(Ok(n)) if n >= 2 => Some(n),
        Some(_) => {
            return Outcome {
                code: EXIT_PARSE,
                stderr: format!("CRFORGE_ORDER: {:?} is not an integer >= 2\n", env_order.unwrap_or_default()),
                ..Outcome::default()
            }
        }
    };
    let ov = Overrides { order: cli.order, mode: cli.mode, tol: cli.tol, default_order };
    let results = match &cli.command {
        Command::Model { sign } => vec![model_command(cli, &ov, *sign)],
        Command::Classify { files } | Command::Normalize { files } | Command::Frame { files } | Command::Verify { files } => {
            let inputs = match read_inputs(files, stdin) {
                Ok(inputs) => inputs,
                Err(e) => return Outcome { code: EXIT_PARSE, stderr: format!("{e}\n"), ..Outcome::default() },
            };
            std::thread::scope(|scope| {
                let handles: Vec<_> = inputs
                    .iter()
                    .map(|(name, text)| {
                        let ov = &ov;
                        scope.spawn(move || match text {
                            Ok(text) => file_command(cli, ov, name, text),
                            Err(e) => Emitted::parse(format!("{name}: {e}")),
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("command threads do not panic")).collect()
            })
        }
    };
    let mut out = Outcome::default();
    for r in results {
        out.code = out.code.max(r.code);
        if let Some(v) = r.value {
            out.stdout.push_str(&match cli.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&v).expect("values serialize")),
                Format::Text => render::text(&v),
            });
        }
        if let Some(e) = r.error {
            out.stderr.push_str(&e);
            out.stderr.push('\n');
        }
    }
    out
}

type Input = (String, Result<String, String>);

fn read_inputs(files: &[PathBuf], stdin: &mut dyn Read) -> Result<Vec<Input>, String> {
    if files.is_empty() {
        let mut text = String::new();
        stdin.read_to_string(&mut text).map_err(|e| format!("stdin: {e}"))?;
        return Ok(vec![("-".into(), Ok(text))]);
    }
    Ok(files
        .iter()
        .map(|p| (p.display().to_string(), std::fs::read_to_string(p).map_err(|e| e.to_string())))
        .collect())
}

fn file_command(cli: &Cli, ov: &Overrides, name: &str, text: &str) -> Emitted {
    let require_reality = !matches!(cli.command, Command::Verify { .. });
    let m = match document::parse_with(text, ov, require_reality) {
        Ok(m) => m,
        Err(e) => return Emitted::parse(format!("{name}: {e}")),
    };
    let opts = ClassifyOptions { sample_points: cli.sample_points };
    match &cli.command {
        Command::Classify { .. } => classify_command(name, &m, &opts),
        Command::Normalize { .. } => normalize_command(name, &m, &opts, cli.tag),
        Command::Frame { .. } => frame_command(name, &m, &opts),
        Command::Verify { .. } => verify_command(name, &m, cli.tag),
        Command::Model { .. } => unreachable!("model reads no files"),
    }
}

fn head(command: &str, file: &str) -> serde_json::Map<String, Value> {
    let mut obj = serde_json::Map::new();
    obj.insert("command".into(), json!(command));
    obj.insert("file".into(), json!(file));
    obj
}

fn domain_error(mut obj: serde_json::Map<String, Value>, e: impl std::fmt::Display) -> Emitted {
    obj.insert("error".into(), json!(e.to_string()));
    Emitted::domain(Value::Object(obj))
}

fn report_tol(m: &DefiningEquations) -> f64 {
    match m.mode() {
        Mode::Exact => 0.0,
        Mode::Float { tol } => tol.max(REPORT_FLOAT_TOL),
    }
}

fn classify_command(name: &str, m: &DefiningEquations, opts: &ClassifyOptions) -> Emitted {
    let mut obj = head("classify", name);
    match classify_with(m, opts) {
        Ok(r) => {
            obj.insert("report".into(), render::class_report(&r));
            let v = Value::Object(obj);
            if r.class.is_some() {
                Emitted::ok(v)
            } else {
                Emitted::domain(v)
            }
        }
        Err(e) => domain_error(obj, e),
    }
}

fn normalize_command(name: &str, m: &DefiningEquations, opts: &ClassifyOptions, tag: Option<ClassTag>) -> Emitted {
    let mut obj = head("normalize", name);
    let report = match classify_with(m, opts) {
        Ok(r) => r,
        Err(e) => return domain_error(obj, e),
    };
    obj.insert("classification".into(), render::class_report(&report));
    let Some(tag) = tag.or(report.class) else {
        return not_in_class(obj, &report);
    };
    match normalize(tag, m) {
        Ok(trace) => {
            let nf = assert_normal_form_with_tol(&trace.final_form, tag, report_tol(m));
            obj.insert("trace".into(), render::trace(&trace));
            obj.insert("normal_form".into(), render::equations(&trace.final_form));
            obj.insert("report".into(), render::normal_form(&nf));
            let v = Value::Object(obj);
            if nf.satisfied {
                Emitted::ok(v)
            } else {
                Emitted::domain(v)
            }
        }
        Err(NormalizeError::NotInClass { class, condition }) => {
            obj.insert("class".into(), json!(class.name()));
            obj.insert("condition".into(), render::condition(&condition));
            Emitted::domain(Value::Object(obj))
        }
        Err(e) => domain_error(obj, e),
    }
}

fn not_in_class(mut obj: serde_json::Map<String, Value>, report: &ClassReport) -> Emitted {
    obj.insert("class".into(), Value::Null);
    let failed = report.failed.first().or_else(|| report.samples.iter().flat_map(|s| &s.failed).next());
    obj.insert("condition".into(), failed.map_or(Value::Null, render::condition));
    Emitted::domain(Value::Object(obj))
}

fn frame_command(name: &str, m: &DefiningEquations, opts: &ClassifyOptions) -> Emitted {
    let mut obj = head("frame", name);
    let fields = match standard_fields(m) {
        Ok(f) => f,
        Err(e) => return domain_error(obj, e),
    };
    let all: Vec<TangentFrameField> = fields.iter().map(|(_, f)| f.clone()).collect();
    obj.insert("fields".into(), Value::Array(fields.iter().map(|(s, f)| render::field(s, f)).collect()));
    obj.insert("origin_rank".into(), json!(rank_at_origin(&all)));
    match classify_with(m, opts) {
        Ok(r) => {
            let ranks: Vec<Value> = r.ranks.iter().map(|e| json!({ "fields": e.fields, "rank": e.rank })).collect();
            obj.insert("ranks".into(), Value::Array(ranks));
            obj.insert("class".into(), json!(r.class.map(|t| t.name())));
            Emitted::ok(Value::Object(obj))
        }
        Err(e) => domain_error(obj, e),
    }
}

fn verify_command(name: &str, m: &DefiningEquations, tag: Option<ClassTag>) -> Emitted {
    let mut obj = head("verify", name);
    let real = check_reality(m);
    obj.insert("reality".into(), json!(real));
    let mut ok = real;
    if real {
        match solve_theta(m).and_then(|g| verify_theta_identities(&g)) {
            Ok(residual) => {
                ok &= residual.is_none();
                obj.insert("theta_identities".into(), json!({ "order": m.order(), "first_residual_degree": residual }));
            }
            Err(e) => return domain_error(obj, e),
        }
    }
    if let Some(tag) = tag {
        let nf: NormalFormReport = assert_normal_form_with_tol(m, tag, report_tol(m));
        ok &= nf.satisfied;
        obj.insert("normal_form".into(), render::normal_form(&nf));
    }
    let v = Value::Object(obj);
    if ok {
        Emitted::ok(v)
    } else {
        Emitted::domain(v)
    }
}

fn model_command(cli: &Cli, ov: &Overrides, sign: i32) -> Emitted {
    let Some(tag) = cli.tag else {
        return Emitted::parse("model: --tag is required".into());
    };
    if tag == ClassTag::IV1 && sign.abs() != 1 {
        return Emitted::parse(format!("model: --sign must be 1 or -1, got {sign}"));
    }
    let (n, c) = tag.shape();
    let order = ov.order.or(ov.default_order).unwrap_or_else(|| default_order(n, c));
    if order < 2 {
        return Emitted::parse(format!("model: order {order} is below 2"));
    }
    let m = if tag == ClassTag::IV1 { model_iv1(sign, order) } else { model(tag, order) };
    let m = match ov.mode {
        Some(ModeName::Float) => m.to_mode(Mode::Float { tol: ov.tol.unwrap_or(crforge_core::scalar::DEFAULT_TOL) }),
        _ => m,
    };
    Emitted::ok(render::equations(&m))
}

