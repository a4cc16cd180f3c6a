mod suites;
mod target;
mod tools;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use npk_core::catalog;
use npk_core::curvature::point_to_json;
use npk_core::homogeneous::HomogeneousPoint;
use npk_core::scalar::{Backend, Rational};
use npk_core::threeform::ThreeFormFile;
use serde_json::json;

use suites::{Outcome, Suite};

const DEFAULT_SEED: u64 = 0x5eed;

const EXIT_LOAD: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_IDENTITY: u8 = 4;

#[derive(Parser)]
#[command(name = "npk", version, about = "Identity checks for nearly pseudo-Kähler structures")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand)]
enum Command {
    /// List the builtin models.
    List {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the curvature point of a model as a curvature-point file.
    Export {
        #[arg(long)]
        target: String,
    },
    /// Normal form or r-spectrum of a three-form file.
    Threeform {
        #[arg(value_enum)]
        tool: Tool,
        file: PathBuf,
        #[arg(long, default_value_t = 1e-10, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Builtin model id or a model, curvature-point or three-form file.
    #[arg(long)]
    target: Option<String>,
    #[arg(long = "suite", value_enum, default_value = "all")]
    suites: Vec<Suite>,
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    tol: f64,
    /// Seed for the sampled checks.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    #[value(alias = "json")]
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Tool {
    NormalForm,
    Spectrum,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn print_outcome(o: &Outcome, args: &RunArgs) {
    match args.out.format {
        Format::Text => {
            print!("{}", o.report.to_text());
            for (s, e) in &o.preconditions {
                println!("PRECONDITION {s}: {e}");
            }
        }
        Format::Structured => {
            let mut v = serde_json::to_value(&o.report).expect("reports serialize");
            v["suites"] = json!(o.suites.iter().map(|s| s.to_string()).collect::<Vec<_>>());
            v["tol"] = json!(args.tol);
            v["seed"] = json!(args.seed);
            v["preconditions"] =
                json!(o.preconditions.iter().map(|(s, e)| json!({"suite": s.to_string(), "error": e})).collect::<Vec<_>>());
            println!("{}", pretty(&v));
        }
    }
}

fn run(args: &RunArgs) -> ExitCode {
    let Some(label) = &args.target else {
        return fail(EXIT_LOAD, "--target is required");
    };
    let target = match target::load(label) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_LOAD, e),
    };
    let outcome = match Backend::from(args.out.backend) {
        Backend::Exact => suites::run::<Rational>(&target, label, &args.suites, args.tol, args.seed),
        Backend::Float => suites::run::<f64>(&target, label, &args.suites, args.tol, args.seed),
    };
    let o = match outcome {
        Ok(o) => o,
        Err(e) => return fail(EXIT_LOAD, e),
    };
    print_outcome(&o, args);
    if !o.preconditions.is_empty() {
        ExitCode::from(EXIT_PRECONDITION)
    } else if !o.report.all_pass() {
        ExitCode::from(EXIT_IDENTITY)
    } else {
        ExitCode::SUCCESS
    }
}

fn threeform(tool: Tool, file: &PathBuf, tol: f64, out: &Output) -> ExitCode {
    let f = match ThreeFormFile::load(file).and_then(|f| f.to_form::<Rational>().map(|_| f)) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_LOAD, e),
    };
    let s = match tools::summarize(&f, out.backend.into(), tol, matches!(tool, Tool::NormalForm)) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_PRECONDITION, e),
    };
    match out.format {
        Format::Text => print!("{}", s.to_text(matches!(tool, Tool::Spectrum))),
        Format::Structured => {
            let mut v = s.to_json();
            v["version"] = json!(npk_core::report::REPORT_VERSION);
            v["file"] = json!(file.display().to_string());
            println!("{}", pretty(&v));
        }
    }
    if s.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_IDENTITY)
    }
}

fn list(format: Format) -> ExitCode {
    let entries = match catalog::list() {
        Ok(l) => l,
        Err(e) => return fail(EXIT_LOAD, e),
    };
    match format {
        Format::Text => {
            for e in &entries {
                println!("{:<26} dim {:>2}  {}", e.id, e.dim, e.description);
            }
        }
        Format::Structured => println!("{}", pretty(&serde_json::to_value(&entries).expect("catalog serializes"))),
    }
    ExitCode::SUCCESS
}

fn export(label: &str) -> ExitCode {
    let point = match target::load(label) {
        Ok(target::Target::Model(e)) => HomogeneousPoint::<Rational>::new(&e.model).map(|hp| hp.point),
        Ok(target::Target::Point(p)) => Ok(p),
        Ok(t) => return fail(EXIT_PRECONDITION, format!("a {} has no curvature point", t.kind())),
        Err(e) => return fail(EXIT_LOAD, e),
    };
    match point {
        Ok(p) => {
            println!("{}", pretty(&point_to_json(&p)));
            ExitCode::SUCCESS
        }
        Err(e) => fail(EXIT_LOAD, e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Some(Command::List { format }) => list(*format),
        Some(Command::Export { target }) => export(target),
        Some(Command::Threeform { tool, file, tol, out }) => threeform(*tool, file, *tol, out),
        None => run(&cli.run),
    }
}
