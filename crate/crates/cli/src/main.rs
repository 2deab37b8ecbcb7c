use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use quadfield::qfield::Field;
use quadfield::realnum::{CompareConfig, MAX_PRECISION};
use quadfield::tmetric::TExponent;
use quadfield::Error;

mod commands;
mod render;

/// Exact arithmetic in quadratic fields: heights, ideals, replacement and t-metric measures.
#[derive(Parser, Debug)]
#[command(name = "quadfield", version)]
struct Cli {
    /// Starting precision in bits for interval evaluation.
    #[arg(long, global = true, env = "QUADFIELD_PRECISION", default_value_t = 128,
          value_parser = clap::value_parser!(u32).range(64..=4096))]
    precision: u32,

    /// Two values closer than this are reported as tied.
    #[arg(long, global = true, default_value_t = 1e-12, value_parser = parse_tolerance)]
    tolerance: f64,

    #[arg(long, global = true, value_enum, default_value_t = Output::Table)]
    output: Output,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Table,
    Json,
}

#[derive(Args, Debug, Clone)]
struct FieldArg {
    /// `Q` or a squarefree integer d for Q(sqrt(d)).
    #[arg(short = 'd', long = "field", allow_hyphen_values = true, value_parser = parse_field)]
    field: Field,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Field invariants.
    Field {
        #[command(subcommand)]
        op: FieldOp,
    },
    /// Heights and measures of one element.
    Element {
        #[command(subcommand)]
        op: ElementOp,
    },
    /// Ideal factorization and refinement.
    Ideal {
        #[command(subcommand)]
        op: IdealOp,
    },
    /// Replace a factorization of alpha by one in the field with no larger heights.
    Replace(ReplaceArgs),
    /// The same construction for the lambda-th power.
    PowerReplace {
        /// Exponent; the ideals involved become principal after this power.
        #[arg(long)]
        lambda: u32,
        #[command(flatten)]
        args: ReplaceArgs,
    },
    /// t-metric Mahler measure.
    Tmetric {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Comma-separated exponents: integers, fractions, decimals or inf.
        #[arg(long = "t", value_delimiter = ',', required = true, value_parser = parse_t)]
        t: Vec<TExponent>,
    },
    /// Run randomized property suites.
    Verify {
        /// Suite name, or `all`.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        cases: Option<u64>,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Bound on p*q in the t-metric oracle suite.
        #[arg(long, default_value_t = 10_000)]
        oracle_bound: u64,
    },
}

#[derive(Subcommand, Debug)]
enum FieldOp {
    /// Discriminant, signature, unit group, balancedness and class information.
    Info(FieldArg),
}

#[derive(Subcommand, Debug)]
enum ElementOp {
    /// Absolute logarithmic Weil height.
    Height {
        #[command(flatten)]
        field: FieldArg,
        #[arg(short = 'x', long, allow_hyphen_values = true)]
        element: String,
    },
    /// Logarithmic Mahler measure of the minimal polynomial over Q.
    Measure {
        #[command(flatten)]
        field: FieldArg,
        #[arg(short = 'x', long, allow_hyphen_values = true)]
        element: String,
    },
}

#[derive(Subcommand, Debug)]
enum IdealOp {
    /// Prime factorization, given as `[a, b+c*w]` or `(g1, g2, ...)`.
    Factor {
        #[command(flatten)]
        field: FieldArg,
        #[arg(short = 'i', long)]
        ideal: String,
    },
    /// Split an ideal into parts containing the given ideals.
    Refine {
        #[command(flatten)]
        field: FieldArg,
        #[arg(short = 'i', long)]
        ideal: String,
        /// One ideal per part; repeat the flag.
        #[arg(long = "part", required = true)]
        parts: Vec<String>,
    },
}

#[derive(Args, Debug)]
struct ReplaceArgs {
    #[command(flatten)]
    field: FieldArg,
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    /// Comma-separated factors whose product is alpha.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    factors: Vec<String>,
    /// Read the factors in Q(sqrt(D)) and replace their norms down to the target field.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_field)]
    over: Option<Field>,
}

fn parse_field(s: &str) -> Result<Field, String> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("q") {
        return Ok(Field::Rational);
    }
    let d: i64 = s.parse().map_err(|_| format!("expected Q or an integer, found {s:?}"))?;
    Field::quadratic(d).map_err(|e| e.to_string())
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("tolerance must be a positive number, found {s:?}")),
    }
}

fn parse_t(s: &str) -> Result<TExponent, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Settings shared by every subcommand.
pub struct Ctx {
    pub precision: u32,
    pub compare: CompareConfig,
}

enum Failure {
    Domain(Error),
    /// A verification suite reported failures; the report is still printed.
    Verification(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Indeterminate { .. } => 4,
        Error::Parse { .. } | Error::InvalidArgument(_) => 2,
        _ => 3,
    }
}

fn run(cli: &Cli, ctx: &Ctx) -> Result<Value, Failure> {
    use commands::*;
    Ok(match &cli.command {
        Command::Field { op: FieldOp::Info(f) } => field_info(f.field, ctx)?,
        Command::Element { op: ElementOp::Height { field, element } } => element_height(field.field, element, ctx)?,
        Command::Element { op: ElementOp::Measure { field, element } } => element_measure(field.field, element, ctx)?,
        Command::Ideal { op: IdealOp::Factor { field, ideal } } => ideal_factor(field.field, ideal)?,
        Command::Ideal { op: IdealOp::Refine { field, ideal, parts } } => ideal_refine(field.field, ideal, parts)?,
        Command::Replace(a) => replace(a.field.field, None, &a.alpha, &a.factors, a.over, ctx)?,
        Command::PowerReplace { lambda, args: a } => replace(a.field.field, Some(*lambda), &a.alpha, &a.factors, a.over, ctx)?,
        Command::Tmetric { field, alpha, t } => tmetric(field.field, alpha, t, ctx)?,
        Command::Verify { suite, cases, seed, oracle_bound } => {
            let (report, ok) = verify(suite, *cases, *seed, *oracle_bound, ctx)?;
            if !ok {
                return Err(Failure::Verification(report));
            }
            report
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        precision: cli.precision,
        compare: CompareConfig {
            start_bits: cli.precision,
            max_bits: MAX_PRECISION.max(cli.precision),
            tie_tolerance: cli.tolerance,
        },
    };
    // A closed pipe is not an error worth reporting.
    let emit = |v: &Value| {
        let text = match cli.output {
            Output::Json => serde_json::to_string_pretty(v).expect("serializable") + "\n",
            Output::Table => render::table(v),
        };
        let _ = std::io::stdout().lock().write_all(text.as_bytes());
    };
    match run(&cli, &ctx) {
        Ok(v) => {
            emit(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(v)) => {
            emit(&v);
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            let code = exit_code(&e);
            if cli.output == Output::Json {
                emit(&serde_json::json!({ "error": { "exit_code": code, "message": e.to_string() } }));
            }
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}
