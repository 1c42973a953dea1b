//! `hteo`: classify points of the period domain, print threshold tables, and
//! run the verification suites.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hteo::dieudonne::SearchMode;
use hteo::expr::parse_tau;
use hteo::lemmas::{self, Report};
use hteo::localfield::{parse_descriptor, LocalField};
use hteo::strata::classify;
use hteo::suites::{self, DEFAULT_SEED, SUITES};
use hteo::{Error, Val};

#[derive(Parser)]
#[command(name = "hteo", version, about = "Ekedahl-Oort strata of the quaternionic Hodge-Tate period domain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a point and print its stratum report as JSON.
    Classify {
        #[arg(long)]
        p: u64,
        /// Field descriptor such as "pi^4=p;u=2" or "Qp(3;u=2;pi^4=p;N=8)".
        #[arg(long, default_value = "pi^1=p;u=2")]
        field: String,
        /// Point expression, e.g. "pi", "g*pi + 2*pi^3 + O(pi^9)", "inf".
        #[arg(long)]
        tau: String,
    },
    /// Run a verification suite and print its JSON report.
    Verify(VerifyArgs),
    /// Print the stratum label for each valuation.
    Table {
        #[arg(long)]
        p: u64,
        /// Comma-separated valuations: integers, fractions, "inf", "-inf".
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        ords: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: wilson, sharp, p2corner, valuation-lemmas, iso-separation,
    /// superspecial-equiv, period-product.
    suite: String,
    #[arg(long, default_value_t = 3)]
    p: u64,
    /// Residue degree for the module suites.
    #[arg(long, default_value_t = 2)]
    m: u32,
    /// Cyclotomic level for the sharp-reduction suite.
    #[arg(long, default_value_t = 1)]
    l: u32,
    /// Working precision in p-adic digits.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Structured,
}

enum Failure {
    Lib(Error),
    UnknownSuite(String),
    Assertions(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Assertions(_) => 1,
        Failure::UnknownSuite(_) => 3,
        Failure::Lib(e) => match e {
            Error::PrecisionLoss(_)
            | Error::DivisionByUncertifiedZero
            | Error::TruncationLoss(_)
            | Error::NoConvergence(_) => 2,
            Error::Parse(_)
            | Error::NonPrime(_)
            | Error::UnsupportedTower(_)
            | Error::PrecisionTooLarge { .. }
            | Error::Precondition(_)
            | Error::ParentMismatch => 3,
            _ => 1,
        },
    }
}

/// `EO_PRECISION`, when set, replaces the default working precision.
fn env_precision() -> Result<Option<u32>, Failure> {
    match std::env::var("EO_PRECISION") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Lib(Error::Parse(format!("EO_PRECISION={v:?} is not a number")))),
        Err(_) => Ok(None),
    }
}

fn field_for(p: u64, descriptor: &str) -> Result<LocalField, Failure> {
    let d = descriptor.trim();
    if d.starts_with("Qp(") {
        let f: LocalField = d.parse()?;
        if f.p() != p {
            return Err(Error::Parse(format!("descriptor prime {} differs from --p {p}", f.p())).into());
        }
        return Ok(f);
    }
    Ok(parse_descriptor(d, p, env_precision()?)?)
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_json<T: serde::Serialize>(value: &T) {
    emit(&serde_json::to_string_pretty(value).expect("serializable"));
}

fn finish(report: Report) -> Result<(), Failure> {
    print_json(&report);
    match report.failures() {
        0 => Ok(()),
        n => Err(Failure::Assertions(n)),
    }
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let n = match a.n {
        Some(n) => Some(n),
        None => env_precision()?,
    };
    let report = match a.suite.as_str() {
        "wilson" => lemmas::check_wilson_units(a.p, n.unwrap_or(6))?,
        "sharp" => lemmas::check_sharp_reduction(a.p, a.l, n.unwrap_or_else(|| lemmas::default_sharp_precision(a.p, a.l)))?,
        "p2corner" => lemmas::check_p2_corner()?,
        "valuation-lemmas" => {
            suites::valuation_lemmas(a.p, a.t0.as_deref(), a.t1.as_deref(), a.t.as_deref(), a.s.as_deref())?
        }
        "iso-separation" => {
            let mode = a.mode.map(|m| match m {
                Mode::Exhaustive => SearchMode::exhaustive(),
                Mode::Structured => SearchMode::StructuredForm,
            });
            suites::iso_separation(a.p, a.m, mode)?
        }
        "superspecial-equiv" => suites::superspecial_equiv(a.p, a.m, a.samples.unwrap_or(1000), a.seed)?,
        "period-product" => suites::period_product(a.p, a.samples.unwrap_or(20), a.seed)?,
        other => return Err(Failure::UnknownSuite(other.to_string())),
    };
    finish(report)
}

fn table(p: u64, ords: &str, format: Format) -> Result<(), Failure> {
    if !hteo::resfield::is_prime(p) {
        return Err(Error::NonPrime(p).into());
    }
    let vals = ords
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse::<Val>)
        .collect::<Result<Vec<_>, _>>()?;
    let rows = suites::table_rows(p, &vals);
    match format {
        Format::Json => print_json(&serde_json::json!({ "p": p, "rows": rows })),
        Format::Text => {
            let mut out = format!("{:<10} {:<12} position", "ord", "label");
            for r in rows {
                out.push_str(&format!("\n{:<10} {:<12} {}", r.ord, r.label, r.position));
            }
            emit(&out);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify { p, field, tau } => {
            let f = field_for(p, &field)?;
            let point = parse_tau(&f, &tau)?;
            print_json(&classify(&point)?);
            Ok(())
        }
        Command::Verify(a) => verify(a),
        Command::Table { p, ords, format } => table(p, &ords, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::UnknownSuite(s) => {
                    eprintln!("error: unknown suite {s:?}; expected one of {}", SUITES.join(", "))
                }
                Failure::Assertions(n) => eprintln!("{n} assertion(s) failed"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
