//! Argument parsing, validation and document rendering for the `kohnen` binary.
//!
//! Exit codes: 0 success, 1 verification failure, 2 bad arguments, 3 computation error.

mod commands;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{eisenstein_expansion, field_from_disc};

pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_COMPUTE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "kohnen", version, about = "Half-integral weight Eisenstein series over Q and real quadratic fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Basic invariants of the field.
    Field(FieldArgs),
    /// Class group, representatives and characters.
    Classgroup(FieldArgs),
    /// q-expansion of the plus-space Eisenstein series of weight kappa + 1/2.
    Eisenstein(SeriesArgs),
    /// Cohen's series H_r over Q.
    Cohen(CohenArgs),
    /// Exact value L(1 - kappa, chi), optionally with the numeric check.
    Lvalue(LvalueArgs),
    /// T+(alpha^2) applied to an Eisenstein series, with an eigenvalue test.
    Hecke(HeckeArgs),
    /// Finite-sum checks of the local identities over Q_p.
    Local(LocalArgs),
    /// Run a verification suite and print its pass/fail matrix.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the document here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Field discriminant: 1 (or 0) for Q, otherwise a positive fundamental discriminant.
    #[arg(long = "field", allow_negative_numbers = true)]
    pub disc: i64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct SeriesArgs {
    #[arg(long = "field", allow_negative_numbers = true)]
    pub disc: i64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=40))]
    pub kappa: u32,
    /// Class character index, 0 is trivial.
    #[arg(long, default_value_t = 0)]
    pub chi: usize,
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=5000))]
    pub trace_bound: i64,
    /// Integer multiplier applied when printing.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub scale: i64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct CohenArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=40))]
    pub r: u32,
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=100_000))]
    pub n_max: u64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub scale: i64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct LvalueArgs {
    #[arg(long = "field", allow_negative_numbers = true)]
    pub disc: i64,
    /// The value is taken at s = 1 - kappa.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=80))]
    pub kappa: u32,
    #[arg(long, default_value_t = 0)]
    pub chi: usize,
    /// Multiply by the quadratic character of F(sqrt(xi))/F, xi written as "a+b√D".
    #[arg(long, allow_hyphen_values = true)]
    pub twist: Option<String>,
    /// Also evaluate the numeric backend with this many Dirichlet series terms.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000_000))]
    pub numeric_terms: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct HeckeArgs {
    #[arg(long = "field", allow_negative_numbers = true)]
    pub disc: i64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=40))]
    pub kappa: u32,
    #[arg(long, default_value_t = 0)]
    pub chi: usize,
    /// Generator of a prime ideal, e.g. "3-2√10".
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=200))]
    pub trace_bound: i64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub scale: i64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct LocalArgs {
    /// Seed for the random samples.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// The worked example over Q(sqrt 10) and the accompanying consistency checks.
    PaperExample,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Run only these criteria (comma separated numbers).
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u8).range(1..=11))]
    pub only: Vec<u8>,
    #[command(flatten)]
    pub common: Common,
}

/// A rendered document plus the exit code to report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub text: String,
}

/// Single-line failure reason with its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(m: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: m.into() }
    }

    pub fn compute(m: impl Into<String>) -> Self {
        Failure { code: EXIT_COMPUTE, message: m.into() }
    }
}

impl From<kohnen::Error> for Failure {
    fn from(e: kohnen::Error) -> Self {
        let code = match e {
            kohnen::Error::InvalidInput(_) => EXIT_USAGE,
            kohnen::Error::Unsupported(_) | kohnen::Error::Computation(_) => EXIT_COMPUTE,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run_args<I, T>(args: I) -> Result<Output, Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Output { code: 0, text: e.to_string() }),
                _ => {
                    let text = e.to_string();
                    let line = text.lines().next().unwrap_or("invalid arguments");
                    Err(Failure::usage(line.trim_start_matches("error: ").to_string()))
                }
            };
        }
    };
    run(&cli.command)
}

/// Run an already parsed command.
pub fn run(cmd: &Command) -> Result<Output, Failure> {
    let (doc, code, common) = match cmd {
        Command::Field(a) => (commands::field(a)?, 0, &a.common),
        Command::Classgroup(a) => (commands::classgroup(a)?, 0, &a.common),
        Command::Eisenstein(a) => (commands::eisenstein(a)?, 0, &a.common),
        Command::Cohen(a) => (commands::cohen(a)?, 0, &a.common),
        Command::Lvalue(a) => (commands::lvalue(a)?, 0, &a.common),
        Command::Hecke(a) => (commands::hecke(a)?, 0, &a.common),
        Command::Local(a) => {
            let (doc, ok) = commands::local(a)?;
            (doc, if ok { 0 } else { EXIT_VERIFY }, &a.common)
        }
        Command::Verify(a) => {
            let (doc, ok) = commands::verify(a)?;
            (doc, if ok { 0 } else { EXIT_VERIFY }, &a.common)
        }
    };
    let text = match common.format {
        Format::Table => doc.table,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&doc.json).expect("JSON values serialize");
            s.push('\n');
            s
        }
    };
    match &common.output {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| Failure::compute(format!("cannot write {}: {e}", path.display())))?;
            Ok(Output { code, text: String::new() })
        }
        None => Ok(Output { code, text }),
    }
}

/// Both renderings of a command result.
pub(crate) struct Document {
    pub table: String,
    pub json: serde_json::Value,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminants() {
        assert!(field_from_disc(1).unwrap().is_rational());
        assert!(field_from_disc(0).unwrap().is_rational());
        assert_eq!(field_from_disc(40).unwrap().d(), 10);
        assert_eq!(field_from_disc(5).unwrap().d(), 5);
        for bad in [10, 20, 4, 9, -3, 12 * 12] {
            assert_eq!(field_from_disc(bad).unwrap_err().code, EXIT_USAGE, "{bad}");
        }
    }

    #[test]
    fn exit_code_mapping() {
        let e = run_args(["kohnen", "cohen", "--r", "1", "--n-max", "3"]).unwrap_err();
        assert_eq!(e.code, EXIT_USAGE);
        assert!(!e.message.contains('\n'));
        let e = run_args(["kohnen", "lvalue", "--field", "40", "--kappa", "1", "--chi", "1", "--numeric-terms", "10"]);
        assert_eq!(e.unwrap_err().code, EXIT_COMPUTE);
        let ok = run_args(["kohnen", "cohen", "--r", "3", "--n-max", "4", "--scale", "-2"]).unwrap();
        assert_eq!(ok.code, 0);
        assert!(ok.text.starts_with("# H_3 (n <= 4, scaled by -2)\n0\t"));
    }
}
