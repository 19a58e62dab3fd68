//! `hsx`: trace tensors and identity checks for endomorphism tuples.

mod input;
mod run;
mod suite;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Exit statuses shared by every command.
pub mod exit {
    pub const OK: u8 = 0;
    pub const NONZERO_RESIDUAL: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const DIMENSION: u8 = 3;
    pub const ORACLE_MISMATCH: u8 = 4;
    pub const BUDGET: u8 = 5;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rational,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Table,
}

#[derive(Parser, Debug)]
#[command(name = "hsx", version, about = "Trace tensors and generalized Cayley-Hamilton checks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON input document, or `-` for stdin. A seeded random document is used when absent.
    #[arg(long, global = true, value_name = "FILE|-")]
    input: Option<String>,

    /// Scalar field; overrides the document's `mode`.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,

    /// Relative tolerance for float mode.
    #[arg(long, global = true, default_value_t = hs_exterior::identities::DEFAULT_TOLERANCE)]
    tol: f64,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Dimension for generated inputs.
    #[arg(long, global = true)]
    n: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print every trace τ_i with |i| ≤ n.
    Traces {
        /// Cross-check each entry against the determinant-sum oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Evaluate one identity: thm48, star2, star3, eq17, ibp, conjugacy, trsq, classical-ch.
    Verify { identity: String },
    /// Run every applicable check on seeded random inputs.
    RandomSuite {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Wall-clock budget in seconds.
        #[arg(long, default_value_t = 300.0)]
        time_budget: f64,
        /// Peak resident memory budget in MiB.
        #[arg(long, default_value_t = 2048)]
        memory_budget_mb: u64,
    },
}

/// What a command prints and how it exits.
pub struct Outcome {
    pub stdout: String,
    pub stderr: Option<String>,
    pub code: u8,
}

/// A failure that prevents a command from producing a result.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: exit::PARSE,
            message: message.into(),
        }
    }

    pub fn dimension(message: impl Into<String>) -> Self {
        Failure {
            code: exit::DIMENSION,
            message: message.into(),
        }
    }
}

impl From<hs_exterior::Error> for Failure {
    fn from(e: hs_exterior::Error) -> Self {
        use hs_exterior::Error as E;
        let code = match e {
            E::DimensionMismatch { .. }
            | E::UnsupportedDimension(_)
            | E::BladeIndex { .. }
            | E::NotSquare { .. }
            | E::RaggedMatrix
            | E::TupleLength { .. }
            | E::EmptyTuple
            | E::MultiIndexLength { .. }
            | E::TruncationMismatch { .. }
            | E::TensorMismatch(_) => exit::DIMENSION,
            E::DivisionByZero
            | E::ParseScalar { .. }
            | E::UnsortedBlade
            | E::Singular
            | E::NotSquareFree(_)
            | E::NonInvertibleConstant => exit::PARSE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Traces { oracle } => run::traces(&cli, *oracle),
        Command::Verify { identity } => run::verify(&cli, identity),
        Command::RandomSuite {
            trials,
            time_budget,
            memory_budget_mb,
        } => suite::random_suite(
            &cli,
            &suite::Budget {
                trials: *trials,
                seconds: *time_budget,
                memory_mb: *memory_budget_mb,
            },
        ),
    };
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            if let Some(err) = out.stderr {
                eprint!("{err}");
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("hsx: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
