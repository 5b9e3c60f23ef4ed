mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exact computations on pairs of split Albert algebra elements: invariants,
/// orbit classification, reduction to normal forms, and identity checks.
#[derive(Parser, Debug)]
#[command(name = "albert-orbits", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Base field, `q` or `fp:P` with P >= 5 prime. Commands that read a
    /// document take the field from the document; a conflicting value is an
    /// error.
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Random trials per check (`verify`).
    #[arg(long, global = true, default_value_t = 20)]
    pub trials: usize,
    /// Candidates tried by each bounded search during reduction.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub budget: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run identity batteries: octonion, albert, group, pvs, orbits or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Orbit class of a pair (file or `-` for stdin).
    Classify {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Reduce a pair to its normal form and print the full trace.
    Reduce {
        #[arg(default_value = "-")]
        input: String,
    },
    /// F_x, its discriminant, m(x) and det m(x).
    Invariants {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Structure constants of t(x) inside the isotope at m(x).
    Isotope {
        #[arg(default_value = "-")]
        input: String,
    },
    /// A pair whose cubic form is a multiple of a GL2 transform of the given
    /// cubic a v1^3 + b v1^2 v2 + c v1 v2^2 + d v2^3.
    Representative {
        #[arg(long, value_name = "a,b,c,d", allow_hyphen_values = true)]
        cubic: String,
    },
    /// A random semistable pair of the given splitting type.
    Random {
        #[arg(long, value_name = "split|mixed|cubic")]
        class: String,
        /// Number of random generators applied to the representative.
        #[arg(long, default_value_t = 3)]
        length: usize,
    },
    /// Solve the local triality equation for the basis of so(Q).
    LocalTriality {
        /// Only this basis element (0-27).
        #[arg(long)]
        index: Option<usize>,
    },
    /// Dimension of the derivation algebra, by an exact rank over F_p.
    DimDer,
    /// Whether two pairs lie in the same rational orbit.
    SameOrbit { x: String, y: String },
    /// The octonion basis and its structure constants.
    DumpBasis,
    /// The matrix of a named group generator.
    DumpGenerator {
        /// d1 d2 d3 d-diag n12 n13 n21 n23 n31 n32 b1 b2 script-d nu perm rho1 tau1 tau2 xi0 gl2
        name: String,
        /// Parameters, each a comma-separated list of scalars.
        #[arg(allow_hyphen_values = true)]
        args: Vec<String>,
    },
}

pub enum CliError {
    Usage(String),
    Failure(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(commands::Outcome { text, ok }) => {
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout(), "{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
