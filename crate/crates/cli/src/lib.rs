//! Command-line front end: every command reads flags and JSON files and
//! prints one line of JSON.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input or failed
//! precondition (with `{"error": {"kind", "detail"}}` on stdout), 3 a weight
//! comparison left undecided at the precision cap.

mod commands;
mod input;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde_json::{json, Value};

use submeasures::talagrand::DEFAULT_PRECISION_CAP;
use submeasures::Error;

#[derive(Debug, Parser)]
#[command(name = "submeasures", version, about = "Exact computations with submeasures")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Worker threads for the cover search (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Bit cap for interval comparisons of weights.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION_CAP)]
    pub precision_cap: u64,
    /// Seed for randomised drivers.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ψ of the whole space or of a cylinder [s].
    #[command(group(ArgGroup::new("what").required(true).args(["total", "prefix"])))]
    PsiEval {
        #[arg(long, default_value = "talagrand")]
        schedule: String,
        #[arg(long, conflicts_with = "prefix")]
        total: bool,
        /// Partial assignment such as `1=2,3=1`.
        #[arg(long)]
        prefix: Option<String>,
    },
    /// Least-weight cover of a target by D-sets with I ⊆ [depth] and level ≤ kmax.
    CoverSearch {
        #[arg(long, default_value = "talagrand")]
        schedule: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        kmax: usize,
        /// `empty`, `full`, a prefix `1=2,3=1`, or `leaves:0,5,7` at the given depth.
        #[arg(long)]
        target: String,
    },
    /// Checks the four weight inequalities level by level.
    CheckInequalities {
        #[arg(long, default_value = "talagrand")]
        schedule: String,
        #[arg(long)]
        kmax: usize,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Validates a submeasure table.
    CheckSubmeasure {
        #[arg(long)]
        input: String,
    },
    /// Measure test, strict positivity, pathology gap and n-pathology.
    Pathology {
        #[arg(long)]
        input: String,
    },
    /// Least value among N disjoint nonzero elements, maximised over antichains.
    UniformExhaustivity {
        #[arg(long)]
        input: String,
        #[arg(long)]
        n: usize,
    },
    /// Glues submeasures on the blocks of a partition.
    Amalgamate {
        #[arg(long)]
        input: String,
    },
    /// Splits every atom into n pieces, giving n disjoint elements of value 1.
    RefinePathological {
        #[arg(long)]
        input: String,
        #[arg(long)]
        n: usize,
    },
    /// Decides (m, n, ψ)-thinness of a clopen set.
    ThinCheck {
        #[arg(long, default_value = "talagrand")]
        schedule: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        kmax: usize,
        /// Same syntax as the cover-search target.
        #[arg(long)]
        set: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Signed measure associated with a functional or a chain of algebras.
    Transform {
        #[arg(long, required_unless_present_any = ["unbounded", "random"])]
        input: Option<String>,
        /// The half-everywhere example on n generators.
        #[arg(long, conflicts_with_all = ["input", "random"])]
        unbounded: Option<usize>,
        /// Round trip on a random functional with this many atoms (uses --seed).
        #[arg(long, conflicts_with = "input")]
        random: Option<usize>,
    },
    /// The intersection matrix of the nonempty subsets of [n].
    Incidence {
        #[arg(long)]
        n: usize,
    },
    /// μ = λ ∘ f for a union-preserving f.
    Pullback {
        #[arg(long)]
        input: String,
    },
    /// Sizes of T₁..T_depth and the maps between points and generator sets.
    Levels {
        /// Comma-separated |Xᵢ|.
        #[arg(long)]
        branching: String,
        #[arg(long)]
        depth: usize,
        /// A point t of X^(n), as values `1,2`: prints 𝔣(t).
        #[arg(long)]
        point: Option<String>,
        /// A point f of T^(n), as values `2,5`: prints its generators.
        #[arg(long)]
        generators: Option<String>,
        /// Points of X^(n) separated by `;`: prints an f they generate exactly.
        #[arg(long)]
        generated_by: Option<String>,
    },
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A failure with its exit code.
#[derive(Debug)]
pub(crate) enum Failure {
    Lib(Error),
    Io(String),
    /// A result to print alongside exit code 3.
    Undecided(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

pub(crate) type CmdResult = std::result::Result<Value, Failure>;

fn error_json(kind: &str, detail: &str) -> String {
    json!({"error": {"kind": kind, "detail": detail}}).to_string() + "\n"
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output { code, stdout: text, stderr: String::new() }
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = match cli.global.threads {
        Some(0) => return Output { code: 1, stdout: String::new(), stderr: "--threads must be positive\n".into() },
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli)),
            Err(e) => Err(Failure::Io(e.to_string())),
        },
        None => commands::dispatch(&cli),
    };
    finish(result)
}

fn finish(result: CmdResult) -> Output {
    match result {
        Ok(v) => Output { code: 0, stdout: v.to_string() + "\n", stderr: String::new() },
        Err(Failure::Undecided(v)) => Output { code: 3, stdout: v.to_string() + "\n", stderr: String::new() },
        Err(Failure::Lib(e)) => {
            let code = if matches!(e, Error::Undecided { .. }) { 3 } else { 2 };
            Output { code, stdout: error_json(e.kind(), &e.to_string()), stderr: String::new() }
        }
        Err(Failure::Io(detail)) => Output { code: 2, stdout: error_json("io", &detail), stderr: String::new() },
    }
}
