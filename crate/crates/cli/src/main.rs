mod commands;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chabauty_lab::Budget;
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "chabauty-lab", version, about = "Experiments on spaces of subgroups of free groups and Z^d")]
pub struct Cli {
    /// Truncation radius (each command has its own default).
    #[arg(long, global = true)]
    pub radius: Option<usize>,
    /// Largest graph that may be built.
    #[arg(long, global = true)]
    pub budget_vertices: Option<usize>,
    /// Longest word tried by searches.
    #[arg(long, global = true)]
    pub budget_length: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for report files; without it the main report goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stallings graph of a subgroup of F_r, with membership queries.
    Stallings {
        spec: PathBuf,
        /// Words to test for membership.
        #[arg(long = "contains", value_name = "WORD")]
        words: Vec<String>,
        /// Second subgroup to intersect and join with.
        #[arg(long)]
        with: Option<PathBuf>,
        /// Also report the finite-index completion agreeing on the given radius.
        #[arg(long)]
        complete: bool,
    },
    /// Chabauty distance between two subgroups.
    Chabauty { first: PathBuf, second: PathBuf },
    /// Subgroups of Z^d: enumeration by index or witness chains.
    Zd {
        /// Enumerate all subgroups of Z^D of index at most N.
        #[arg(long, num_args = 2, value_names = ["D", "N"])]
        enumerate: Option<Vec<u64>>,
        /// Subgroup whose witness chain is built.
        spec: Option<PathBuf>,
        /// Chain depth; defaults to the corank.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Schreier graph of a subgroup of F_r.
    Schreier {
        spec: PathBuf,
        /// Overgroup K ⊇ H whose fibers are measured.
        #[arg(long)]
        fibers: Option<PathBuf>,
        /// Run the quasi-isometry-to-a-line screen.
        #[arg(long)]
        line: bool,
    },
    /// Sequence converging to a subgroup, with its convergence table.
    Witness { spec: PathBuf },
    /// Common-conjugator transitivity move on a task file.
    Transit { task: PathBuf },
    /// Følner transfer demo on F_2 / ker(a ↦ 1, b ↦ 0).
    Folner {
        /// Demo index i; all of 2..=5 when omitted.
        #[arg(long)]
        index: Option<u64>,
    },
    /// Runs the acceptance battery and prints a pass/fail matrix.
    Suite {
        /// Criteria to run (1..=10); all when omitted.
        #[arg(long = "only", value_name = "ID")]
        only: Vec<u8>,
    },
    /// Markdown summary of a convergence CSV.
    Report { csv: PathBuf },
}

#[derive(Debug)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { kind: "input".into(), message: message.into(), exit_code: 2 }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError { kind: "io".into(), message: format!("{}: {e}", path.display()), exit_code: 2 }
    }

    pub fn verified_failure(kind: &str, message: impl Into<String>) -> Self {
        CliError { kind: kind.into(), message: message.into(), exit_code: 4 }
    }
}

impl From<chabauty_lab::Error> for CliError {
    fn from(e: chabauty_lab::Error) -> Self {
        CliError { kind: e.kind().into(), message: e.to_string(), exit_code: e.exit_code() }
    }
}

impl Cli {
    pub fn budget(&self) -> Result<Budget, CliError> {
        let mut b = Budget::from_env()?;
        if let Some(v) = self.budget_vertices {
            b.max_vertices = v;
        }
        if let Some(l) = self.budget_length {
            b.max_word_length = l;
        }
        Ok(b)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", output::error_object(&e.kind, &e.message, e.exit_code));
            ExitCode::from(e.exit_code as u8)
        }
    }
}
