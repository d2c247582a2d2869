//! `weakhopf`: command-line front end for the weakhopf library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weakhopf::algebra::DEFAULT_SEED;
use weakhopf::linalg::Tolerance;

use weakhopf_cli::commands::{self, CliError, Ctx};

#[derive(Parser, Debug)]
#[command(name = "weakhopf", version, about = "Finite-dimensional C*-weak Hopf algebras")]
struct Cli {
    /// Relative tolerance for every numerical check.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Output path for written documents.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    /// Seed for the randomized spectral splittings.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Runs every check that applies to a document of any kind.
    Verify { path: PathBuf },
    /// Derived data of a weak Hopf algebra.
    Compute {
        #[command(subcommand)]
        what: Compute,
    },
    /// Builds the groupoid algebra of a groupoid document.
    Groupoid { path: PathBuf },
    /// Reconstructs the symmetry of a depth-2 inclusion; `-o P` writes
    /// `P.wha.json` and `P.action.json`.
    Reconstruct { path: PathBuf },
    /// Prints a built-in document; lists the names when none is given.
    Example { name: Option<String> },
}

#[derive(Subcommand, Debug)]
enum Compute {
    /// Haar integral and its properties.
    Haar { path: PathBuf },
    /// The dual weak Hopf algebra, as a document.
    Dual { path: PathBuf },
    /// Canonical grouplike element and the modular/Kac checks.
    Grouplike { path: PathBuf },
    /// Sectors and fusion rules of the representation category.
    Fusion { path: PathBuf },
    /// Bases of the counital subalgebras.
    Subalgebras { path: PathBuf },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let tol = Tolerance::new(cli.tol, Tolerance::default().eps_abs.min(cli.tol))
        .map_err(|e| CliError::Usage(format!("--tol: {e}")))?;
    let ctx = Ctx { tol, seed: cli.seed, json: cli.json, out: cli.output };
    match &cli.command {
        Command::Verify { path } => commands::verify(&ctx, path),
        Command::Compute { what } => match what {
            Compute::Haar { path } => commands::haar(&ctx, path),
            Compute::Dual { path } => commands::dual(&ctx, path),
            Compute::Grouplike { path } => commands::grouplike(&ctx, path),
            Compute::Fusion { path } => commands::fusion(&ctx, path),
            Compute::Subalgebras { path } => commands::subalgebras(&ctx, path),
        },
        Command::Groupoid { path } => commands::groupoid(&ctx, path),
        Command::Reconstruct { path } => commands::reconstruct_cmd(&ctx, path),
        Command::Example { name } => commands::example(&ctx, name.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
