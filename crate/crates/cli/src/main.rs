use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rnd_cli::output::resolve_output;
use rnd_cli::{run, verify, CliError, Command, RunConfig, RunOptions};

/// Noisy Rydberg dressing: interaction profiles, condensate dynamics and
/// soliton stability from TOML run files.
#[derive(Parser)]
#[command(name = "rnd", version)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (TOML).
    config: PathBuf,
    /// Output directory; relative paths honour RND_OUTPUT_ROOT.
    out: PathBuf,
    /// Continue from the checkpoint in the output directory.
    #[arg(long)]
    resume: bool,
    /// Stop at the first checkpoint at or beyond this step.
    #[arg(long, value_name = "STEP")]
    halt_after: Option<usize>,
}

#[derive(Subcommand)]
enum Sub {
    /// U(r) and Γ(r) with extracted features.
    Profile(RunArgs),
    /// Features along one parameter axis.
    Sweep(RunArgs),
    /// Real-time condensate evolution.
    GpeEvolve(RunArgs),
    /// Imaginary-time ground state and structure factor.
    GpeGround(RunArgs),
    /// Bogoliubov spectrum and roton bands.
    Bogoliubov(RunArgs),
    /// Soliton and molecule energy landscapes with the atom-number window.
    Stability(RunArgs),
    /// Re-hash the files of a finished run against its manifest.
    Verify {
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rnd: {e}");
            e.to_exit()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (command, args) = match cli.command {
        Sub::Verify { out } => {
            let m = verify(&resolve_output(&out))?;
            println!("{} files verified", m.files.len());
            return Ok(());
        }
        Sub::Profile(a) => (Command::Profile, a),
        Sub::Sweep(a) => (Command::Sweep, a),
        Sub::GpeEvolve(a) => (Command::GpeEvolve, a),
        Sub::GpeGround(a) => (Command::GpeGround, a),
        Sub::Bogoliubov(a) => (Command::Bogoliubov, a),
        Sub::Stability(a) => (Command::Stability, a),
    };
    let config = RunConfig::load(&args.config)?;
    let options = RunOptions { threads: cli.threads, resume: args.resume, halt_after: args.halt_after };
    let out = resolve_output(&args.out);
    let outcome = run(command, &config, &out, &options)?;
    println!("{}: {} ({})", command.name(), outcome.summary, out.display());
    Ok(())
}
