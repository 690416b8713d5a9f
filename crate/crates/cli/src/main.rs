mod config;
mod failure;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Kind;
use run::Run;

#[derive(Parser)]
#[command(name = "dacd", version, about = "Simulator and property harness for degenerate anisotropic convection-diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and export snapshots.
    Solve(Common),
    /// Solve and check the maximum principle, conservation and, with a
    /// perturbation, comparison and L1 contraction.
    Properties(Common),
    /// Check the nondegeneracy condition of a model.
    GnCheck(Common),
    /// Decay to the mean on a torus.
    PeriodicDecay(Common),
    /// Bracket far-field data between periodic solutions.
    Sandwich(Common),
    /// Burgers run from the block data that does not decay.
    Example1(Common),
    /// Extremal solutions by far-field truncation.
    Extremal(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized inputs; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Solve(a) => (Kind::Solve, a),
        Command::Properties(a) => (Kind::Properties, a),
        Command::GnCheck(a) => (Kind::GnCheck, a),
        Command::PeriodicDecay(a) => (Kind::PeriodicDecay, a),
        Command::Sandwich(a) => (Kind::Sandwich, a),
        Command::Example1(a) => (Kind::Example1, a),
        Command::Extremal(a) => (Kind::Extremal, a),
    };
    let result = Run::new(kind, &args.config, args.out, args.seed).and_then(|mut run| {
        let outcome = run.execute()?;
        Ok((run.out_dir().to_path_buf(), outcome))
    });
    match result {
        Ok((out, outcome)) => {
            if !args.quiet {
                for r in &outcome.reports.reports {
                    println!("{} {} slack={:e}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.slack);
                }
                for n in &outcome.reports.notes {
                    println!("note: {n}");
                }
                println!("{} -> {}", kind.name(), out.display());
            }
            ExitCode::from(if outcome.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("dacd {}: {e}", kind.name());
            ExitCode::from(e.exit_code())
        }
    }
}
