use clap::{Parser, Subcommand};
use geophase_cli::{run, Experiment, Overrides};

/// Simulate geometric and dynamical phase gates under an Ohmic bath.
#[derive(Parser)]
#[command(name = "geophase", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fidelity of the single-qubit geometric gate over an (alpha, phi) grid
    Fig2Grid(Overrides),
    /// Fidelity of the single-qubit dynamical gate against alpha per temperature
    Fig3DynFidelity(Overrides),
    /// Geometric and dynamical fidelities on one (alpha, phi) grid
    Fig4Contour(Overrides),
    /// Two-qubit fidelities averaged over random inputs against phi
    Fig6AvgFidelity(Overrides),
    /// Concurrence along two-qubit gate trajectories
    Fig7Concurrence(Overrides),
    /// One gate, one input, one bath: the full time trace
    SingleRun(Overrides),
}

fn main() {
    let cli = Cli::parse();
    let (experiment, flags) = match cli.command {
        Command::Fig2Grid(o) => (Experiment::Fig2Grid, o),
        Command::Fig3DynFidelity(o) => (Experiment::Fig3DynFidelity, o),
        Command::Fig4Contour(o) => (Experiment::Fig4Contour, o),
        Command::Fig6AvgFidelity(o) => (Experiment::Fig6AvgFidelity, o),
        Command::Fig7Concurrence(o) => (Experiment::Fig7Concurrence, o),
        Command::SingleRun(o) => (Experiment::SingleRun, o),
    };
    match run(experiment, flags) {
        Ok(summary) => {
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!("wrote {} ({} rows) and {}", summary.csv.display(), summary.rows, summary.sidecar.display());
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
