use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qfc_cli::{run_figure, run_poling, run_purify, FigureId, RunContext};
use qfc_core::Error;

/// Design and simulation engine for spectrally purifying single photons
/// during frequency conversion in a periodically poled waveguide.
#[derive(Parser)]
#[command(name = "qfc", version, about)]
struct Cli {
    /// Scenario file describing the design and sweep ranges.
    #[arg(long, global = true, default_value = "scenarios/reference.toml")]
    scenario: PathBuf,

    /// Directory for result files (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for sweeps (default: all cores). Results are
    /// independent of this setting.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the poling period for the configured arrangement.
    Poling,
    /// Emit the data files of one figure family.
    Figure {
        #[arg(long, value_enum)]
        figure: FigureId,
    },
    /// Run the full purification pipeline at the configured operating point.
    Purify {
        /// Append the passive-filter comparison.
        #[arg(long)]
        filter: bool,
        /// Dump the joint spectral distribution as a dense matrix file.
        #[arg(long)]
        export_jsd: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = RunContext::load(&cli.scenario, &cli.out).and_then(|ctx| match cli.command {
        Command::Poling => run_poling(&ctx),
        Command::Figure { figure } => run_figure(&ctx, figure),
        Command::Purify { filter, export_jsd } => run_purify(&ctx, filter, export_jsd),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                // Configuration and usage problems exit 2; computational
                // infeasibility exits 1.
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
