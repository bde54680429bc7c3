use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sparsezeros_cli::config::parse_polytope_list;
use sparsezeros_cli::{run, CliError, Command, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "sparsezeros", version, about = "Random sparse polynomial systems: counts, zero distributions, extremal functions")]
struct Cli {
    /// JSON experiment config; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for trial-level parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Root directory for run outputs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated polytope names, e.g. `square,simplex2`.
    #[arg(long, global = true)]
    polytopes: Option<String>,
    /// Comma-separated degrees N.
    #[arg(long, global = true, value_delimiter = ',')]
    ns: Option<Vec<u32>>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Exact mixed volume (JSON on stdout).
    MixedVolume,
    /// Lattice-point counts of dilates.
    LatticePoints,
    /// Coefficient draws only.
    Sample,
    /// Zero counts against the mixed-volume prediction.
    BkVerify,
    /// Point clouds for the trapezoid examples.
    Figures,
    /// Bergman function convergence to the extremal function.
    Bergman,
    /// Amoeba samples of one random polynomial per trial.
    Amoeba,
    /// Concentration of univariate zeros on the unit circle.
    Kac,
    /// Angular statistics of pooled torus zeros.
    Uniformity,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::MixedVolume => Command::MixedVolume,
            Sub::LatticePoints => Command::LatticePoints,
            Sub::Sample => Command::Sample,
            Sub::BkVerify => Command::BkVerify,
            Sub::Figures => Command::Figures,
            Sub::Bergman => Command::Bergman,
            Sub::Amoeba => Command::Amoeba,
            Sub::Kac => Command::Kac,
            Sub::Uniformity => Command::Uniformity,
        }
    }
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides {
        seed: cli.seed,
        out: cli.out,
        polytopes: cli.polytopes.as_deref().map(parse_polytope_list),
        ns: cli.ns,
        trials: cli.trials,
    });
    let outcome = run(cli.command.into(), cfg, cli.threads)?;
    println!("{}", serde_json::to_string(&outcome.summary).expect("summary serializes"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sparsezeros: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
