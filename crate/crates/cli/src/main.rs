use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coherence_forge_cli::{cmd_run, cmd_validate, CliError, Experiment, RunConfig};

#[derive(Parser)]
#[command(name = "coherence-forge", version, about = "Coherence experiments on qubit measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV.
    Run(RunArgs),
    /// Check a POVM JSON file and report its coherence properties.
    Validate {
        path: PathBuf,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment to run; may instead come from --config.
    experiment: Option<Experiment>,
    /// JSON run configuration. Flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "COHERENCE_FORGE_SEED")]
    seed: Option<u64>,
    /// States for scatters, samples per point for Monte Carlo runs.
    #[arg(long)]
    samples: Option<u64>,
    /// Random measurements per state in the two-outcome scatter.
    #[arg(long)]
    povm_samples: Option<u64>,
    /// Random dilations in the trade-off audit.
    #[arg(long)]
    setups: Option<u64>,
    /// Apparatus bases per dilation.
    #[arg(long)]
    bases: Option<usize>,
    /// Largest outcome count in fig3.
    #[arg(long)]
    nmax: Option<usize>,
    /// Measurement rounds in fig4.
    #[arg(long)]
    steps: Option<usize>,
    /// CSV path, `<experiment>.csv` by default.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the full sample counts and the tight decay-rate band.
    #[arg(long)]
    paper_scale: bool,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let mut cfg = match (&self.config, self.experiment) {
            (Some(path), _) => RunConfig::from_json_file(path)?,
            (None, Some(e)) => RunConfig::new(e),
            (None, None) => return Err(CliError::Config("no experiment given".into())),
        };
        if let Some(e) = self.experiment {
            cfg.experiment = e;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.samples = self.samples.or(cfg.samples);
        cfg.povm_samples = self.povm_samples.or(cfg.povm_samples);
        cfg.setups = self.setups.or(cfg.setups);
        cfg.bases = self.bases.or(cfg.bases);
        cfg.nmax = self.nmax.or(cfg.nmax);
        cfg.steps = self.steps.or(cfg.steps);
        cfg.out = self.out.or(cfg.out);
        cfg.paper_scale |= self.paper_scale;
        Ok(cfg)
    }
}

fn run(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Run(args) => {
            let cfg = args.into_config()?;
            let (summary, path) = cmd_run(&cfg)?;
            print!("{summary}");
            println!("csv={}", path.display());
            Ok(summary.passed())
        }
        Command::Validate { path } => {
            print!("{}", cmd_validate(&path)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
