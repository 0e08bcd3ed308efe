use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cmop_la::config::{Auto, RunConfig};
use cmop_la::{cmd_features, cmd_pipeline, cmd_project, cmd_validate, cmd_walk, CliError, Overrides};

/// Landscape features and instance-space projection for constrained
/// multi-objective problems.
///
/// Exit codes: 0 success, 1 validation failure, 2 configuration error,
/// 3 pipeline precondition failure (e.g. missing projection features).
#[derive(Parser)]
#[command(name = "cmop-la", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `outDir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed base; overrides `walkSeedBase`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads ("auto" or a positive integer); overrides `threads`.
    #[arg(long, env = "CMOP_LA_THREADS")]
    threads: Option<Auto>,
    /// "builtin" or a projection JSON; overrides `projectionPath`.
    #[arg(long)]
    projection: Option<String>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(&self.config)?;
        Overrides {
            out: self.out.clone(),
            seed: self.seed,
            threads: self.threads,
            projection: self.projection.clone(),
        }
        .apply(&mut cfg);
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Global and walk features for every problem and sample set.
    Features(RunArgs),
    /// Random-walk features only.
    Walk(RunArgs),
    /// Features, performance labels, filtering, projection and plots.
    Pipeline(RunArgs),
    /// Projection and plots; performance data optional.
    Project(RunArgs),
    /// Check a performance, feature, projection or sample file.
    Validate {
        path: PathBuf,
        /// Problem metadata JSON, for full checks of a sample file.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Features(a) => cmd_features(&a.load()?),
        Command::Walk(a) => cmd_walk(&a.load()?),
        Command::Pipeline(a) => cmd_pipeline(&a.load()?),
        Command::Project(a) => cmd_project(&a.load()?),
        Command::Validate { path, meta } => cmd_validate(&path, meta.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { cmop_la::EXIT_CONFIG } else { cmop_la::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
