mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Workspace;
use config::RunConfig;
use error::CliError;

/// Rank-degree sampling of follow networks under simulated API limits.
#[derive(Debug, Parser)]
#[command(name = "rankwalk", version, about)]
struct Cli {
    /// JSON run configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Single-threaded round-robin sampling with reproducible output.
    #[arg(long, global = true)]
    deterministic: bool,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Overrides one config key, e.g. `--set nodes=5000`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Prints the effective configuration as JSON and exits.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthetic graph, profiles, tweets and stop words.
    Generate,
    /// Runs the walkers against the simulated API.
    Sample {
        /// Continues from a resume file written by an earlier run.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Classic rank degree sampling on the undirected view of the graph.
    Reference,
    /// Coverage, reach and activity of the sample against the ground truth.
    Evaluate,
    /// In-degree filter followed by the k-core of the sample.
    Kcore,
    Pagerank,
    /// Label propagation or an external assignment, plus the meta-graph.
    Communities,
    /// Chi-squared keywords per community.
    Keywords,
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::input(p, e))?;
            RunConfig::from_json(&text).map_err(|e| CliError::input(p, e))?
        }
        None => RunConfig::default(),
    }
    .with_overrides(&cli.overrides)?;
    if let Some(seed) = cli.seed {
        cfg.rng_seed = seed;
    }
    if cli.deterministic {
        cfg.deterministic = true;
    }
    if let Some(dir) = &cli.out_dir {
        cfg.out_dir = dir.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli)?;
    if cli.print_config {
        // a closed pipe (e.g. `| head`) is not an error here
        let _ = writeln!(std::io::stdout(), "{}", cfg.to_json());
        return Ok(());
    }
    let ws = Workspace::new(&cfg);
    match cli.command {
        None => Err(CliError::Config("no command given; see --help".into())),
        Some(Command::Generate) => commands::generate(&ws),
        Some(Command::Sample { resume }) => commands::sample(&ws, resume.as_deref()),
        Some(Command::Reference) => commands::reference(&ws),
        Some(Command::Evaluate) => commands::evaluate(&ws),
        Some(Command::Kcore) => commands::kcore(&ws),
        Some(Command::Pagerank) => commands::pagerank_cmd(&ws),
        Some(Command::Communities) => commands::communities(&ws),
        Some(Command::Keywords) => commands::keywords(&ws),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = e.to_string().replace('\n', " ");
            eprintln!("rankwalk: {line}");
            ExitCode::FAILURE
        }
    }
}
