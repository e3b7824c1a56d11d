use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use refmap::pipeline::{self, Outcome, RunOptions, Stage};
use refmap::PipelineConfig;

/// Map the funders and organizations behind the citations of policy memos.
#[derive(Parser)]
#[command(name = "refmap", version)]
struct Cli {
    /// Pipeline config (TOML).
    #[arg(short, long, default_value = "refmap.toml")]
    config: PathBuf,

    /// Override `paths.workdir`.
    #[arg(long)]
    workdir: Option<PathBuf>,

    /// Repeat for more log output (-v debug, -vv trace).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,

    /// Only log warnings and errors.
    #[arg(short, long, conflicts_with = "verbose")]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment memos into fragments; validate records, awards and aliases.
    Ingest,
    /// Resolve fragments against the record index.
    Resolve,
    /// Link articles to awards and impute award years.
    Link,
    /// Yearly shares, signed-rank tests and KLD.
    Stats,
    /// Tables, sankey files, retraction flags and coverage report.
    Report {
        /// Only emit the sankey files of this memo.
        #[arg(long)]
        memo: Option<String>,
    },
    /// Run every stage in order.
    All {
        #[arg(long)]
        memo: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => "warn",
        (false, 0) => "info",
        (false, 1) => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let mut cfg = match PipelineConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            log::error!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(w) = cli.workdir {
        cfg.paths.workdir = w;
    }

    let (stage, memo) = match cli.command {
        Command::Ingest => (Some(Stage::Ingest), None),
        Command::Resolve => (Some(Stage::Resolve), None),
        Command::Link => (Some(Stage::Link), None),
        Command::Stats => (Some(Stage::Stats), None),
        Command::Report { memo } => (Some(Stage::Report), memo),
        Command::All { memo } => (None, memo),
    };
    let opts = RunOptions { memo };
    let result = match stage {
        Some(s) => pipeline::run(s, &cfg, &opts).map(|o| vec![(s, o)]),
        None => pipeline::run_all(&cfg, &opts),
    };
    match result {
        Ok(done) => {
            for (stage, outcome) in done {
                let status = match outcome {
                    Outcome::Ran => "done",
                    Outcome::UpToDate => "up to date",
                };
                log::debug!("{}: {status}", stage.name());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
