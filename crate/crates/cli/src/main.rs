use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use netmap_cli::config::validate_config;
use netmap_cli::pipeline::{run_stages, Stage};
use netmap_cli::synth;

/// Build group maps of an account network from offline data.
#[derive(Parser)]
#[command(name = "netmap", version)]
struct Cli {
    /// Log progress to stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StageArgs {
    /// Pipeline configuration (TOML).
    config: PathBuf,
    /// Write artifacts here instead of the configured output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override the layout seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Validate the configuration and stop.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage in order.
    Run(StageArgs),
    /// Expand the seed accounts into the sample graph.
    Snowball(StageArgs),
    /// Reduce the sample to its k-core.
    Kcore(StageArgs),
    /// Cluster core accounts into segments by shared affiliations.
    Cluster(StageArgs),
    /// Place segments into labelled groups.
    Group(StageArgs),
    /// Heterophily, coverage and consistency tables.
    Metrics(StageArgs),
    /// News-source share table and amplifier report.
    Classify(StageArgs),
    /// Group and account maps.
    Layout(StageArgs),
    /// Print the configuration with every default filled in.
    Config { config: PathBuf },
    /// Write the planted synthetic dataset and its config into DIR.
    Synth {
        dir: PathBuf,
        #[arg(long, default_value_t = synth::DEFAULT_SEED)]
        seed: u64,
    },
}

fn stage_run(args: StageArgs, stages: &[Stage]) -> ExitCode {
    let config = match validate_config(&args.config) {
        Ok(c) => c.with_overrides(args.out.as_deref(), args.seed),
        Err(e) => {
            eprintln!("error: invalid configuration\n{e}");
            return ExitCode::from(1);
        }
    };
    if args.dry_run {
        let names: Vec<&str> = stages.iter().map(|s| s.name()).collect();
        println!("configuration is valid; would run: {}", names.join(", "));
        println!("output directory: {}", config.output_dir.resolved.display());
        return ExitCode::SUCCESS;
    }
    match run_stages(&config, stages) {
        Ok(manifest) => {
            for a in &manifest.artifacts {
                println!("{}  {}", a.sha256, a.path);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match cli.command {
        Command::Run(a) => stage_run(a, &Stage::ALL),
        Command::Snowball(a) => stage_run(a, &[Stage::Snowball]),
        Command::Kcore(a) => stage_run(a, &[Stage::Kcore]),
        Command::Cluster(a) => stage_run(a, &[Stage::Cluster]),
        Command::Group(a) => stage_run(a, &[Stage::Group]),
        Command::Metrics(a) => stage_run(a, &[Stage::Metrics]),
        Command::Classify(a) => stage_run(a, &[Stage::Classify]),
        Command::Layout(a) => stage_run(a, &[Stage::Layout]),
        Command::Config { config } => match validate_config(&config) {
            Ok(c) => {
                print!("{}", c.effective_toml());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: invalid configuration\n{e}");
                ExitCode::from(1)
            }
        },
        Command::Synth { dir, seed } => match synth::write_bundle(&dir, seed) {
            Ok(d) => {
                println!("wrote {} accounts and {} citations to {}", d.planted.len(), synth::CITATIONS, dir.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
    }
}
