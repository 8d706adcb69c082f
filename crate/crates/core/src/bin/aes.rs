use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hindi_aes::pipeline::{run_command, Command, Invocation};

#[derive(Parser)]
#[command(
    name = "aes",
    version,
    about = "Feature-based Hindi essay scoring pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Restrict the stage to one prompt
    #[arg(long)]
    prompt: Option<String>,
    /// Model file to use instead of the stored per-prompt models
    #[arg(long)]
    model: Option<PathBuf>,
    /// Override the configured seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Split the corpus and write the feature table
    Featurize(Common),
    /// Train one model per prompt on the training split
    Train(Common),
    /// Score validation and unscored essays
    Predict(Common),
    /// Score the test split and write the report
    Evaluate(Common),
    /// Print the stored report and rater agreement
    Report(Common),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (cmd, common) = match cli.command {
        Cmd::Featurize(c) => (Command::Featurize, c),
        Cmd::Train(c) => (Command::Train, c),
        Cmd::Predict(c) => (Command::Predict, c),
        Cmd::Evaluate(c) => (Command::Evaluate, c),
        Cmd::Report(c) => (Command::Report, c),
    };
    let inv = Invocation {
        config: common.config,
        prompt: common.prompt,
        model: common.model,
        seed: common.seed,
    };
    match run_command(cmd, &inv) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
