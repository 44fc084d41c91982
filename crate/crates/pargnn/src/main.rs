//! Command-line driver for the experiment pipeline.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags or flag values),
//! 2 on data errors (missing or malformed files, solver/model failures).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use game_gen::GeneratorParams;
use gnn_model::{ModelConfig, ModelParams, Variant};
use nn_core::Checkpoint;
use pargnn::evaluation::{evaluate_split, majority_baseline};
use pargnn::report::{EvalReport, render_csv, render_scatter_svg, render_table};
use pargnn::training::{TrainSettings, checkpoint_from_training, loss_curve_csv, train_model};
use pg_io::{Split, load_dataset};

#[derive(Parser)]
#[command(
    name = "pargnn",
    version,
    about = "Generate parity-game datasets, train graph-network win-region predictors, and report results"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset of random games with exact solutions
    Generate(GenerateArgs),
    /// Train a model on a dataset's training split
    Train(TrainArgs),
    /// Evaluate a checkpoint on both splits of a dataset
    Eval(EvalArgs),
    /// Render a saved evaluation report
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Directory to write the dataset into
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Number of games to generate
    #[arg(long, value_parser = parse_at_least_one)]
    count: usize,
    /// Smallest vertex count
    #[arg(long = "min-n", value_name = "N", default_value_t = 10, value_parser = parse_at_least_one)]
    min_n: usize,
    /// Largest vertex count
    #[arg(long = "max-n", value_name = "N", default_value_t = 200, value_parser = parse_at_least_one)]
    max_n: usize,
    /// Fraction of games assigned to the training split
    #[arg(long, default_value_t = 0.7, value_parser = parse_open_unit)]
    split: f64,
    /// Master seed; the same seed reproduces the dataset byte for byte
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TrainArgs {
    /// Dataset directory (as written by `generate`)
    #[arg(long, value_name = "DIR")]
    data: PathBuf,
    /// File to write the trained checkpoint to
    #[arg(long, value_name = "FILE")]
    checkpoint: PathBuf,
    /// Model variant: convolutional (gcn) or attention (gat) layers
    #[arg(long, default_value = "gcn")]
    variant: Variant,
    /// Number of message-passing layers
    #[arg(long, default_value_t = 10, value_parser = parse_at_least_one)]
    layers: usize,
    /// Hidden width of the message layers and the head
    #[arg(long, default_value_t = 256, value_parser = parse_at_least_one)]
    width: usize,
    /// Dropout rate applied inside the head during training
    #[arg(long, default_value_t = 0.5, value_parser = parse_dropout)]
    dropout: f64,
    /// Divide vertex colors by the vertex count before the first layer
    #[arg(long = "normalize-colors", default_value_t = false)]
    normalize_colors: bool,
    /// Drop the rectifier between message layers (they compose linearly)
    #[arg(long = "no-inter-relu", default_value_t = false)]
    no_inter_relu: bool,
    /// Adam learning rate
    #[arg(long, default_value_t = 1e-3, value_parser = parse_positive)]
    lr: f64,
    /// Number of passes over the training split
    #[arg(long, default_value_t = 1, value_parser = parse_at_least_one)]
    epochs: usize,
    /// Games whose gradients are averaged into one optimizer step
    #[arg(long = "games-per-step", value_name = "N", default_value_t = 1, value_parser = parse_at_least_one)]
    games_per_step: usize,
    /// Seed for initialization and dropout
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optional CSV file for the full per-step loss curve
    #[arg(long = "loss-curve", value_name = "FILE")]
    loss_curve: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Checkpoint to evaluate
    #[arg(long, value_name = "FILE")]
    checkpoint: PathBuf,
    /// Dataset directory to evaluate on
    #[arg(long, value_name = "DIR")]
    data: PathBuf,
    /// File to write the evaluation report to
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Saved evaluation report to render
    #[arg(long, value_name = "FILE")]
    report: PathBuf,
    /// Optional CSV output: one `vertex_count,misclassified` row per
    /// test-split game
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// Optional scatter plot (SVG) of test-split game size vs. errors
    #[arg(long, value_name = "FILE")]
    svg: Option<PathBuf>,
}

fn parse_at_least_one(token: &str) -> Result<usize, String> {
    let value: usize = token.parse().map_err(|e| format!("{e}"))?;
    if value == 0 {
        return Err("must be at least 1".to_string());
    }
    Ok(value)
}

fn parse_positive(token: &str) -> Result<f64, String> {
    let value: f64 = token.parse().map_err(|e| format!("{e}"))?;
    if !(value > 0.0 && value.is_finite()) {
        return Err("must be a positive finite number".to_string());
    }
    Ok(value)
}

fn parse_open_unit(token: &str) -> Result<f64, String> {
    let value: f64 = token.parse().map_err(|e| format!("{e}"))?;
    if !(value > 0.0 && value < 1.0) {
        return Err("must lie strictly between 0 and 1".to_string());
    }
    Ok(value)
}

fn parse_dropout(token: &str) -> Result<f64, String> {
    let value: f64 = token.parse().map_err(|e| format!("{e}"))?;
    if !(0.0..1.0).contains(&value) {
        return Err("must lie in [0, 1)".to_string());
    }
    Ok(value)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    if let Err(message) = validate(&cli.command) {
        eprintln!("error: {message}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// Cross-flag checks that clap's per-value parsers cannot express. These
/// are usage errors and exit with code 1.
fn validate(command: &Command) -> Result<(), String> {
    if let Command::Generate(args) = command
        && args.min_n > args.max_n
    {
        return Err(format!(
            "--min-n ({}) must not exceed --max-n ({})",
            args.min_n, args.max_n
        ));
    }
    Ok(())
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Generate(args) => cmd_generate(args),
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn cmd_generate(args: GenerateArgs) -> anyhow::Result<()> {
    let params = GeneratorParams::new(args.min_n, args.max_n);
    let started = Instant::now();
    let manifest = game_gen::generate_dataset(&args.out, args.count, params, args.seed, args.split)
        .with_context(|| format!("writing dataset to {}", args.out.display()))?;
    let train = manifest
        .records
        .iter()
        .filter(|r| r.split == Split::Train)
        .count();
    let test = manifest.records.len() - train;
    println!(
        "generated {} games ({} train / {} test) in {} [{:.1}s]",
        manifest.records.len(),
        train,
        test,
        args.out.display(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

fn model_config(args: &TrainArgs) -> ModelConfig {
    ModelConfig {
        variant: args.variant,
        message_layers: args.layers,
        hidden_width: args.width,
        head_hidden: args.width,
        dropout: args.dropout,
        attention_heads: 1,
        normalize_colors: args.normalize_colors,
        inter_layer_relu: !args.no_inter_relu,
    }
}

fn cmd_train(args: TrainArgs) -> anyhow::Result<()> {
    let dataset = load_dataset(&args.data)
        .with_context(|| format!("loading dataset from {}", args.data.display()))?;
    let settings = TrainSettings {
        model: model_config(&args),
        learning_rate: args.lr,
        epochs: args.epochs,
        games_per_step: args.games_per_step,
        seed: args.seed,
    };
    let train_games = dataset.indices_of(Split::Train).len();
    println!(
        "training {} on {} games ({} epochs, {} per step, seed {})",
        args.variant, train_games, args.epochs, args.games_per_step, args.seed
    );
    let started = Instant::now();
    let outcome = train_model(&dataset, &settings).context("training failed")?;
    let checkpoint =
        checkpoint_from_training(&outcome, &settings, &args.data.display().to_string());
    checkpoint
        .save(&args.checkpoint)
        .with_context(|| format!("writing checkpoint {}", args.checkpoint.display()))?;
    if let Some(path) = &args.loss_curve {
        std::fs::write(path, loss_curve_csv(&outcome.step_losses))
            .with_context(|| format!("writing loss curve {}", path.display()))?;
    }
    let first = outcome.step_losses.first().copied().unwrap_or(f64::NAN);
    let last = outcome.step_losses.last().copied().unwrap_or(f64::NAN);
    println!(
        "finished {} steps in {:.1}s (loss {:.4} -> {:.4}); checkpoint: {}",
        outcome.step_losses.len(),
        started.elapsed().as_secs_f64(),
        first,
        last,
        args.checkpoint.display()
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> anyhow::Result<()> {
    let checkpoint = Checkpoint::load(&args.checkpoint)
        .with_context(|| format!("loading checkpoint {}", args.checkpoint.display()))?;
    let params = ModelParams::from_checkpoint(&checkpoint)
        .with_context(|| format!("reading model from {}", args.checkpoint.display()))?;
    let dataset = load_dataset(&args.data)
        .with_context(|| format!("loading dataset from {}", args.data.display()))?;

    let started = Instant::now();
    let train =
        evaluate_split(&dataset, Split::Train, &params).context("evaluating train split")?;
    let test = evaluate_split(&dataset, Split::Test, &params).context("evaluating test split")?;
    let timing_seconds = started.elapsed().as_secs_f64();

    let mut meta: Vec<(String, String)> = checkpoint.meta_entries().to_vec();
    let dmeta = &dataset.manifest.meta;
    meta.push(("dataset.seed".to_string(), dmeta.seed.to_string()));
    meta.push((
        "dataset.min_vertices".to_string(),
        dmeta.min_vertices.to_string(),
    ));
    meta.push((
        "dataset.max_vertices".to_string(),
        dmeta.max_vertices.to_string(),
    ));
    meta.push((
        "dataset.split_fraction".to_string(),
        dmeta.split_fraction.to_string(),
    ));
    meta.push((
        "dataset.games".to_string(),
        dataset.entries.len().to_string(),
    ));
    let report = EvalReport {
        checkpoint: args.checkpoint.display().to_string(),
        dataset: args.data.display().to_string(),
        meta,
        timing_seconds,
        train,
        test,
    };
    std::fs::write(&args.out, report.render())
        .with_context(|| format!("writing report {}", args.out.display()))?;

    print!("{}", render_table(&report));
    println!(
        "majority baseline (test): {:.4}",
        majority_baseline(&dataset, Split::Test)
    );
    println!("report: {}", args.out.display());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.report)
        .with_context(|| format!("reading report {}", args.report.display()))?;
    let report = EvalReport::parse(&text)
        .with_context(|| format!("parsing report {}", args.report.display()))?;
    print!("{}", render_table(&report));
    if let Some(path) = &args.csv {
        write_text(path, &render_csv(&report.test))?;
        println!("csv: {}", path.display());
    }
    if let Some(path) = &args.svg {
        write_text(path, &render_scatter_svg(&report.test))?;
        println!("svg: {}", path.display());
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
