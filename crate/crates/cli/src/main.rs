//! `stationplot` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid configuration or arguments, 2 data error,
//! 3 numeric failure. Errors are also written to stderr as one JSON line.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use stationplot::embedding::Dimension;
use stationplot::ingest::BandpassSpec;
use stationplot::pipeline::{self, FeatureTable, InputFormat, PipelineConfig, ProblemEntry};
use stationplot::timeseries::DetrendMode;
use stationplot::ErrorKind;

#[derive(Parser)]
#[command(
    name = "stationplot",
    version,
    about = "StationPlot embeddings, hull features and SVM evaluation"
)]
struct Cli {
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the point cloud of every record as CSV.
    Embed {
        #[command(flatten)]
        common: CommonArgs,
        /// Also render each cloud as SVG.
        #[arg(long)]
        plot: bool,
    },
    /// Extract the hull feature matrix.
    Features {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// ANOVA and Kruskal-Wallis tests per feature, plus box plots.
    Stats {
        #[command(flatten)]
        common: CommonArgs,
        /// Feature CSV (default: <output>/features/features.csv).
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// Repeated train/test SVM evaluation.
    Classify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// StationPlots with hull overlays for one record per class.
    Plot {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Features, stats, classification and figures in one go.
    Pipeline {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write the point clouds.
        #[arg(long)]
        save_embeddings: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DetrendArg {
    Mean,
    Linear,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Bonn,
    Csv,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Class directory as CLASS=DIR (repeatable).
    #[arg(long = "data", value_name = "CLASS=DIR")]
    data: Vec<String>,
    /// Preset problem: a-vs-e or abcd-vs-e (repeatable).
    #[arg(long = "problem")]
    problems: Vec<String>,
    /// Embedding order n (repeatable).
    #[arg(long = "order")]
    orders: Vec<usize>,
    #[arg(long, value_parser = ["2", "3"])]
    dimension: Option<String>,
    #[arg(long, value_enum)]
    detrend: Option<DetrendArg>,
    /// Enable band-pass preprocessing, optionally as LOW:HIGH Hz.
    #[arg(long, value_name = "LOW:HIGH", num_args = 0..=1, default_missing_value = "")]
    bandpass: Option<String>,
    #[arg(long, value_enum)]
    input_format: Option<FormatArg>,
    /// Sampling rate of CSV input in Hz.
    #[arg(long)]
    sample_rate: Option<f64>,
    /// Feature column to use (repeatable).
    #[arg(long = "feature", id = "feature_names")]
    feature_names: Vec<String>,
    /// Kernel: linear, quadratic, polynomial[:degree], rbf[:sigma] (repeatable).
    #[arg(long = "kernel")]
    kernels: Vec<String>,
    #[arg(long = "c")]
    c: Option<f64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    stratify: Option<bool>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Skip figures.
    #[arg(long)]
    no_plot: bool,
}

fn parse_bandpass(s: &str) -> Result<BandpassSpec, stationplot::Error> {
    let mut spec = BandpassSpec::default();
    if s.is_empty() {
        return Ok(spec);
    }
    let bad = || stationplot::Error::InvalidConfig(format!("bandpass: expected LOW:HIGH, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    spec.low_cut = lo.trim().parse().map_err(|_| bad())?;
    spec.high_cut = hi.trim().parse().map_err(|_| bad())?;
    Ok(spec)
}

impl CommonArgs {
    fn resolve(&self) -> Result<PipelineConfig, stationplot::Error> {
        let mut c = match &self.config {
            Some(path) => PipelineConfig::from_json_file(path)?,
            None => PipelineConfig::default(),
        };
        for entry in &self.data {
            let (class, dir) = entry.split_once('=').ok_or_else(|| {
                stationplot::Error::InvalidConfig(format!("--data: expected CLASS=DIR, got `{entry}`"))
            })?;
            c.data.insert(class.trim().to_string(), PathBuf::from(dir));
        }
        if !self.problems.is_empty() {
            c.problems = self.problems.iter().cloned().map(ProblemEntry::Preset).collect();
        }
        if !self.orders.is_empty() {
            c.orders = self.orders.clone();
        }
        if let Some(d) = &self.dimension {
            c.dimension = if d == "3" { Dimension::Three } else { Dimension::Two };
        }
        if let Some(d) = self.detrend {
            c.detrend = Some(match d {
                DetrendArg::Mean => DetrendMode::Mean,
                DetrendArg::Linear => DetrendMode::Linear,
            });
        }
        if let Some(b) = &self.bandpass {
            c.bandpass = Some(parse_bandpass(b)?);
        }
        if let Some(f) = self.input_format {
            c.input_format = match f {
                FormatArg::Bonn => InputFormat::Bonn,
                FormatArg::Csv => InputFormat::Csv,
            };
        }
        if let Some(r) = self.sample_rate {
            c.sample_rate = r;
        }
        if !self.feature_names.is_empty() {
            c.features = self.feature_names.clone();
        }
        if !self.kernels.is_empty() {
            c.kernels = self.kernels.clone();
        }
        if let Some(v) = self.c {
            c.c = v;
        }
        if let Some(v) = self.runs {
            c.runs = v;
        }
        if let Some(v) = self.train_fraction {
            c.train_fraction = v;
        }
        if let Some(v) = self.stratify {
            c.stratify = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.output {
            c.output = v.clone();
        }
        if self.no_plot {
            c.plot = false;
        }
        Ok(c)
    }
}

fn feature_path(config: &PipelineConfig, given: &Option<PathBuf>) -> PathBuf {
    given
        .clone()
        .unwrap_or_else(|| config.output.join(pipeline::FEATURES_DIR).join(pipeline::FEATURES_FILE))
}

fn run(command: Command) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match command {
        Command::Embed { common, plot } => {
            let mut config = common.resolve()?;
            config.plot = plot;
            config.validate()?;
            let records = pipeline::load_records(&config)?;
            let n = pipeline::run_embed(&config, &records)?;
            writeln!(
                stdout,
                "wrote {n} point clouds to {}",
                config.output.join(pipeline::EMBEDDINGS_DIR).display()
            )?;
        }
        Command::Features { common } => {
            let config = common.resolve()?;
            config.validate()?;
            let records = pipeline::load_records(&config)?;
            let (table, excluded) = pipeline::run_features(&config, &records)?;
            writeln!(
                stdout,
                "{} feature rows, {} excluded; see {}",
                table.rows.len(),
                excluded.len(),
                config.output.join(pipeline::FEATURES_DIR).display()
            )?;
        }
        Command::Stats { common, features } => {
            let config = common.resolve()?;
            config.validate_settings()?;
            let path = feature_path(&config, &features);
            let table = FeatureTable::read(&path)?;
            for s in pipeline::run_stats(&config, &table)? {
                writeln!(stdout, "n = {}\n{}", s.order, s.report.to_csv())?;
            }
        }
        Command::Classify { common, features } => {
            let config = common.resolve()?;
            config.validate_settings()?;
            let path = feature_path(&config, &features);
            let table = FeatureTable::read(&path)?;
            let summary = pipeline::run_classify(&config, &table)?;
            for r in &summary.reports {
                writeln!(stdout, "n = {}\n{}", r.order, r.evaluation.to_table())?;
            }
        }
        Command::Plot { common } => {
            let mut config = common.resolve()?;
            config.plot = true;
            config.validate()?;
            let records = pipeline::load_records(&config)?;
            for p in pipeline::run_plot(&config, &records)? {
                writeln!(stdout, "{}", p.display())?;
            }
        }
        Command::Pipeline {
            common,
            save_embeddings,
        } => {
            let mut config = common.resolve()?;
            config.save_embeddings |= save_embeddings;
            let summary = pipeline::run_pipeline(&config)?;
            writeln!(
                stdout,
                "{} records, {} feature rows, {} excluded",
                summary.records, summary.feature_rows, summary.excluded
            )?;
            for b in &summary.best {
                writeln!(
                    stdout,
                    "best for {}: n = {}, {} with {:.2} ± {:.2} % accuracy",
                    b.problem, b.order, b.kernel, b.accuracy_mean, b.accuracy_std
                )?;
            }
        }
    }
    Ok(())
}

fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    match err
        .chain()
        .find_map(|e| e.downcast_ref::<stationplot::Error>())
        .map(|e| e.kind())
    {
        Some(ErrorKind::Validation) => (1, "validation"),
        Some(ErrorKind::Data) => (2, "data"),
        Some(ErrorKind::Numeric) => (3, "numeric"),
        // stdout/stderr failures and the like
        None => (2, "data"),
    }
}

/// Joins the cause chain, dropping causes already spelled out by their parent.
fn message(err: &anyhow::Error) -> String {
    let mut parts: Vec<String> = Vec::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if !parts.last().is_some_and(|p| p.contains(&text)) {
            parts.push(text);
        }
    }
    parts.join(": ")
}

fn report(code: u8, kind: &str, message: &str) -> ExitCode {
    let diag = serde_json::json!({ "error": { "kind": kind, "exit_code": code, "message": message } });
    eprintln!("{diag}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report(1, "validation", e.to_string().trim()),
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();

    let threads = cli.threads;
    let command = cli.command;
    let outcome = pipeline::with_threads(threads, move || run(command)).map_err(anyhow::Error::from);
    match outcome.and_then(|r| r) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, kind) = classify(&e);
            report(code, kind, &message(&e))
        }
    }
}
