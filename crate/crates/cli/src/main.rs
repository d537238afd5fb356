use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phrasmooth::{FeatureSelection, LabelSource, RunConfig, Weighting};

mod analyze;
mod cluster;
mod manifest;
mod oov;

#[derive(Parser)]
#[command(
    name = "phrasmooth",
    version,
    about = "Phrase tables smoothed by vocabulary reduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn word classes for one side of a corpus.
    Cluster(cluster::ClusterArgs),
    /// Extract, smooth and write a phrase table.
    Build(BuildArgs),
    /// Compare system outputs against a baseline.
    Analyze(analyze::AnalyzeArgs),
    /// Out-of-vocabulary rates for training-data prefixes.
    Oov(oov::OovArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Re-run the configuration stored in a manifest; other flags except
    /// --output are ignored.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    source: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    target: Option<PathBuf>,
    /// Pharaoh `j-i` alignment file.
    #[arg(long, required_unless_present = "manifest")]
    alignment: Option<PathBuf>,
    #[arg(long, default_value_t = 100, conflicts_with = "source_labels")]
    source_classes: usize,
    #[arg(long, default_value_t = 100, conflicts_with = "target_labels")]
    target_classes: usize,
    /// `word<TAB>label` file used instead of clustering the source side.
    #[arg(long)]
    source_labels: Option<PathBuf>,
    #[arg(long)]
    target_labels: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    iterations: usize,
    #[arg(long, default_value = "top-frequent")]
    init: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 7)]
    max_len: usize,
    /// Comma-separated groups out of std, lex, all, each, lex-all.
    #[arg(long, default_value = "std,lex,all,each")]
    features: String,
    /// `count-normalized` or `uniform`.
    #[arg(long, default_value = "count-normalized")]
    weighting: String,
    /// Leading fraction of sentence pairs to train on.
    #[arg(long, default_value_t = 1.0)]
    subsample: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

impl BuildArgs {
    fn into_config(self) -> anyhow::Result<RunConfig> {
        if let Some(path) = &self.manifest {
            let mut config = RunConfig::load_manifest(path)?;
            if let Some(output) = self.output {
                config.output = output;
            }
            return Ok(config);
        }
        let labels = |file: Option<PathBuf>, classes| match file {
            Some(path) => LabelSource::File(path),
            None => LabelSource::Clusters { classes },
        };
        let config = RunConfig {
            source: self.source.expect("required by clap"),
            target: self.target.expect("required by clap"),
            alignment: self.alignment.expect("required by clap"),
            source_labels: labels(self.source_labels, self.source_classes),
            target_labels: labels(self.target_labels, self.target_classes),
            iterations: self.iterations,
            init: self.init,
            seed: self.seed,
            max_len: self.max_len,
            features: FeatureSelection::parse(&self.features)?,
            weighting: Weighting::parse(&self.weighting)
                .ok_or_else(|| anyhow::anyhow!("unknown weighting `{}`", self.weighting))?,
            subsample: self.subsample,
            output: self.output.unwrap_or_else(|| PathBuf::from("out")),
        };
        config.validate()?;
        Ok(config)
    }
}

fn build(args: BuildArgs) -> anyhow::Result<()> {
    let config = args.into_config()?;
    let summary = phrasmooth::pipeline::run_build(&config)?;
    println!(
        "{} sentence pairs, {} phrase pairs -> {}",
        summary.sentence_pairs,
        summary.records,
        config
            .output
            .join(phrasmooth::pipeline::PHRASE_TABLE_FILE)
            .display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Cluster(args) => cluster::run(args),
        Command::Build(args) => build(args),
        Command::Analyze(args) => analyze::run(args),
        Command::Oov(args) => oov::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let line = format!("{err:#}").replace('\n', " ");
            eprintln!("error: {line}");
            ExitCode::FAILURE
        }
    }
}
