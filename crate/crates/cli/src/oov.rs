use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{ensure, Context};
use clap::Args;
use phrasmooth::corpus::oov_rate;
use phrasmooth::Vocabulary;

use crate::manifest;

#[derive(Args)]
pub struct OovArgs {
    /// Training-side text whose prefixes define the vocabulary.
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// Training prefix fractions in (0, 1], comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    subsample: Vec<f64>,
    /// Directory for `oov.tsv` and the manifest; prints only when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn run(args: OovArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.train)
        .with_context(|| format!("reading {}", args.train.display()))?;
    let lines: Vec<&str> = text.lines().collect();
    let mut report = String::from("subsample\tsentences\tvocabulary\tOOV [%]\n");
    for &fraction in &args.subsample {
        ensure!(
            fraction > 0.0 && fraction <= 1.0,
            "subsample {fraction} outside (0, 1]"
        );
        let n = ((fraction * lines.len() as f64).ceil() as usize).min(lines.len());
        let vocab = Vocabulary::from_lines(lines[..n].iter().copied());
        let rate = oov_rate(&args.test, &vocab)?;
        let _ = writeln!(
            report,
            "{fraction}\t{n}\t{}\t{:.4}",
            vocab.len(),
            100.0 * rate
        );
    }
    print!("{report}");
    if let Some(dir) = &args.output {
        manifest::create_dir(dir)?;
        let path = dir.join("oov.tsv");
        fs::write(&path, &report).with_context(|| format!("writing {}", path.display()))?;
        let fractions = args
            .subsample
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        manifest::write(
            dir,
            &[
                ("command", &"oov"),
                ("train", &args.train.display()),
                ("test", &args.test.display()),
                ("subsample", &fractions),
            ],
        )?;
    }
    Ok(())
}
