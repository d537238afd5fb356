use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context};
use clap::Args;
use phrasmooth::analysis::{
    bleu, corpus_ter, overlap, paired_bootstrap, sentence_evals, top_k_ter_improved, SentenceEval,
};
use phrasmooth::corpus::tokens;

use crate::manifest;

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Reference translations, one tokenized sentence per line.
    #[arg(long)]
    refs: PathBuf,
    #[arg(long)]
    baseline: PathBuf,
    /// System outputs to compare; repeat for several systems.
    #[arg(long = "system", required = true)]
    systems: Vec<PathBuf>,
    #[arg(long, default_value_t = 200)]
    top_k: usize,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "analysis")]
    output: PathBuf,
}

type Sentences = Vec<Vec<String>>;

fn read_sentences(path: &Path) -> anyhow::Result<Sentences> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(|l| tokens(l).map(str::to_owned).collect())
        .collect())
}

/// Distinct display names: file names, prefixed by their position when two
/// systems share one.
fn system_names(paths: &[PathBuf]) -> Vec<String> {
    let names: Vec<String> = paths
        .iter()
        .map(|p| {
            p.file_name().map_or_else(
                || p.display().to_string(),
                |n| n.to_string_lossy().into_owned(),
            )
        })
        .collect();
    names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            if names.iter().filter(|m| *m == n).count() > 1 {
                format!("{}:{n}", i + 1)
            } else {
                n.clone()
            }
        })
        .collect()
}

fn pct(x: f64) -> String {
    format!("{:.1}", 100.0 * x)
}

fn write(dir: &Path, name: &str, text: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn run(args: AnalyzeArgs) -> anyhow::Result<()> {
    let refs = read_sentences(&args.refs)?;
    let baseline = read_sentences(&args.baseline)?;
    let systems: Vec<Sentences> = args
        .systems
        .iter()
        .map(|p| read_sentences(p))
        .collect::<anyhow::Result<_>>()?;
    ensure!(
        baseline.len() == refs.len(),
        "baseline has {} lines, references {}",
        baseline.len(),
        refs.len()
    );
    for (path, sys) in args.systems.iter().zip(&systems) {
        ensure!(
            sys.len() == refs.len(),
            "{} has {} lines, references {}",
            path.display(),
            sys.len(),
            refs.len()
        );
    }
    let names = system_names(&args.systems);
    manifest::create_dir(&args.output)?;

    let mut metrics = String::from("system\tBLEU\tTER\tBLEU win\tBLEU sig\tTER win\tTER sig\n");
    let _ = writeln!(
        metrics,
        "baseline\t{:.2}\t{:.2}\t\t\t\t",
        bleu(&baseline, &refs)?,
        100.0 * corpus_ter(&baseline, &refs)?
    );
    for (name, sys) in names.iter().zip(&systems) {
        let boot = paired_bootstrap(sys, &baseline, &refs, args.samples, args.seed)?;
        let _ = writeln!(
            metrics,
            "{name}\t{:.2}\t{:.2}\t{:.4}\t{}\t{:.4}\t{}",
            bleu(sys, &refs)?,
            100.0 * corpus_ter(sys, &refs)?,
            boot.bleu_win,
            boot.bleu_significance().marker(),
            boot.ter_win,
            boot.ter_significance().marker(),
        );
    }
    write(&args.output, "metrics.tsv", &metrics)?;

    let mut deltas = String::from("system\tindex\tTER baseline\tTER system\tdelta\n");
    let mut tops: Vec<Vec<SentenceEval<String>>> = Vec::new();
    for (name, sys) in names.iter().zip(&systems) {
        for e in sentence_evals(&baseline, sys, &refs)? {
            let _ = writeln!(
                deltas,
                "{name}\t{}\t{:.6}\t{:.6}\t{:.6}",
                e.index, e.ter_baseline, e.ter_system, e.delta
            );
        }
        tops.push(top_k_ter_improved(&baseline, sys, &refs, args.top_k)?);
    }
    write(&args.output, "deltas.tsv", &deltas)?;

    let mut top_report = String::from("system\trank\tindex\tdelta\n");
    for (name, top) in names.iter().zip(&tops) {
        for (rank, e) in top.iter().enumerate() {
            let _ = writeln!(
                top_report,
                "{name}\t{}\t{}\t{:.6}",
                rank + 1,
                e.index,
                e.delta
            );
        }
    }
    write(&args.output, "top-k.tsv", &top_report)?;

    let mut pairs = String::from("system A\tsystem B\tCommon Input [%]\tSame Translation [%]\n");
    let mut matrix = format!("Common Input [%]\t{}\n", names.join("\t"));
    for (name_a, top_a) in names.iter().zip(&tops) {
        let mut row = vec![name_a.clone()];
        for (name_b, top_b) in names.iter().zip(&tops) {
            let report = overlap(top_a, top_b)?;
            let same = report
                .same_translation_fraction
                .map_or_else(|| "n/a".to_owned(), pct);
            let _ = writeln!(
                pairs,
                "{name_a}\t{name_b}\t{}\t{same}",
                pct(report.common_input_fraction)
            );
            row.push(pct(report.common_input_fraction));
        }
        let _ = writeln!(matrix, "{}", row.join("\t"));
    }
    write(&args.output, "overlap.tsv", &pairs)?;
    write(&args.output, "overlap-matrix.tsv", &matrix)?;

    let systems_field = args
        .systems
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join(" ");
    manifest::write(
        &args.output,
        &[
            ("command", &"analyze"),
            ("refs", &args.refs.display()),
            ("baseline", &args.baseline.display()),
            ("systems", &systems_field),
            ("top_k", &args.top_k),
            ("samples", &args.samples),
            ("seed", &args.seed),
        ],
    )?;
    print!("{metrics}");
    Ok(())
}
