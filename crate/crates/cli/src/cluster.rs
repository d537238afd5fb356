use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use phrasmooth::clustering::{cluster_with, write_trace, InitMethod};
use phrasmooth::corpus::tokens;
use phrasmooth::{LabelMap, Vocabulary, WordId};

use crate::manifest;

#[derive(Args)]
pub struct ClusterArgs {
    /// Tokenized monolingual text, one sentence per line.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 100)]
    classes: usize,
    #[arg(long, default_value_t = 30)]
    iterations: usize,
    /// One of random, top-frequent, same-countsum, same-#words, count-bins.
    #[arg(long, default_value = "top-frequent")]
    init: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the class map after every N-th iteration (0 = never).
    #[arg(long, default_value_t = 0)]
    dump_every: usize,
    #[arg(long, default_value = "out")]
    output: PathBuf,
}

fn write_map(path: &Path, map: &LabelMap, vocab: &Vocabulary) -> phrasmooth::Result<()> {
    let file = File::create(path).map_err(|e| phrasmooth::Error::Io {
        path: path.into(),
        source: e,
    })?;
    map.write_dump(vocab, BufWriter::new(file))
        .map_err(|e| phrasmooth::Error::Io {
            path: path.into(),
            source: e,
        })
}

pub fn run(args: ClusterArgs) -> anyhow::Result<()> {
    let method = InitMethod::parse(&args.init, args.seed)?;
    let text = fs::read_to_string(&args.corpus)
        .with_context(|| format!("reading {}", args.corpus.display()))?;
    let vocab = Vocabulary::from_lines(text.lines());
    let sentences: Vec<Vec<WordId>> = text
        .lines()
        .map(|l| {
            tokens(l)
                .map(|t| vocab.id(t).expect("token was observed"))
                .collect()
        })
        .collect();
    manifest::create_dir(&args.output)?;

    let outcome = cluster_with(
        &vocab,
        &sentences,
        args.classes,
        args.iterations,
        method,
        |iteration, map| {
            if args.dump_every > 0 && iteration % args.dump_every == 0 {
                write_map(
                    &args.output.join(format!("classes.iter{iteration}.txt")),
                    map,
                    &vocab,
                )?;
            }
            Ok(())
        },
    )?;

    write_map(&args.output.join("classes.txt"), &outcome.labelmap, &vocab)?;
    let trace_path = args.output.join("trace.txt");
    let trace_file =
        File::create(&trace_path).with_context(|| format!("creating {}", trace_path.display()))?;
    write_trace(&outcome.trace, BufWriter::new(trace_file))?;
    manifest::write(
        &args.output,
        &[
            ("command", &"cluster"),
            ("corpus", &args.corpus.display()),
            ("classes", &args.classes),
            ("iterations", &args.iterations),
            ("init", &method.name()),
            ("seed", &args.seed),
            ("dump_every", &args.dump_every),
        ],
    )?;
    println!(
        "{} words in {} classes, {} passes, objective {:.6}",
        vocab.len(),
        args.classes,
        outcome.passes_run,
        outcome.trace.last().copied().unwrap_or_default()
    );
    Ok(())
}
