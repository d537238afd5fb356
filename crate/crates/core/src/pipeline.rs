//! End-to-end table building: corpus -> label maps -> counts -> scores -> files.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use crate::clustering::{cluster, load_label_map, LabelMap};
use crate::config::{emit_manifest, LabelSource, RunConfig};
use crate::corpus::{load_parallel_corpus, ParallelCorpus, Vocabulary, WordId};
use crate::error::{Error, Result};
use crate::extraction::{accumulate, PhraseCountTable};
use crate::smoothing::{
    build_generalized_tables, lexicon_probs, score_table, GeneralizedCountTables, LabelMaps,
    Lexicon, ScoredPair, Weighting,
};
use crate::table::emit_table;

pub const PHRASE_TABLE_FILE: &str = "phrase-table.txt";
pub const COUNTS_FILE: &str = "counts.txt";
pub const MANIFEST_FILE: &str = "manifest.txt";

/// Everything derived from one corpus and one pair of label maps.
#[derive(Debug, Clone)]
pub struct Models {
    pub table: PhraseCountTable,
    pub generalized: GeneralizedCountTables,
    pub lexicon: Lexicon,
    pub scored: Vec<ScoredPair>,
}

pub fn build_models(
    corpus: &ParallelCorpus,
    maps: &LabelMaps,
    max_len: usize,
    weighting: Weighting,
) -> Models {
    let table = accumulate(&corpus.pairs, max_len);
    let generalized = build_generalized_tables(&table, maps);
    let lexicon = lexicon_probs(&corpus.pairs, maps);
    let scored = score_table(&table, &generalized, &lexicon, weighting);
    Models {
        table,
        generalized,
        lexicon,
        scored,
    }
}

fn side_labels(
    labels: &LabelSource,
    vocab: &Vocabulary,
    sentences: &[Vec<WordId>],
    config: &RunConfig,
) -> Result<LabelMap> {
    match labels {
        LabelSource::File(path) => load_label_map(path, vocab),
        LabelSource::Clusters { classes } => {
            let outcome = cluster(
                vocab,
                sentences,
                *classes,
                config.iterations,
                config.init_method()?,
            )?;
            Ok(outcome.labelmap)
        }
    }
}

/// Label maps for both sides as the configuration asks.
pub fn label_maps(config: &RunConfig, corpus: &ParallelCorpus) -> Result<LabelMaps> {
    let source: Vec<Vec<WordId>> = corpus.pairs.iter().map(|p| p.source.clone()).collect();
    let target: Vec<Vec<WordId>> = corpus.pairs.iter().map(|p| p.target.clone()).collect();
    Ok(LabelMaps::new(
        side_labels(&config.source_labels, &corpus.source_vocab, &source, config)?,
        side_labels(&config.target_labels, &corpus.target_vocab, &target, config)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildSummary {
    pub sentence_pairs: usize,
    pub records: usize,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).map_err(|e| Error::io(path, e))?,
    ))
}

/// Runs the whole build and writes the phrase table, count table, class
/// maps, vocabularies and manifest into `config.output`.
pub fn run_build(config: &RunConfig) -> Result<BuildSummary> {
    config.validate()?;
    let full = load_parallel_corpus(&config.source, &config.target, &config.alignment)?;
    let corpus = full.prefix(config.subsample)?;
    log::info!("{} of {} sentence pairs", corpus.len(), full.len());
    let maps = label_maps(config, &corpus)?;
    let models = build_models(&corpus, &maps, config.max_len, config.weighting);

    let out = &config.output;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let path = out.join(COUNTS_FILE);
    models
        .table
        .write_dump(&corpus.source_vocab, &corpus.target_vocab, create(&path)?)
        .map_err(|e| Error::io(&path, e))?;
    for (name, map, vocab) in [
        ("classes.src.txt", &maps.source, &corpus.source_vocab),
        ("classes.tgt.txt", &maps.target, &corpus.target_vocab),
    ] {
        let path = out.join(name);
        map.write_dump(vocab, create(&path)?)
            .map_err(|e| Error::io(&path, e))?;
    }
    for (name, vocab) in [
        ("vocab.src.txt", &corpus.source_vocab),
        ("vocab.tgt.txt", &corpus.target_vocab),
    ] {
        let path = out.join(name);
        vocab
            .write_dump(create(&path)?)
            .map_err(|e| Error::io(&path, e))?;
    }
    let records = emit_table(
        &models.scored,
        &corpus.source_vocab,
        &corpus.target_vocab,
        config.features,
        &out.join(PHRASE_TABLE_FILE),
    )?;
    emit_manifest(config, &out.join(MANIFEST_FILE))?;
    Ok(BuildSummary {
        sentence_pairs: corpus.len(),
        records,
    })
}
