mod common;

use std::collections::{HashMap, HashSet};

use common::{corpus_from_lines, labels, random_corpus, random_labels};
use phrasmooth::clustering::LabelMap;
use phrasmooth::extraction::{accumulate, PhraseCountTable};
use phrasmooth::smoothing::{
    build_generalized_tables, lexicon_probs, p_std, score_table, Direction, GeneralizedToken as G,
    LabelMaps, Weighting,
};
use phrasmooth::ParallelCorpus;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Key = (Vec<G>, Vec<G>);

/// Generalized count tables recomputed from their definition, written in
/// source/target terms for one direction at a time.
struct Regrouped {
    all_pair: HashMap<Key, u64>,
    all_given: HashMap<Vec<G>, u64>,
    each_pair: HashMap<Key, u64>,
    each_given: HashMap<Vec<G>, u64>,
}

fn lift(phrase: &[u32], map: &LabelMap, positions: &[usize]) -> Vec<G> {
    phrase
        .iter()
        .enumerate()
        .map(|(p, &w)| {
            if positions.contains(&p) {
                G::Class(map.class_of(w))
            } else {
                G::Word(w)
            }
        })
        .collect()
}

fn regroup(table: &PhraseCountTable, maps: &LabelMaps, dir: Direction) -> Regrouped {
    let mut r = Regrouped {
        all_pair: HashMap::new(),
        all_given: HashMap::new(),
        each_pair: HashMap::new(),
        each_given: HashMap::new(),
    };
    let mut forms: HashSet<(Vec<u32>, Vec<usize>)> = HashSet::new();
    for (pair, n) in table.canonical_pairs() {
        let links: Vec<(usize, usize)> = match dir {
            Direction::SourceGivenTarget => pair
                .align
                .iter()
                .map(|&(j, i)| (j as usize, i as usize))
                .collect(),
            Direction::TargetGivenSource => pair
                .align
                .iter()
                .map(|&(j, i)| (i as usize, j as usize))
                .collect(),
        };
        let (pred, given, pm, gm) = match dir {
            Direction::SourceGivenTarget => (&pair.src, &pair.tgt, &maps.source, &maps.target),
            Direction::TargetGivenSource => (&pair.tgt, &pair.src, &maps.target, &maps.source),
        };
        let every_p: Vec<usize> = (0..pred.len()).collect();
        let every_g: Vec<usize> = (0..given.len()).collect();
        *r.all_pair
            .entry((lift(pred, pm, &every_p), lift(given, gm, &every_g)))
            .or_default() += n;
        for j in 0..pred.len() {
            let mut a: Vec<usize> = links.iter().filter(|l| l.0 == j).map(|l| l.1).collect();
            a.sort_unstable();
            *r.each_pair
                .entry((lift(pred, pm, &[j]), lift(given, gm, &a)))
                .or_default() += n;
            forms.insert((given.clone(), a));
        }
    }
    let (given_totals, gm) = match dir {
        Direction::SourceGivenTarget => (&table.tgt_count, &maps.target),
        Direction::TargetGivenSource => (&table.src_count, &maps.source),
    };
    for (phrase, &n) in given_totals {
        let every: Vec<usize> = (0..phrase.len()).collect();
        *r.all_given.entry(lift(phrase, gm, &every)).or_default() += n;
    }
    for (phrase, a) in forms {
        *r.each_given.entry(lift(&phrase, gm, &a)).or_default() += given_totals[&phrase];
    }
    r
}

fn random_setting(rng: &mut ChaCha8Rng) -> (ParallelCorpus, PhraseCountTable, LabelMaps) {
    let corpus = random_corpus(rng, 50, 30, 7);
    let table = accumulate(&corpus.pairs, 4);
    let ks = rng.gen_range(1..6);
    let kt = rng.gen_range(1..6);
    let maps = LabelMaps::new(
        random_labels(rng, corpus.source_vocab.len(), ks),
        random_labels(rng, corpus.target_vocab.len(), kt),
    );
    (corpus, table, maps)
}

#[test]
fn tables_match_regrouping_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..40 {
        let (_, table, maps) = random_setting(&mut rng);
        let gt = build_generalized_tables(&table, &maps);
        for dir in Direction::BOTH {
            let oracle = regroup(&table, &maps, dir);
            let got = gt.direction(dir);
            assert_eq!(got.all_pair, oracle.all_pair);
            assert_eq!(got.all_given, oracle.all_given);
            assert_eq!(got.each_pair, oracle.each_pair);
            assert_eq!(got.each_given, oracle.each_given);
        }
    }
}

#[test]
fn identity_labels_reduce_to_relative_frequency() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..30 {
        let corpus = random_corpus(&mut rng, 50, 30, 7);
        let table = accumulate(&corpus.pairs, 7);
        let maps = LabelMaps::identity(corpus.source_vocab.len(), corpus.target_vocab.len());
        let gt = build_generalized_tables(&table, &maps);
        for (pair, _) in table.canonical_pairs() {
            for dir in Direction::BOTH {
                let std = p_std(&pair.src, &pair.tgt, &table, dir).unwrap();
                assert_eq!(gt.p_all(&pair.src, &pair.tgt, dir).unwrap(), std);
                for weighting in [Weighting::CountNormalized, Weighting::Uniform] {
                    assert!((gt.p_each(&pair, dir, weighting).unwrap() - std).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn weights_and_map_all_are_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..30 {
        let (corpus, table, maps) = random_setting(&mut rng);
        let gt = build_generalized_tables(&table, &maps);
        for dir in Direction::BOTH {
            let counts = gt.direction(dir);
            let mut mass: HashMap<&Vec<G>, f64> = HashMap::new();
            for ((_, given), &n) in &counts.all_pair {
                *mass.entry(given).or_default() += n as f64 / counts.all_given[given] as f64;
            }
            assert_eq!(mass.len(), counts.all_given.len());
            for total in mass.values() {
                assert!((total - 1.0).abs() <= 1e-9);
            }
            for (pair, _) in table.canonical_pairs() {
                for weighting in [Weighting::CountNormalized, Weighting::Uniform] {
                    let w: f64 = gt.weights(&pair, dir, weighting).unwrap().iter().sum();
                    assert!((w - 1.0).abs() <= 1e-12);
                }
            }
        }
        let lexicon = lexicon_probs(&corpus.pairs, &maps);
        for scored in score_table(&table, &gt, &lexicon, Weighting::CountNormalized) {
            let s = scored.scores;
            for v in [
                s.p_std_s2t,
                s.p_std_t2s,
                s.p_all_s2t,
                s.p_all_t2s,
                s.p_each_s2t,
                s.p_each_t2s,
                s.lex_s2t,
                s.lex_t2s,
                s.lex_all_s2t,
                s.lex_all_t2s,
            ] {
                assert!(v > 0.0 && v <= 1.0 + 1e-12, "{v}");
            }
        }
    }
}

#[test]
fn generalized_counts_dominate_pair_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..30 {
        let (_, table, maps) = random_setting(&mut rng);
        let gt = build_generalized_tables(&table, &maps);
        for (pair, n) in table.canonical_pairs() {
            for dir in Direction::BOTH {
                for term in gt
                    .each_terms(&pair, dir, Weighting::CountNormalized)
                    .unwrap()
                {
                    assert!(term.pair_count >= n);
                    assert!(term.pair_count <= term.given_count);
                }
            }
        }
    }
}

#[test]
fn single_label_keys_depend_only_on_lengths() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let corpus = random_corpus(&mut rng, 50, 30, 7);
    let table = accumulate(&corpus.pairs, 4);
    let one = |n: usize| LabelMap::new(vec![0; n], 1).unwrap();
    let maps = LabelMaps::new(
        one(corpus.source_vocab.len()),
        one(corpus.target_vocab.len()),
    );
    let gt = build_generalized_tables(&table, &maps);
    let shapes: HashSet<(usize, usize)> = table
        .pairs
        .keys()
        .map(|(s, t)| (s.len(), t.len()))
        .collect();
    for dir in Direction::BOTH {
        assert_eq!(gt.direction(dir).all_pair.len(), shapes.len());
    }
}

#[test]
fn coarser_labels_never_lower_generalized_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..20 {
        let (_, table, fine) = random_setting(&mut rng);
        let merge = |m: &LabelMap| {
            LabelMap::new(
                m.assignment().iter().map(|&c| c / 2).collect(),
                m.num_classes().div_ceil(2),
            )
            .unwrap()
        };
        let coarse = LabelMaps::new(merge(&fine.source), merge(&fine.target));
        let gf = build_generalized_tables(&table, &fine);
        let gc = build_generalized_tables(&table, &coarse);
        for (pair, _) in table.canonical_pairs() {
            for dir in Direction::BOTH {
                let tf = gf
                    .each_terms(&pair, dir, Weighting::CountNormalized)
                    .unwrap();
                let tc = gc
                    .each_terms(&pair, dir, Weighting::CountNormalized)
                    .unwrap();
                for (f, c) in tf.iter().zip(&tc) {
                    assert!(c.pair_count >= f.pair_count && c.given_count >= f.given_count);
                }
            }
        }
    }
}

/// Three-word pair whose first source word aligns to the first target word,
/// whose second is unaligned and whose third aligns to the last two.
fn three_word_corpus() -> (ParallelCorpus, LabelMaps) {
    let corpus = corpus_from_lines(&[
        "f1 f2 f3 ||| e1 e2 e3 ||| 0-0 2-1 2-2",
        "f1 f2 f3 ||| e1 e2 e3 ||| 0-0 2-1 2-2",
        "f4 f2 f3 ||| e4 e2 e3 ||| 0-0 2-1 2-2",
        "f4 f2 f3 ||| e4 e2 e3 ||| 0-0 2-1 2-2",
        "f1 f2 f5 ||| e1 e5 e3 ||| 0-0 2-1 2-2",
        "f1 f6 f3 ||| e1 e2 e3 ||| 0-0 2-1 2-2",
    ]);
    let source = labels(
        &corpus.source_vocab,
        &[
            ("f1", 0),
            ("f4", 0),
            ("f2", 1),
            ("f6", 1),
            ("f3", 2),
            ("f5", 2),
        ],
    );
    let target = labels(
        &corpus.target_vocab,
        &[("e1", 0), ("e4", 0), ("e2", 1), ("e5", 1), ("e3", 2)],
    );
    (corpus, LabelMaps::new(source, target))
}

#[test]
fn map_each_expansion() {
    let (corpus, maps) = three_word_corpus();
    let table = accumulate(&corpus.pairs, 3);
    let gt = build_generalized_tables(&table, &maps);
    let src = corpus.pairs[0].source.clone();
    let pair = table
        .canonical_pairs()
        .into_iter()
        .find(|(p, _)| p.src == src && p.tgt == corpus.pairs[0].target)
        .unwrap()
        .0;
    let terms = gt
        .each_terms(
            &pair,
            Direction::SourceGivenTarget,
            Weighting::CountNormalized,
        )
        .unwrap();
    let counts: Vec<(Vec<usize>, u64, u64)> = terms
        .iter()
        .map(|t| (t.aligned.clone(), t.pair_count, t.given_count))
        .collect();
    assert_eq!(
        counts,
        vec![(vec![0], 4, 5), (vec![], 3, 3), (vec![1, 2], 3, 4)]
    );
    let expected =
        (4.0 / 10.0) * (4.0 / 5.0) + (3.0 / 10.0) * (3.0 / 3.0) + (3.0 / 10.0) * (3.0 / 4.0);
    let got = gt
        .p_each(
            &pair,
            Direction::SourceGivenTarget,
            Weighting::CountNormalized,
        )
        .unwrap();
    assert_eq!(got, expected);
}

#[test]
fn rarer_word_position_gets_larger_weight() {
    let mut lines = vec!["f1 f2 ||| e1 e2 ||| 0-0 1-1"];
    lines.extend(["f3 f2 ||| e3 e2 ||| 0-0 1-1"; 5]);
    lines.extend(["f4 f2 ||| e4 e2 ||| 0-0 1-1"; 3]);
    let corpus = corpus_from_lines(&lines);
    let maps = LabelMaps::new(
        labels(
            &corpus.source_vocab,
            &[("f1", 0), ("f3", 0), ("f4", 0), ("f2", 1)],
        ),
        labels(
            &corpus.target_vocab,
            &[("e1", 0), ("e3", 0), ("e4", 0), ("e2", 1)],
        ),
    );
    let table = accumulate(&corpus.pairs, 2);
    let gt = build_generalized_tables(&table, &maps);
    let (pair, _) = table
        .canonical_pairs()
        .into_iter()
        .find(|(p, _)| p.src == corpus.pairs[0].source && p.tgt == corpus.pairs[0].target)
        .unwrap();
    let w = gt
        .weights(
            &pair,
            Direction::SourceGivenTarget,
            Weighting::CountNormalized,
        )
        .unwrap();
    assert_eq!(w, vec![9.0 / 10.0, 1.0 / 10.0]);
}

#[test]
fn scoring_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let (corpus, table, maps) = random_setting(&mut rng);
    let run = || {
        let gt = build_generalized_tables(&table, &maps);
        score_table(
            &table,
            &gt,
            &lexicon_probs(&corpus.pairs, &maps),
            Weighting::CountNormalized,
        )
    };
    assert_eq!(run(), run());
}
