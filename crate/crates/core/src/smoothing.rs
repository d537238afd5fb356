//! Phrase translation scores smoothed by vocabulary reduction.
//!
//! Given a word -> label map per side, two smoothed estimates of the phrase
//! translation probability are computed next to the relative frequency
//! `p_std(f|e) = N(f,e) / N(e)`:
//!
//! * map-all replaces every word of both phrases by its label:
//!   `p_all(f|e) = N(c(f), c(e)) / N(c(e))`.
//! * map-each replaces one source word `f_j` at a time together with the
//!   target words `a_j` aligned to it, and averages the resulting ratios:
//!   `p_each(f|e) = sum_j w_j N(c^j(f), c^{a_j}(e)) / N(c^{a_j}(e))`, with
//!   `w_j` the generalized pair count normalized over `j`.
//!
//! The target-to-source direction mirrors both by swapping the roles of the
//! two sides (map-each then iterates target positions).

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::clustering::{ClassId, LabelMap};
use crate::corpus::{AlignedSentencePair, WordId};
use crate::extraction::{aligned_targets, PhraseCountTable, PhrasePair};

/// A phrase token that is either a literal word or a label. The two
/// namespaces never compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneralizedToken {
    Word(WordId),
    Class(ClassId),
}

pub type GeneralizedPhrase = Vec<GeneralizedToken>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// p(source | target)
    SourceGivenTarget,
    /// p(target | source)
    TargetGivenSource,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::SourceGivenTarget, Direction::TargetGivenSource];
}

/// How map-each combines its per-position ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Weighting {
    /// w_j proportional to the generalized pair count.
    #[default]
    CountNormalized,
    /// w_j = 1 / |f|.
    Uniform,
}

impl Weighting {
    pub fn name(&self) -> &'static str {
        match self {
            Weighting::CountNormalized => "count-normalized",
            Weighting::Uniform => "uniform",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "count-normalized" => Some(Weighting::CountNormalized),
            "uniform" => Some(Weighting::Uniform),
            _ => None,
        }
    }
}

/// Source- and target-side label maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMaps {
    pub source: LabelMap,
    pub target: LabelMap,
}

impl LabelMaps {
    pub fn new(source: LabelMap, target: LabelMap) -> Self {
        Self { source, target }
    }

    pub fn identity(source_vocab: usize, target_vocab: usize) -> Self {
        Self::new(
            LabelMap::identity(source_vocab),
            LabelMap::identity(target_vocab),
        )
    }
}

/// Replaces the listed positions of `phrase` by their labels.
pub fn generalize_side(
    phrase: &[WordId],
    positions: &[usize],
    map: &LabelMap,
) -> GeneralizedPhrase {
    let mut out: GeneralizedPhrase = phrase.iter().map(|&w| GeneralizedToken::Word(w)).collect();
    for &p in positions {
        out[p] = GeneralizedToken::Class(map.class_of(phrase[p]));
    }
    out
}

/// Generalizes a phrase pair at the given source and target positions.
pub fn generalize(
    src: &[WordId],
    tgt: &[WordId],
    positions_src: &[usize],
    positions_tgt: &[usize],
    maps: &LabelMaps,
) -> (GeneralizedPhrase, GeneralizedPhrase) {
    (
        generalize_side(src, positions_src, &maps.source),
        generalize_side(tgt, positions_tgt, &maps.target),
    )
}

fn all_positions(phrase: &[WordId]) -> Vec<usize> {
    (0..phrase.len()).collect()
}

/// A phrase pair seen from one translation direction: the predicted side,
/// the conditioning side, and links as (predicted, conditioning) positions.
struct Oriented<'a> {
    predicted: &'a [WordId],
    given: &'a [WordId],
    align: Vec<(u32, u32)>,
    predicted_map: &'a LabelMap,
    given_map: &'a LabelMap,
}

fn orient<'a>(
    src: &'a [WordId],
    tgt: &'a [WordId],
    align: &[(u32, u32)],
    maps: &'a LabelMaps,
    dir: Direction,
) -> Oriented<'a> {
    match dir {
        Direction::SourceGivenTarget => Oriented {
            predicted: src,
            given: tgt,
            align: align.to_vec(),
            predicted_map: &maps.source,
            given_map: &maps.target,
        },
        Direction::TargetGivenSource => {
            let mut flipped: Vec<(u32, u32)> = align.iter().map(|&(j, i)| (i, j)).collect();
            flipped.sort_unstable();
            Oriented {
                predicted: tgt,
                given: src,
                align: flipped,
                predicted_map: &maps.target,
                given_map: &maps.source,
            }
        }
    }
}

impl Oriented<'_> {
    fn all_key(&self) -> (GeneralizedPhrase, GeneralizedPhrase) {
        (
            generalize_side(
                self.predicted,
                &all_positions(self.predicted),
                self.predicted_map,
            ),
            generalize_side(self.given, &all_positions(self.given), self.given_map),
        )
    }

    /// Key for generalizing predicted position `j` and its aligned positions.
    fn each_key(&self, j: usize) -> (GeneralizedPhrase, GeneralizedPhrase, Vec<usize>) {
        let aligned = aligned_targets(&self.align, j);
        let predicted = generalize_side(self.predicted, &[j], self.predicted_map);
        let given = generalize_side(self.given, &aligned, self.given_map);
        (predicted, given, aligned)
    }
}

/// Generalized counts for one direction. Keys are (predicted, conditioning).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirectionalCounts {
    pub all_pair: HashMap<(GeneralizedPhrase, GeneralizedPhrase), u64>,
    pub all_given: HashMap<GeneralizedPhrase, u64>,
    pub all_predicted: HashMap<GeneralizedPhrase, u64>,
    pub each_pair: HashMap<(GeneralizedPhrase, GeneralizedPhrase), u64>,
    pub each_given: HashMap<GeneralizedPhrase, u64>,
}

/// Count tables behind map-all and map-each in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedCountTables {
    pub maps: LabelMaps,
    pub s2t: DirectionalCounts,
    pub t2s: DirectionalCounts,
}

fn build_direction(
    table: &PhraseCountTable,
    maps: &LabelMaps,
    dir: Direction,
) -> DirectionalCounts {
    let mut counts = DirectionalCounts::default();
    let (given_totals, predicted_totals) = match dir {
        Direction::SourceGivenTarget => (&table.tgt_count, &table.src_count),
        Direction::TargetGivenSource => (&table.src_count, &table.tgt_count),
    };
    // Distinct (conditioning phrase, generalized positions) forms.
    let mut given_forms: HashSet<(&Vec<WordId>, Vec<usize>)> = HashSet::new();

    for ((src, tgt), stats) in &table.pairs {
        let n = stats.count;
        let view = orient(src, tgt, stats.canonical_align(), maps, dir);
        *counts.all_pair.entry(view.all_key()).or_insert(0) += n;
        for j in 0..view.predicted.len() {
            let (predicted, given, aligned) = view.each_key(j);
            *counts.each_pair.entry((predicted, given)).or_insert(0) += n;
            let given_phrase = match dir {
                Direction::SourceGivenTarget => tgt,
                Direction::TargetGivenSource => src,
            };
            given_forms.insert((given_phrase, aligned));
        }
    }

    let (given_map, predicted_map) = match dir {
        Direction::SourceGivenTarget => (&maps.target, &maps.source),
        Direction::TargetGivenSource => (&maps.source, &maps.target),
    };
    for (phrase, &n) in given_totals {
        *counts
            .all_given
            .entry(generalize_side(phrase, &all_positions(phrase), given_map))
            .or_insert(0) += n;
    }
    for (phrase, &n) in predicted_totals {
        *counts
            .all_predicted
            .entry(generalize_side(
                phrase,
                &all_positions(phrase),
                predicted_map,
            ))
            .or_insert(0) += n;
    }
    for (phrase, positions) in given_forms {
        *counts
            .each_given
            .entry(generalize_side(phrase, &positions, given_map))
            .or_insert(0) += given_totals[phrase];
    }
    counts
}

/// Builds the generalized count tables for both directions.
pub fn build_generalized_tables(
    table: &PhraseCountTable,
    maps: &LabelMaps,
) -> GeneralizedCountTables {
    let (s2t, t2s) = rayon::join(
        || build_direction(table, maps, Direction::SourceGivenTarget),
        || build_direction(table, maps, Direction::TargetGivenSource),
    );
    GeneralizedCountTables {
        maps: maps.clone(),
        s2t,
        t2s,
    }
}

/// Relative frequency `N(f,e)/N(e)` (or `N(f,e)/N(f)`); `None` for unseen pairs.
pub fn p_std(
    src: &[WordId],
    tgt: &[WordId],
    table: &PhraseCountTable,
    dir: Direction,
) -> Option<f64> {
    let joint = table.pair_count(src, tgt)?;
    let marginal = match dir {
        Direction::SourceGivenTarget => table.tgt_count.get(tgt)?,
        Direction::TargetGivenSource => table.src_count.get(src)?,
    };
    Some(joint as f64 / *marginal as f64)
}

/// One summand of the map-each score.
#[derive(Debug, Clone, PartialEq)]
pub struct EachTerm {
    /// Predicted-side position being generalized.
    pub position: usize,
    /// Conditioning-side positions generalized along with it.
    pub aligned: Vec<usize>,
    pub pair_count: u64,
    pub given_count: u64,
    pub weight: f64,
}

impl EachTerm {
    pub fn ratio(&self) -> f64 {
        self.pair_count as f64 / self.given_count as f64
    }
}

impl GeneralizedCountTables {
    pub fn direction(&self, dir: Direction) -> &DirectionalCounts {
        match dir {
            Direction::SourceGivenTarget => &self.s2t,
            Direction::TargetGivenSource => &self.t2s,
        }
    }

    /// map-all score; `None` when the generalized pair was never counted.
    pub fn p_all(&self, src: &[WordId], tgt: &[WordId], dir: Direction) -> Option<f64> {
        let view = orient(src, tgt, &[], &self.maps, dir);
        let key = view.all_key();
        let counts = self.direction(dir);
        let joint = *counts.all_pair.get(&key)?;
        let marginal = *counts.all_given.get(&key.1)?;
        Some(joint as f64 / marginal as f64)
    }

    /// Per-position summands of map-each for a pair with its canonical
    /// alignment; `None` when any generalized key is missing.
    pub fn each_terms(
        &self,
        pair: &PhrasePair,
        dir: Direction,
        weighting: Weighting,
    ) -> Option<Vec<EachTerm>> {
        let view = orient(&pair.src, &pair.tgt, &pair.align, &self.maps, dir);
        let counts = self.direction(dir);
        let mut terms = Vec::with_capacity(view.predicted.len());
        for j in 0..view.predicted.len() {
            let (predicted, given, aligned) = view.each_key(j);
            let given_count = *counts.each_given.get(&given)?;
            let pair_count = *counts.each_pair.get(&(predicted, given))?;
            terms.push(EachTerm {
                position: j,
                aligned,
                pair_count,
                given_count,
                weight: 0.0,
            });
        }
        if terms.is_empty() {
            return None;
        }
        match weighting {
            Weighting::CountNormalized => {
                let total: u64 = terms.iter().map(|t| t.pair_count).sum();
                for t in &mut terms {
                    t.weight = t.pair_count as f64 / total as f64;
                }
            }
            Weighting::Uniform => {
                let w = 1.0 / terms.len() as f64;
                for t in &mut terms {
                    t.weight = w;
                }
            }
        }
        Some(terms)
    }

    /// Map-each weights `w_j`, summing to one.
    pub fn weights(
        &self,
        pair: &PhrasePair,
        dir: Direction,
        weighting: Weighting,
    ) -> Option<Vec<f64>> {
        Some(
            self.each_terms(pair, dir, weighting)?
                .iter()
                .map(|t| t.weight)
                .collect(),
        )
    }

    /// map-each score.
    pub fn p_each(&self, pair: &PhrasePair, dir: Direction, weighting: Weighting) -> Option<f64> {
        let terms = self.each_terms(pair, dir, weighting)?;
        Some(terms.iter().map(|t| t.weight * t.ratio()).sum())
    }
}

/// Relative-frequency table over aligned token events. `None` stands for
/// the empty word that unaligned tokens pair with.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LexTable {
    pub joint: HashMap<(Option<u32>, Option<u32>), u64>,
    pub src_marginal: HashMap<Option<u32>, u64>,
    pub tgt_marginal: HashMap<Option<u32>, u64>,
}

impl LexTable {
    fn add(&mut self, f: Option<u32>, e: Option<u32>) {
        *self.joint.entry((f, e)).or_insert(0) += 1;
        *self.src_marginal.entry(f).or_insert(0) += 1;
        *self.tgt_marginal.entry(e).or_insert(0) += 1;
    }

    /// p(f | e)
    pub fn src_given_tgt(&self, f: Option<u32>, e: Option<u32>) -> Option<f64> {
        let joint = *self.joint.get(&(f, e))?;
        Some(joint as f64 / self.tgt_marginal[&e] as f64)
    }

    /// p(e | f)
    pub fn tgt_given_src(&self, e: Option<u32>, f: Option<u32>) -> Option<f64> {
        let joint = *self.joint.get(&(f, e))?;
        Some(joint as f64 / self.src_marginal[&f] as f64)
    }

    pub fn prob(&self, predicted: Option<u32>, given: Option<u32>, dir: Direction) -> Option<f64> {
        match dir {
            Direction::SourceGivenTarget => self.src_given_tgt(predicted, given),
            Direction::TargetGivenSource => self.tgt_given_src(predicted, given),
        }
    }
}

/// Word lexicon and its label-level counterpart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub word: LexTable,
    pub class: LexTable,
}

/// Counts aligned word events (and empty-word events for unaligned tokens)
/// at word and label level.
pub fn lexicon_probs(corpus: &[AlignedSentencePair], maps: &LabelMaps) -> Lexicon {
    let mut word = LexTable::default();
    let mut class = LexTable::default();
    for pair in corpus {
        let mut src_aligned = vec![false; pair.source.len()];
        let mut tgt_aligned = vec![false; pair.target.len()];
        for &(j, i) in &pair.links {
            src_aligned[j as usize] = true;
            tgt_aligned[i as usize] = true;
            let (f, e) = (pair.source[j as usize], pair.target[i as usize]);
            word.add(Some(f), Some(e));
            class.add(Some(maps.source.class_of(f)), Some(maps.target.class_of(e)));
        }
        for (j, _) in src_aligned.iter().enumerate().filter(|(_, &a)| !a) {
            let f = pair.source[j];
            word.add(Some(f), None);
            class.add(Some(maps.source.class_of(f)), None);
        }
        for (i, _) in tgt_aligned.iter().enumerate().filter(|(_, &a)| !a) {
            let e = pair.target[i];
            word.add(None, Some(e));
            class.add(None, Some(maps.target.class_of(e)));
        }
    }
    Lexicon { word, class }
}

/// Phrase-level lexical weight: per predicted position, the mean lexicon
/// probability over its aligned positions, or the empty-word probability
/// when unaligned; multiplied over positions.
pub fn lexical_weight(
    src: &[u32],
    tgt: &[u32],
    align: &[(u32, u32)],
    lex: &LexTable,
    dir: Direction,
) -> Option<f64> {
    let (predicted, given, links): (&[u32], &[u32], Vec<(u32, u32)>) = match dir {
        Direction::SourceGivenTarget => (src, tgt, align.to_vec()),
        Direction::TargetGivenSource => (tgt, src, align.iter().map(|&(j, i)| (i, j)).collect()),
    };
    let mut weight = 1.0;
    for (p, &token) in predicted.iter().enumerate() {
        let aligned = aligned_targets(&links, p);
        let factor = if aligned.is_empty() {
            lex.prob(Some(token), None, dir)?
        } else {
            let mut sum = 0.0;
            for &g in &aligned {
                sum += lex.prob(Some(token), Some(given[g]), dir)?;
            }
            sum / aligned.len() as f64
        };
        weight *= factor;
    }
    Some(weight)
}

fn map_tokens(tokens: &[WordId], map: &LabelMap) -> Vec<u32> {
    tokens.iter().map(|&w| map.class_of(w)).collect()
}

/// All feature values for one phrase pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedScores {
    pub p_std_s2t: f64,
    pub p_std_t2s: f64,
    pub p_all_s2t: f64,
    pub p_all_t2s: f64,
    pub p_each_s2t: f64,
    pub p_each_t2s: f64,
    pub lex_s2t: f64,
    pub lex_t2s: f64,
    pub lex_all_s2t: f64,
    pub lex_all_t2s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPair {
    pub pair: PhrasePair,
    pub count: u64,
    pub scores: SmoothedScores,
}

/// Scores every pair of the count table. Output follows the id order of
/// [`PhraseCountTable::canonical_pairs`].
pub fn score_table(
    table: &PhraseCountTable,
    gt: &GeneralizedCountTables,
    lexicon: &Lexicon,
    weighting: Weighting,
) -> Vec<ScoredPair> {
    let pairs = table.canonical_pairs();
    pairs
        .into_par_iter()
        .map(|(pair, count)| {
            let missing = "scored pair must be present in its own tables";
            let std = |d| p_std(&pair.src, &pair.tgt, table, d).expect(missing);
            let all = |d| gt.p_all(&pair.src, &pair.tgt, d).expect(missing);
            let each = |d| gt.p_each(&pair, d, weighting).expect(missing);
            let lex = |d| {
                lexical_weight(&pair.src, &pair.tgt, &pair.align, &lexicon.word, d).expect(missing)
            };
            let src_classes = map_tokens(&pair.src, &gt.maps.source);
            let tgt_classes = map_tokens(&pair.tgt, &gt.maps.target);
            let lex_all = |d| {
                lexical_weight(&src_classes, &tgt_classes, &pair.align, &lexicon.class, d)
                    .expect(missing)
            };
            use Direction::*;
            let scores = SmoothedScores {
                p_std_s2t: std(SourceGivenTarget),
                p_std_t2s: std(TargetGivenSource),
                p_all_s2t: all(SourceGivenTarget),
                p_all_t2s: all(TargetGivenSource),
                p_each_s2t: each(SourceGivenTarget),
                p_each_t2s: each(TargetGivenSource),
                lex_s2t: lex(SourceGivenTarget),
                lex_t2s: lex(TargetGivenSource),
                lex_all_s2t: lex_all(SourceGivenTarget),
                lex_all_t2s: lex_all(TargetGivenSource),
            };
            ScoredPair {
                pair,
                count,
                scores,
            }
        })
        .collect()
}
