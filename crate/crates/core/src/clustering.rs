//! Monolingual word clustering by the exchange algorithm.
//!
//! The objective is the log-likelihood of a class bigram model with word
//! emissions:
//!
//! ```text
//! L = sum over events [ ln p(c(w_i) | c(w_{i-1})) + ln p(w_i | c(w_i)) ]
//! ```
//!
//! with maximum-likelihood estimates. A boundary class (not counted among
//! the `K` classes) precedes every sentence. Writing `f(x) = x ln x`, the
//! objective decomposes into count terms
//!
//! ```text
//! L = sum_{k,k'} f(N(k,k')) - sum_k f(H(k)) + sum_w f(N(w)) - sum_k f(N(k))
//! ```
//!
//! where `H(k)` counts bigram events with history `k`. Only rows and columns
//! of the source and destination class change when a word moves, which is
//! what makes exchange moves cheap to evaluate.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Vocabulary, WordId};
use crate::error::{Error, Result};

pub type ClassId = u32;

/// Moves whose gain does not exceed this are treated as non-improving.
const MIN_GAIN: f64 = 1e-10;

/// Hard word -> class assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelMap {
    assignment: Vec<ClassId>,
    num_classes: usize,
}

impl LabelMap {
    pub fn new(assignment: Vec<ClassId>, num_classes: usize) -> Result<Self> {
        if let Some(&bad) = assignment.iter().find(|&&c| c as usize >= num_classes) {
            return Err(Error::Config(format!(
                "class id {bad} out of range for {num_classes} classes"
            )));
        }
        Ok(Self {
            assignment,
            num_classes,
        })
    }

    /// Every word in its own class.
    pub fn identity(vocab_size: usize) -> Self {
        Self {
            assignment: (0..vocab_size as ClassId).collect(),
            num_classes: vocab_size,
        }
    }

    pub fn class_of(&self, word: WordId) -> ClassId {
        self.assignment[word as usize]
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn num_words(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[ClassId] {
        &self.assignment
    }

    /// Number of words per class.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_classes];
        for &c in &self.assignment {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Applies a permutation of class ids: class `k` becomes `perm[k]`.
    pub fn relabeled(&self, perm: &[ClassId]) -> Self {
        Self {
            assignment: self.assignment.iter().map(|&c| perm[c as usize]).collect(),
            num_classes: self.num_classes,
        }
    }

    /// The partition as sorted word lists, independent of class numbering.
    pub fn partition(&self) -> Vec<Vec<WordId>> {
        let mut groups: Vec<Vec<WordId>> = vec![Vec::new(); self.num_classes];
        for (w, &c) in self.assignment.iter().enumerate() {
            groups[c as usize].push(w as WordId);
        }
        groups.retain(|g| !g.is_empty());
        groups.sort();
        groups
    }

    fn set(&mut self, word: WordId, class: ClassId) {
        self.assignment[word as usize] = class;
    }

    /// Writes `word<TAB>class-id` lines in vocabulary order.
    pub fn write_dump<W: Write>(&self, vocab: &Vocabulary, mut w: W) -> std::io::Result<()> {
        for (id, token) in vocab.iter() {
            writeln!(w, "{}\t{}", token, self.class_of(id))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitMethod {
    Random { seed: u64 },
    TopFrequent,
    SameCountSum,
    SameWordCount,
    CountBins,
}

impl InitMethod {
    pub const NAMES: [&'static str; 5] = [
        "random",
        "top-frequent",
        "same-countsum",
        "same-#words",
        "count-bins",
    ];

    /// Parses a method name; `seed` is only used by `random`.
    pub fn parse(name: &str, seed: u64) -> Result<Self> {
        Ok(match name {
            "random" => InitMethod::Random { seed },
            "top-frequent" => InitMethod::TopFrequent,
            "same-countsum" => InitMethod::SameCountSum,
            "same-#words" | "same-words" => InitMethod::SameWordCount,
            "count-bins" => InitMethod::CountBins,
            other => {
                return Err(Error::Config(format!(
                    "unknown init method `{other}` (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            InitMethod::Random { .. } => "random",
            InitMethod::TopFrequent => "top-frequent",
            InitMethod::SameCountSum => "same-countsum",
            InitMethod::SameWordCount => "same-#words",
            InitMethod::CountBins => "count-bins",
        }
    }
}

impl fmt::Display for InitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, 0)
    }
}

/// Words sorted by descending frequency, ties by ascending id.
fn by_frequency(freqs: &[u64]) -> Vec<WordId> {
    let mut order: Vec<WordId> = (0..freqs.len() as WordId).collect();
    order.sort_by(|&a, &b| freqs[b as usize].cmp(&freqs[a as usize]).then(a.cmp(&b)));
    order
}

/// Initial class assignment with no empty class.
pub fn init_classes(
    vocab: &Vocabulary,
    num_classes: usize,
    method: InitMethod,
) -> Result<LabelMap> {
    init_classes_from_counts(vocab.frequencies(), num_classes, method)
}

pub fn init_classes_from_counts(
    freqs: &[u64],
    num_classes: usize,
    method: InitMethod,
) -> Result<LabelMap> {
    let v = freqs.len();
    if num_classes == 0 || num_classes > v {
        return Err(Error::InvalidClassCount {
            classes: num_classes,
            vocab_size: v,
        });
    }
    let k = num_classes;
    let mut assignment = vec![0 as ClassId; v];
    match method {
        InitMethod::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for c in assignment.iter_mut() {
                *c = rng.gen_range(0..k as ClassId);
            }
            repair_empty_random(&mut assignment, k);
        }
        InitMethod::TopFrequent => {
            for (rank, w) in by_frequency(freqs).into_iter().enumerate() {
                assignment[w as usize] = rank.min(k - 1) as ClassId;
            }
        }
        InitMethod::SameCountSum => {
            let mut sums = vec![0u64; k];
            for w in by_frequency(freqs) {
                let (best, _) = sums
                    .iter()
                    .enumerate()
                    .min_by_key(|&(c, &s)| (s, c))
                    .expect("k >= 1");
                assignment[w as usize] = best as ClassId;
                sums[best] += freqs[w as usize];
            }
        }
        InitMethod::SameWordCount => {
            for (rank, w) in by_frequency(freqs).into_iter().enumerate() {
                assignment[w as usize] = (rank % k) as ClassId;
            }
        }
        InitMethod::CountBins => {
            let logs: Vec<f64> = freqs.iter().map(|&f| (f.max(1) as f64).ln()).collect();
            let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let width = (hi - lo) / k as f64;
            for (c, &l) in assignment.iter_mut().zip(&logs) {
                let bin = if width > 0.0 {
                    ((l - lo) / width).floor() as usize
                } else {
                    0
                };
                *c = bin.min(k - 1) as ClassId;
            }
            repair_empty_bins(&mut assignment, freqs, k);
        }
    }
    LabelMap::new(assignment, k)
}

fn members(assignment: &[ClassId], k: usize) -> Vec<Vec<WordId>> {
    let mut groups = vec![Vec::new(); k];
    for (w, &c) in assignment.iter().enumerate() {
        groups[c as usize].push(w as WordId);
    }
    groups
}

fn most_populous(groups: &[Vec<WordId>]) -> usize {
    groups
        .iter()
        .enumerate()
        .max_by(|(a, ga), (b, gb)| ga.len().cmp(&gb.len()).then(b.cmp(a)))
        .map(|(c, _)| c)
        .expect("k >= 1")
}

/// Moves one word (the highest id) from the largest class into each empty class.
fn repair_empty_random(assignment: &mut [ClassId], k: usize) {
    let mut groups = members(assignment, k);
    for empty in 0..k {
        if !groups[empty].is_empty() {
            continue;
        }
        let donor = most_populous(&groups);
        let w = groups[donor].pop().expect("largest class has >= 2 words");
        assignment[w as usize] = empty as ClassId;
        groups[empty].push(w);
    }
}

/// Splits the most populous bin at its median count into each empty bin.
fn repair_empty_bins(assignment: &mut [ClassId], freqs: &[u64], k: usize) {
    let mut groups = members(assignment, k);
    while let Some(empty) = groups.iter().position(|g| g.is_empty()) {
        let donor = most_populous(&groups);
        let mut words = std::mem::take(&mut groups[donor]);
        words.sort_by_key(|&w| (freqs[w as usize], w));
        let upper = words.split_off(words.len() / 2);
        for &w in &upper {
            assignment[w as usize] = empty as ClassId;
        }
        groups[donor] = words;
        groups[empty] = upper;
    }
}

/// Class bigram counts: rows are histories (including the boundary row),
/// columns are word classes.
#[derive(Debug, Clone, PartialEq)]
enum BigramCounts {
    Dense { cols: usize, cells: Vec<u64> },
    Sparse(HashMap<(u32, u32), u64>),
}

const DENSE_LIMIT: usize = 1 << 24;

impl BigramCounts {
    fn new(rows: usize, cols: usize) -> Self {
        if rows * cols <= DENSE_LIMIT {
            BigramCounts::Dense {
                cols,
                cells: vec![0; rows * cols],
            }
        } else {
            BigramCounts::Sparse(HashMap::new())
        }
    }

    fn get(&self, row: usize, col: usize) -> u64 {
        match self {
            BigramCounts::Dense { cols, cells } => cells[row * cols + col],
            BigramCounts::Sparse(map) => map.get(&(row as u32, col as u32)).copied().unwrap_or(0),
        }
    }

    fn add(&mut self, row: usize, col: usize, delta: i64) {
        match self {
            BigramCounts::Dense { cols, cells } => {
                let cell = &mut cells[row * *cols + col];
                *cell = cell
                    .checked_add_signed(delta)
                    .expect("bigram count underflow");
            }
            BigramCounts::Sparse(map) => {
                let cell = map.entry((row as u32, col as u32)).or_insert(0);
                *cell = cell
                    .checked_add_signed(delta)
                    .expect("bigram count underflow");
                if *cell == 0 {
                    map.remove(&(row as u32, col as u32));
                }
            }
        }
    }

    fn nonzero(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        match self {
            BigramCounts::Dense { cells, .. } => Box::new(cells.iter().copied().filter(|&c| c > 0)),
            BigramCounts::Sparse(map) => Box::new(map.values().copied()),
        }
    }
}

fn xlogx(x: u64) -> f64 {
    if x == 0 {
        0.0
    } else {
        let x = x as f64;
        x * x.ln()
    }
}

fn shifted_xlogx(x: u64, delta: i64) -> f64 {
    xlogx(x.checked_add_signed(delta).expect("count underflow"))
}

/// Word-level statistics of one corpus side; independent of the class map.
#[derive(Debug, Clone)]
struct WordStats {
    count: Vec<u64>,
    /// Times the word is followed by another token in its sentence.
    history: Vec<u64>,
    starts: Vec<u64>,
    self_loops: Vec<u64>,
    /// Successor words other than the word itself.
    succ: Vec<Vec<(WordId, u64)>>,
    /// Predecessor words other than the word itself (the boundary is in `starts`).
    pred: Vec<Vec<(WordId, u64)>>,
    sentences: u64,
    events: u64,
}

impl WordStats {
    fn collect(vocab_size: usize, sentences: &[Vec<WordId>]) -> Self {
        let mut count = vec![0; vocab_size];
        let mut history = vec![0; vocab_size];
        let mut starts = vec![0; vocab_size];
        let mut self_loops = vec![0; vocab_size];
        let mut bigrams: HashMap<(WordId, WordId), u64> = HashMap::new();
        let mut n_sentences = 0;
        let mut events = 0;
        for sentence in sentences {
            let Some(&first) = sentence.first() else {
                continue;
            };
            n_sentences += 1;
            starts[first as usize] += 1;
            for &w in sentence {
                count[w as usize] += 1;
                events += 1;
            }
            for pair in sentence.windows(2) {
                history[pair[0] as usize] += 1;
                if pair[0] == pair[1] {
                    self_loops[pair[0] as usize] += 1;
                } else {
                    *bigrams.entry((pair[0], pair[1])).or_insert(0) += 1;
                }
            }
        }
        let mut sorted: Vec<_> = bigrams.into_iter().collect();
        sorted.sort_unstable();
        let mut succ = vec![Vec::new(); vocab_size];
        let mut pred = vec![Vec::new(); vocab_size];
        for ((u, v), c) in sorted {
            succ[u as usize].push((v, c));
            pred[v as usize].push((u, c));
        }
        Self {
            count,
            history,
            starts,
            self_loops,
            succ,
            pred,
            sentences: n_sentences,
            events,
        }
    }
}

/// Per-word neighbor counts aggregated by the neighbor's current class.
#[derive(Debug, Default)]
struct NeighborClasses {
    succ: Vec<u64>,
    pred: Vec<u64>,
    succ_touched: Vec<usize>,
    pred_touched: Vec<usize>,
}

impl NeighborClasses {
    fn new(k: usize) -> Self {
        Self {
            succ: vec![0; k],
            pred: vec![0; k + 1],
            ..Default::default()
        }
    }

    fn load(&mut self, stats: &WordStats, map: &LabelMap, w: WordId, boundary: usize) {
        for &k in &self.succ_touched {
            self.succ[k] = 0;
        }
        for &k in &self.pred_touched {
            self.pred[k] = 0;
        }
        self.succ_touched.clear();
        self.pred_touched.clear();
        for &(v, c) in &stats.succ[w as usize] {
            let k = map.class_of(v) as usize;
            if self.succ[k] == 0 {
                self.succ_touched.push(k);
            }
            self.succ[k] += c;
        }
        for &(u, c) in &stats.pred[w as usize] {
            let k = map.class_of(u) as usize;
            if self.pred[k] == 0 {
                self.pred_touched.push(k);
            }
            self.pred[k] += c;
        }
        let starts = stats.starts[w as usize];
        if starts > 0 {
            self.pred[boundary] = starts;
            self.pred_touched.push(boundary);
        }
    }
}

/// Exchange-algorithm state: the current class map plus the class-level
/// counts and objective it implies.
#[derive(Debug, Clone)]
pub struct ClusteringState {
    labelmap: LabelMap,
    stats: WordStats,
    class_unigram: Vec<u64>,
    /// Indexed by history class; the last entry is the boundary.
    class_history: Vec<u64>,
    class_bigram: BigramCounts,
    word_term: f64,
    objective: f64,
}

impl ClusteringState {
    pub fn new(labelmap: LabelMap, sentences: &[Vec<WordId>]) -> Self {
        let stats = WordStats::collect(labelmap.num_words(), sentences);
        Self::from_stats(labelmap, stats)
    }

    fn from_stats(labelmap: LabelMap, stats: WordStats) -> Self {
        let k = labelmap.num_classes();
        let boundary = k;
        let mut class_unigram = vec![0; k];
        let mut class_history = vec![0; k + 1];
        let mut class_bigram = BigramCounts::new(k + 1, k);
        for w in 0..labelmap.num_words() {
            let c = labelmap.class_of(w as WordId) as usize;
            class_unigram[c] += stats.count[w];
            class_history[c] += stats.history[w];
            if stats.starts[w] > 0 {
                class_bigram.add(boundary, c, stats.starts[w] as i64);
            }
            if stats.self_loops[w] > 0 {
                class_bigram.add(c, c, stats.self_loops[w] as i64);
            }
            for &(v, n) in &stats.succ[w] {
                class_bigram.add(c, labelmap.class_of(v) as usize, n as i64);
            }
        }
        class_history[boundary] = stats.sentences;
        let word_term = stats.count.iter().map(|&c| xlogx(c)).sum();
        let mut state = Self {
            labelmap,
            stats,
            class_unigram,
            class_history,
            class_bigram,
            word_term,
            objective: 0.0,
        };
        state.objective = state.recompute_objective();
        state
    }

    pub fn labelmap(&self) -> &LabelMap {
        &self.labelmap
    }

    pub fn into_labelmap(self) -> LabelMap {
        self.labelmap
    }

    pub fn num_classes(&self) -> usize {
        self.labelmap.num_classes()
    }

    /// Objective tracked incrementally across moves.
    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn class_unigram(&self) -> &[u64] {
        &self.class_unigram
    }

    /// History counts per class; the final entry is the sentence boundary.
    pub fn class_history(&self) -> &[u64] {
        &self.class_history
    }

    /// Count of the class bigram `prev -> next`; `prev == num_classes()` is the boundary.
    pub fn class_bigram(&self, prev: usize, next: usize) -> u64 {
        self.class_bigram.get(prev, next)
    }

    pub fn unigram_events(&self) -> u64 {
        self.stats.events
    }

    /// One bigram event per token: its predecessor or the boundary.
    pub fn bigram_events(&self) -> u64 {
        self.class_bigram.nonzero().sum()
    }

    /// Objective evaluated from the current counts.
    pub fn recompute_objective(&self) -> f64 {
        let bigram: f64 = self.class_bigram.nonzero().map(xlogx).sum();
        let history: f64 = self.class_history.iter().map(|&h| xlogx(h)).sum();
        let unigram: f64 = self.class_unigram.iter().map(|&u| xlogx(u)).sum();
        bigram - history + self.word_term - unigram
    }

    /// Rebuilds every class-level count from word statistics and the current map.
    pub fn rebuilt(&self) -> Self {
        Self::from_stats(self.labelmap.clone(), self.stats.clone())
    }

    /// True when the class counts match a from-scratch rebuild and the
    /// tracked objective agrees with it to `rel_tol`.
    pub fn is_consistent(&self, rel_tol: f64) -> bool {
        let fresh = self.rebuilt();
        let k = self.num_classes();
        let cells_match =
            (0..=k).all(|r| (0..k).all(|c| self.class_bigram(r, c) == fresh.class_bigram(r, c)));
        cells_match
            && self.class_unigram == fresh.class_unigram
            && self.class_history == fresh.class_history
            && (self.objective - fresh.objective).abs() <= rel_tol * fresh.objective.abs().max(1.0)
    }

    /// Objective gain of moving `w` to class `to`, given its neighbor
    /// classes already loaded into `nb`.
    fn move_gain(&self, w: WordId, to: usize, nb: &NeighborClasses) -> f64 {
        let from = self.labelmap.class_of(w) as usize;
        if from == to {
            return 0.0;
        }
        let mut bigram = 0.0;
        let mut cell = |r: usize, c: usize, d: i64| {
            if d != 0 {
                let old = self.class_bigram.get(r, c);
                bigram += shifted_xlogx(old, d) - xlogx(old);
            }
        };
        for &k in &nb.succ_touched {
            if k != from && k != to {
                let n = nb.succ[k] as i64;
                cell(from, k, -n);
                cell(to, k, n);
            }
        }
        for &k in &nb.pred_touched {
            if k != from && k != to {
                let n = nb.pred[k] as i64;
                cell(k, from, -n);
                cell(k, to, n);
            }
        }
        for (r, c, d) in corner_deltas(from, to, nb, self.stats.self_loops[w as usize]) {
            cell(r, c, d);
        }

        let hist = self.stats.history[w as usize] as i64;
        let count = self.stats.count[w as usize] as i64;
        let h_from = self.class_history[from];
        let h_to = self.class_history[to];
        let u_from = self.class_unigram[from];
        let u_to = self.class_unigram[to];
        let history =
            shifted_xlogx(h_from, -hist) - xlogx(h_from) + shifted_xlogx(h_to, hist) - xlogx(h_to);
        let unigram = shifted_xlogx(u_from, -count) - xlogx(u_from) + shifted_xlogx(u_to, count)
            - xlogx(u_to);
        bigram - history - unigram
    }

    fn apply_move(&mut self, w: WordId, to: usize, nb: &NeighborClasses, gain: f64) {
        let from = self.labelmap.class_of(w) as usize;
        for &k in &nb.succ_touched {
            if k != from && k != to {
                let n = nb.succ[k] as i64;
                self.class_bigram.add(from, k, -n);
                self.class_bigram.add(to, k, n);
            }
        }
        for &k in &nb.pred_touched {
            if k != from && k != to {
                let n = nb.pred[k] as i64;
                self.class_bigram.add(k, from, -n);
                self.class_bigram.add(k, to, n);
            }
        }
        for (r, c, d) in corner_deltas(from, to, nb, self.stats.self_loops[w as usize]) {
            if d != 0 {
                self.class_bigram.add(r, c, d);
            }
        }
        let hist = self.stats.history[w as usize];
        let count = self.stats.count[w as usize];
        self.class_history[from] -= hist;
        self.class_history[to] += hist;
        self.class_unigram[from] -= count;
        self.class_unigram[to] += count;
        self.labelmap.set(w, to as ClassId);
        self.objective += gain;
    }

    /// Moves `w` to class `to` unconditionally and returns the objective change.
    pub fn move_word(&mut self, w: WordId, to: ClassId) -> f64 {
        if self.labelmap.class_of(w) == to {
            return 0.0;
        }
        let mut nb = NeighborClasses::new(self.num_classes());
        nb.load(&self.stats, &self.labelmap, w, self.num_classes());
        let gain = self.move_gain(w, to as usize, &nb);
        self.apply_move(w, to as usize, &nb, gain);
        gain
    }

    /// One exchange pass over all words in descending frequency order.
    /// Each word takes its best strictly improving move (ties: lowest class
    /// id). Returns the number of moves applied.
    pub fn exchange_pass(&mut self) -> usize {
        let k = self.num_classes();
        let order = by_frequency(&self.stats.count);
        let mut nb = NeighborClasses::new(k);
        let mut moves = 0;
        for w in order {
            if self.stats.count[w as usize] == 0 {
                continue;
            }
            nb.load(&self.stats, &self.labelmap, w, k);
            let from = self.labelmap.class_of(w) as usize;
            let mut best: Option<(usize, f64)> = None;
            for to in (0..k).filter(|&t| t != from) {
                let gain = self.move_gain(w, to, &nb);
                if gain > MIN_GAIN && best.is_none_or(|(_, g)| gain > g) {
                    best = Some((to, gain));
                }
            }
            if let Some((to, gain)) = best {
                self.apply_move(w, to, &nb, gain);
                moves += 1;
            }
        }
        moves
    }
}

/// Bigram cell changes within the `{from, to}` block when a word moves.
fn corner_deltas(
    from: usize,
    to: usize,
    nb: &NeighborClasses,
    self_loops: u64,
) -> [(usize, usize, i64); 4] {
    let succ_from = nb.succ[from] as i64;
    let succ_to = nb.succ[to] as i64;
    let pred_from = nb.pred[from] as i64;
    let pred_to = nb.pred[to] as i64;
    let own = self_loops as i64;
    [
        (from, from, -(succ_from + pred_from + own)),
        (from, to, pred_from - succ_to),
        (to, from, succ_from - pred_to),
        (to, to, succ_to + pred_to + own),
    ]
}

/// Result of [`cluster`]: final map plus the objective after
/// initialization and after each executed pass.
#[derive(Debug, Clone)]
pub struct ClusterOutcome {
    pub labelmap: LabelMap,
    pub trace: Vec<f64>,
    pub passes_run: usize,
}

/// Initializes classes and runs up to `iterations` exchange passes,
/// stopping early once a pass makes no move.
///
/// `observe(iteration, map)` sees the initial map as iteration 0 and the
/// map after every requested iteration, including ones skipped by the
/// early stop (the map is then unchanged).
pub fn cluster_with<F>(
    vocab: &Vocabulary,
    sentences: &[Vec<WordId>],
    num_classes: usize,
    iterations: usize,
    method: InitMethod,
    mut observe: F,
) -> Result<ClusterOutcome>
where
    F: FnMut(usize, &LabelMap) -> Result<()>,
{
    let init = init_classes(vocab, num_classes, method)?;
    observe(0, &init)?;
    let mut state = ClusteringState::new(init, sentences);
    let mut trace = vec![state.objective()];
    let mut converged = false;
    let mut passes_run = 0;
    for iteration in 1..=iterations {
        if !converged {
            let moves = state.exchange_pass();
            passes_run += 1;
            trace.push(state.objective());
            log::debug!(
                "pass {iteration}: {moves} moves, objective {}",
                state.objective()
            );
            converged = moves == 0;
        }
        observe(iteration, state.labelmap())?;
    }
    Ok(ClusterOutcome {
        labelmap: state.into_labelmap(),
        trace,
        passes_run,
    })
}

pub fn cluster(
    vocab: &Vocabulary,
    sentences: &[Vec<WordId>],
    num_classes: usize,
    iterations: usize,
    method: InitMethod,
) -> Result<ClusterOutcome> {
    cluster_with(vocab, sentences, num_classes, iterations, method, |_, _| {
        Ok(())
    })
}

/// Writes `iteration<TAB>objective` lines.
pub fn write_trace<W: Write>(trace: &[f64], mut w: W) -> std::io::Result<()> {
    for (i, value) in trace.iter().enumerate() {
        writeln!(w, "{i}\t{value:.10}")?;
    }
    Ok(())
}

/// Loads a `word<TAB>label` file (POS tags, lemmas, or a class dump).
///
/// Labels are numbered in order of first appearance. Vocabulary words
/// missing from the file go to an extra unknown-label class, which is
/// always the last class and may be empty. File words outside the
/// vocabulary are ignored.
pub fn load_label_map(path: &Path, vocab: &Vocabulary) -> Result<LabelMap> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_label_map(&text, vocab, path)
}

pub fn parse_label_map(text: &str, vocab: &Vocabulary, origin: &Path) -> Result<LabelMap> {
    let mut label_ids: HashMap<&str, ClassId> = HashMap::new();
    let mut word_labels: HashMap<&str, &str> = HashMap::new();
    let mut assigned: Vec<Option<ClassId>> = vec![None; vocab.len()];
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let Some((word, label)) = line.split_once('\t') else {
            return Err(Error::Parse {
                file: origin.to_path_buf(),
                line: n + 1,
                message: "expected `word<TAB>label`".into(),
            });
        };
        let label = label.trim_end();
        if let Some(&previous) = word_labels.get(word) {
            if previous != label {
                return Err(Error::ConflictingLabel {
                    word: word.to_owned(),
                    first: previous.to_owned(),
                    second: label.to_owned(),
                });
            }
            continue;
        }
        word_labels.insert(word, label);
        let next = label_ids.len() as ClassId;
        let class = *label_ids.entry(label).or_insert(next);
        if let Some(id) = vocab.id(word) {
            assigned[id as usize] = Some(class);
        }
    }
    let unknown = label_ids.len() as ClassId;
    let assignment = assigned.into_iter().map(|c| c.unwrap_or(unknown)).collect();
    LabelMap::new(assignment, label_ids.len() + 1)
}
