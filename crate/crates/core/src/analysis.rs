//! Evaluation instruments: sentence-level TER, corpus BLEU, paired
//! bootstrap resampling, and the top-K TER-improved overlap comparison.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Longest block considered for a shift.
pub const MAX_SHIFT_SIZE: usize = 10;
/// Farthest a block may move.
pub const MAX_SHIFT_DIST: usize = 50;

/// Token-level Levenshtein distance with unit costs.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Moves `hyp[start..start + len]` so that it begins at `dest` in the result.
pub fn apply_shift<T: Clone>(hyp: &[T], start: usize, len: usize, dest: usize) -> Vec<T> {
    let mut rest: Vec<T> = Vec::with_capacity(hyp.len());
    rest.extend_from_slice(&hyp[..start]);
    rest.extend_from_slice(&hyp[start + len..]);
    let mut out = Vec::with_capacity(hyp.len());
    out.extend_from_slice(&rest[..dest]);
    out.extend_from_slice(&hyp[start..start + len]);
    out.extend_from_slice(&rest[dest..]);
    out
}

/// Edit counts behind one TER score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TerEdits {
    pub shifts: usize,
    /// Substitutions, insertions and deletions after shifting.
    pub edits: usize,
    pub ref_len: usize,
}

impl TerEdits {
    pub fn total(&self) -> usize {
        self.shifts + self.edits
    }

    pub fn rate(&self) -> f64 {
        self.total() as f64 / self.ref_len as f64
    }
}

/// Greedy TER edit search. Each round applies the block shift that lowers
/// the edit distance the most; the search stops when no shift lowers it.
/// A shift costs 1 and gains at least 1, so the total never rises. Ties go
/// to the earliest, then shortest block, then the nearest-to-front
/// destination.
pub fn ter_edits<T: Eq + Hash + Clone>(hyp: &[T], reference: &[T]) -> Result<TerEdits> {
    if reference.is_empty() {
        return Err(Error::EmptyReference);
    }
    let in_ref: HashSet<&T> = reference.iter().collect();
    let mut cur = hyp.to_vec();
    let mut dist = edit_distance(&cur, reference);
    let mut shifts = 0;
    loop {
        let n = cur.len();
        let mut best: Option<(usize, Vec<T>)> = None;
        for start in 0..n {
            for len in 1..=MAX_SHIFT_SIZE.min(n - start) {
                // Moving a block with no reference word is the same as
                // moving its neighbors the other way, which is enumerated.
                if !cur[start..start + len].iter().any(|t| in_ref.contains(t)) {
                    continue;
                }
                for dest in 0..=n - len {
                    if dest == start || dest.abs_diff(start) > MAX_SHIFT_DIST {
                        continue;
                    }
                    let candidate = apply_shift(&cur, start, len, dest);
                    let d = edit_distance(&candidate, reference);
                    if d < dist && best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                        best = Some((d, candidate));
                    }
                }
            }
        }
        match best {
            Some((d, next)) => {
                cur = next;
                dist = d;
                shifts += 1;
            }
            None => break,
        }
    }
    Ok(TerEdits {
        shifts,
        edits: dist,
        ref_len: reference.len(),
    })
}

/// Translation edit rate of `hyp` against `reference`.
pub fn ter<T: Eq + Hash + Clone>(hyp: &[T], reference: &[T]) -> Result<f64> {
    Ok(ter_edits(hyp, reference)?.rate())
}

pub const BLEU_ORDER: usize = 4;

/// Sufficient statistics for corpus BLEU.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [u64; BLEU_ORDER],
    pub totals: [u64; BLEU_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    pub fn sentence<T: Eq + Hash>(hyp: &[T], reference: &[T]) -> Self {
        let mut stats = BleuStats {
            hyp_len: hyp.len() as u64,
            ref_len: reference.len() as u64,
            ..Default::default()
        };
        for n in 1..=BLEU_ORDER {
            if hyp.len() < n {
                break;
            }
            let mut ref_counts: HashMap<&[T], u64> = HashMap::new();
            for g in reference.windows(n) {
                *ref_counts.entry(g).or_insert(0) += 1;
            }
            let mut hyp_counts: HashMap<&[T], u64> = HashMap::new();
            for g in hyp.windows(n) {
                *hyp_counts.entry(g).or_insert(0) += 1;
            }
            stats.totals[n - 1] = (hyp.len() + 1 - n) as u64;
            stats.matches[n - 1] = hyp_counts
                .iter()
                .map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
                .sum();
        }
        stats
    }

    pub fn add(&mut self, other: &Self) {
        for n in 0..BLEU_ORDER {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    /// BLEU in percent. An order without any hypothesis n-gram contributes
    /// a precision of one; an order with n-grams but no match makes the
    /// score zero (no smoothing).
    pub fn score(&self) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        let mut log_precision = 0.0;
        for n in 0..BLEU_ORDER {
            if self.totals[n] == 0 {
                continue;
            }
            if self.matches[n] == 0 {
                log::warn!("no matching {}-grams; BLEU is 0", n + 1);
                return 0.0;
            }
            log_precision += (self.matches[n] as f64 / self.totals[n] as f64).ln();
        }
        let brevity = if self.hyp_len < self.ref_len {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        } else {
            1.0
        };
        100.0 * brevity * (log_precision / BLEU_ORDER as f64).exp()
    }
}

fn check_lengths(what: &'static str, left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { what, left, right });
    }
    Ok(())
}

/// Case-sensitive corpus BLEU (percent) with a single reference per sentence.
pub fn bleu<T: Eq + Hash>(hyps: &[Vec<T>], refs: &[Vec<T>]) -> Result<f64> {
    if hyps.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    check_lengths("hypotheses vs references", hyps.len(), refs.len())?;
    let mut total = BleuStats::default();
    for (h, r) in hyps.iter().zip(refs) {
        total.add(&BleuStats::sentence(h, r));
    }
    Ok(total.score())
}

/// Corpus TER: total edits over total reference length.
pub fn corpus_ter<T: Eq + Hash + Clone + Sync>(hyps: &[Vec<T>], refs: &[Vec<T>]) -> Result<f64> {
    check_lengths("hypotheses vs references", hyps.len(), refs.len())?;
    let edits = sentence_edits(hyps, refs)?;
    let total: usize = edits.iter().map(|e| e.total()).sum();
    let len: usize = edits.iter().map(|e| e.ref_len).sum();
    if len == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(total as f64 / len as f64)
}

fn sentence_edits<T: Eq + Hash + Clone + Sync>(
    hyps: &[Vec<T>],
    refs: &[Vec<T>],
) -> Result<Vec<TerEdits>> {
    hyps.par_iter()
        .zip(refs)
        .map(|(h, r)| ter_edits(h, r))
        .collect()
}

/// Confidence marker for a bootstrap win fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Significance {
    /// At least 95% of resamples.
    P95,
    /// At least 90% of resamples.
    P90,
    None,
}

impl Significance {
    pub fn of(win_fraction: f64) -> Self {
        if win_fraction >= 0.95 {
            Significance::P95
        } else if win_fraction >= 0.90 {
            Significance::P90
        } else {
            Significance::None
        }
    }

    pub fn marker(&self) -> &'static str {
        match self {
            Significance::P95 => "‡",
            Significance::P90 => "†",
            Significance::None => "",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapResult {
    pub samples: usize,
    /// Fraction of resamples where A has the higher BLEU (ties count half).
    pub bleu_win: f64,
    /// Fraction of resamples where A has the lower TER (ties count half).
    pub ter_win: f64,
}

impl BootstrapResult {
    pub fn bleu_significance(&self) -> Significance {
        Significance::of(self.bleu_win)
    }

    pub fn ter_significance(&self) -> Significance {
        Significance::of(self.ter_win)
    }
}

/// Twice the win count, so ties stay integral.
fn half_wins(a: f64, b: f64, a_better: Ordering) -> u64 {
    match a.partial_cmp(&b) {
        Some(Ordering::Equal) => 1,
        Some(o) if o == a_better => 2,
        _ => 0,
    }
}

/// Paired bootstrap resampling of A against B. Sample `s` draws its
/// indices from a generator seeded with `seed` on stream `s`, so results do
/// not depend on scheduling.
pub fn paired_bootstrap<T: Eq + Hash + Clone + Sync>(
    hyps_a: &[Vec<T>],
    hyps_b: &[Vec<T>],
    refs: &[Vec<T>],
    samples: usize,
    seed: u64,
) -> Result<BootstrapResult> {
    check_lengths("system A vs references", hyps_a.len(), refs.len())?;
    check_lengths("system B vs references", hyps_b.len(), refs.len())?;
    if refs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if samples == 0 {
        return Err(Error::Config("bootstrap needs at least one sample".into()));
    }
    let bleu_a: Vec<BleuStats> = hyps_a
        .iter()
        .zip(refs)
        .map(|(h, r)| BleuStats::sentence(h, r))
        .collect();
    let bleu_b: Vec<BleuStats> = hyps_b
        .iter()
        .zip(refs)
        .map(|(h, r)| BleuStats::sentence(h, r))
        .collect();
    let ter_a = sentence_edits(hyps_a, refs)?;
    let ter_b = sentence_edits(hyps_b, refs)?;
    let n = refs.len();

    let (bleu_half, ter_half) = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let mut sa = BleuStats::default();
            let mut sb = BleuStats::default();
            let (mut ea, mut eb, mut len) = (0usize, 0usize, 0usize);
            for _ in 0..n {
                let i = rng.gen_range(0..n);
                sa.add(&bleu_a[i]);
                sb.add(&bleu_b[i]);
                ea += ter_a[i].total();
                eb += ter_b[i].total();
                len += ter_a[i].ref_len;
            }
            let (ta, tb) = (ea as f64 / len as f64, eb as f64 / len as f64);
            (
                half_wins(sa.score(), sb.score(), Ordering::Greater),
                half_wins(ta, tb, Ordering::Less),
            )
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));

    let denom = 2.0 * samples as f64;
    Ok(BootstrapResult {
        samples,
        bleu_win: bleu_half as f64 / denom,
        ter_win: ter_half as f64 / denom,
    })
}

/// Sentence-level TER of a system against a baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceEval<T> {
    pub index: usize,
    pub ter_baseline: f64,
    pub ter_system: f64,
    /// `ter_baseline - ter_system`; positive when the system improves.
    pub delta: f64,
    pub hyp_baseline: Vec<T>,
    pub hyp_system: Vec<T>,
}

/// Per-sentence TER evaluations in corpus order.
pub fn sentence_evals<T: Eq + Hash + Clone + Send + Sync>(
    baseline: &[Vec<T>],
    system: &[Vec<T>],
    refs: &[Vec<T>],
) -> Result<Vec<SentenceEval<T>>> {
    check_lengths("baseline vs references", baseline.len(), refs.len())?;
    check_lengths("system vs references", system.len(), refs.len())?;
    (0..refs.len())
        .into_par_iter()
        .map(|i| {
            let ter_baseline = ter(&baseline[i], &refs[i])?;
            let ter_system = ter(&system[i], &refs[i])?;
            Ok(SentenceEval {
                index: i,
                ter_baseline,
                ter_system,
                delta: ter_baseline - ter_system,
                hyp_baseline: baseline[i].clone(),
                hyp_system: system[i].clone(),
            })
        })
        .collect()
}

/// The `k` sentences whose TER improves most over the baseline, by
/// descending delta (ties: lower index first).
pub fn top_k_ter_improved<T: Eq + Hash + Clone + Send + Sync>(
    baseline: &[Vec<T>],
    system: &[Vec<T>],
    refs: &[Vec<T>],
    k: usize,
) -> Result<Vec<SentenceEval<T>>> {
    if k > refs.len() {
        return Err(Error::TopKTooLarge {
            k,
            size: refs.len(),
        });
    }
    let mut evals = sentence_evals(baseline, system, refs)?;
    evals.sort_by(|a, b| b.delta.total_cmp(&a.delta).then(a.index.cmp(&b.index)));
    evals.truncate(k);
    Ok(evals)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapReport {
    pub k: usize,
    pub common_inputs: usize,
    /// Shared inputs over `k`.
    pub common_input_fraction: f64,
    /// Identical translations over the shared inputs; `None` when nothing is shared.
    pub same_translation_fraction: Option<f64>,
}

/// Compares two top-K lists drawn from the same test set and baseline.
pub fn overlap<T: Eq>(
    list_a: &[SentenceEval<T>],
    list_b: &[SentenceEval<T>],
) -> Result<OverlapReport> {
    check_lengths("top-k list sizes", list_a.len(), list_b.len())?;
    let k = list_a.len();
    if k == 0 {
        return Err(Error::Config("overlap of empty top-k lists".into()));
    }
    let by_index: HashMap<usize, &SentenceEval<T>> = list_b.iter().map(|e| (e.index, e)).collect();
    let mut common = 0;
    let mut same = 0;
    for a in list_a {
        if let Some(b) = by_index.get(&a.index) {
            common += 1;
            if a.hyp_system == b.hyp_system {
                same += 1;
            }
        }
    }
    Ok(OverlapReport {
        k,
        common_inputs: common,
        common_input_fraction: common as f64 / k as f64,
        same_translation_fraction: (common > 0).then(|| same as f64 / common as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_owned).collect()
    }

    #[test]
    fn ter_examples() {
        assert_eq!(ter(&toks("a b c"), &toks("a b c")).unwrap(), 0.0);
        assert_eq!(ter(&toks("a b x d e"), &toks("a b c d e")).unwrap(), 0.2);
        let e = ter_edits(&toks("c d a b"), &toks("a b c d")).unwrap();
        assert_eq!((e.shifts, e.edits), (1, 0));
        assert_eq!(e.rate(), 0.25);
        assert_eq!(ter(&toks(""), &toks("a b")).unwrap(), 1.0);
        assert!(matches!(
            ter(&toks("a"), &toks("")),
            Err(Error::EmptyReference)
        ));
    }

    #[test]
    fn shift_moves_block() {
        let v = [1, 2, 3, 4, 5];
        assert_eq!(apply_shift(&v, 0, 2, 3), vec![3, 4, 5, 1, 2]);
        assert_eq!(apply_shift(&v, 3, 1, 0), vec![4, 1, 2, 3, 5]);
    }

    #[test]
    fn bleu_examples() {
        let refs = vec![toks("a b c d"), toks("e f g h i")];
        assert_eq!(bleu(&refs, &refs).unwrap(), 100.0);
        let b = bleu(&[toks("a b c")], &[toks("a b c d")]).unwrap();
        assert!((b - 100.0 * (1.0f64 - 4.0 / 3.0).exp()).abs() < 1e-9);
        assert!((b - 71.6531).abs() < 1e-4);
        let empty: Vec<Vec<String>> = vec![];
        assert!(matches!(bleu(&empty, &empty), Err(Error::EmptyCorpus)));
        assert_eq!(
            bleu(&[toks("a b c d x")], &[toks("a b c e d")]).unwrap(),
            0.0
        );
    }

    #[test]
    fn bleu_clips_counts() {
        let s = BleuStats::sentence(&toks("the the the"), &toks("the cat"));
        assert_eq!(s.matches[0], 1);
        assert_eq!(s.totals[0], 3);
    }

    #[test]
    fn bootstrap_ties_and_dominance() {
        let refs = vec![toks("a b c d"), toks("e f g h"), toks("i j k l")];
        let same = paired_bootstrap(&refs, &refs, &refs, 200, 1).unwrap();
        assert_eq!((same.bleu_win, same.ter_win), (0.5, 0.5));
        let bad = vec![toks("x y z w"), toks("x y z w"), toks("x y z w")];
        let win = paired_bootstrap(&refs, &bad, &refs, 200, 1).unwrap();
        assert_eq!((win.bleu_win, win.ter_win), (1.0, 1.0));
        assert_eq!(win.bleu_significance().marker(), "‡");
        let again = paired_bootstrap(&refs, &bad, &refs, 200, 1).unwrap();
        assert_eq!(win, again);
    }

    #[test]
    fn top_k_orders_by_delta_then_index() {
        let refs = vec![toks("a b"), toks("a b c d e f g h i j"), toks("a b c d e")];
        // Sentence deltas: 0.5, -0.1, 0.2.
        let base = vec![toks("a x"), toks("a b c d e f g h i j"), toks("a b c x e")];
        let sys = vec![toks("a b"), toks("a b c d e f g h i y"), toks("a b c d e")];
        let top = top_k_ter_improved(&base, &sys, &refs, 2).unwrap();
        assert_eq!(top.iter().map(|e| e.index).collect::<Vec<_>>(), vec![0, 2]);
        assert!(matches!(
            top_k_ter_improved(&base, &sys, &refs, 4),
            Err(Error::TopKTooLarge { .. })
        ));
    }

    #[test]
    fn overlap_self_and_disjoint() {
        let refs = vec![toks("a"), toks("b"), toks("c"), toks("d")];
        let base = vec![toks("x"); 4];
        let top = top_k_ter_improved(&base, &refs, &refs, 2).unwrap();
        let rep = overlap(&top, &top).unwrap();
        assert_eq!(
            (rep.common_input_fraction, rep.same_translation_fraction),
            (1.0, Some(1.0))
        );

        let mk = |i: usize| SentenceEval {
            index: i,
            ter_baseline: 1.0,
            ter_system: 0.0,
            delta: 1.0,
            hyp_baseline: toks("x"),
            hyp_system: toks("y"),
        };
        let rep = overlap(&[mk(0), mk(1)], &[mk(2), mk(3)]).unwrap();
        assert_eq!(rep.common_input_fraction, 0.0);
        assert_eq!(rep.same_translation_fraction, None);
    }
}
