#![allow(dead_code)]

use std::collections::HashMap;

use phrasmooth::analysis::{apply_shift, edit_distance};
use phrasmooth::clustering::LabelMap;
use phrasmooth::corpus::{AlignedSentencePair, ParallelCorpus, Vocabulary, WordId};
use phrasmooth::extraction::PhrasePair;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random sentence pair over `vocab` token ids with roughly diagonal links.
pub fn random_pair<R: Rng>(
    rng: &mut R,
    max_len: usize,
    src_vocab: u32,
    tgt_vocab: u32,
) -> AlignedSentencePair {
    let src_len = rng.gen_range(1..=max_len);
    let tgt_len = rng.gen_range(1..=max_len);
    let source: Vec<u32> = (0..src_len).map(|_| rng.gen_range(0..src_vocab)).collect();
    let target: Vec<u32> = (0..tgt_len).map(|_| rng.gen_range(0..tgt_vocab)).collect();
    let density = rng.gen_range(0.1..0.6);
    let mut links = Vec::new();
    for j in 0..src_len {
        for i in 0..tgt_len {
            let diag = (j as f64 / src_len as f64 - i as f64 / tgt_len as f64).abs();
            if rng.gen_bool((density * (1.0 - diag)).clamp(0.0, 1.0)) {
                links.push((j as u32, i as u32));
            }
        }
    }
    AlignedSentencePair::new(source, target, links)
}

/// Random parallel corpus whose vocabularies are built like the loader
/// builds them (first-occurrence ids).
pub fn random_corpus<R: Rng>(
    rng: &mut R,
    max_pairs: usize,
    max_vocab: u32,
    max_len: usize,
) -> ParallelCorpus {
    let n = rng.gen_range(1..=max_pairs);
    let sv = rng.gen_range(2..=max_vocab);
    let tv = rng.gen_range(2..=max_vocab);
    let raw: Vec<AlignedSentencePair> = (0..n).map(|_| random_pair(rng, max_len, sv, tv)).collect();
    from_raw(&raw)
}

/// Re-interns raw token ids as `s<id>` / `t<id>` strings.
pub fn from_raw(raw: &[AlignedSentencePair]) -> ParallelCorpus {
    let mut source_vocab = Vocabulary::new();
    let mut target_vocab = Vocabulary::new();
    let pairs = raw
        .iter()
        .map(|p| {
            let source = p
                .source
                .iter()
                .map(|w| source_vocab.observe(&format!("s{w}")))
                .collect();
            let target = p
                .target
                .iter()
                .map(|w| target_vocab.observe(&format!("t{w}")))
                .collect();
            AlignedSentencePair::new(source, target, p.links.clone())
        })
        .collect();
    ParallelCorpus {
        source_vocab,
        target_vocab,
        pairs,
    }
}

/// Parses `"f1 f2 ||| e1 e2 ||| 0-0 1-1"` lines into a corpus.
pub fn corpus_from_lines(lines: &[&str]) -> ParallelCorpus {
    let mut src = String::new();
    let mut tgt = String::new();
    let mut aln = String::new();
    for line in lines {
        let parts: Vec<&str> = line.split(" ||| ").collect();
        src.push_str(parts[0]);
        src.push('\n');
        tgt.push_str(parts[1]);
        tgt.push('\n');
        aln.push_str(parts.get(2).copied().unwrap_or(""));
        aln.push('\n');
    }
    phrasmooth::corpus::parse_parallel_corpus(&src, &tgt, &aln, std::path::Path::new("inline"))
        .unwrap()
}

/// Every consistent rectangle, found by testing each span pair against the
/// consistency predicate directly.
pub fn brute_force_phrases(pair: &AlignedSentencePair, max_len: usize) -> Vec<PhrasePair> {
    let (sl, tl) = (pair.source.len(), pair.target.len());
    let mut out = Vec::new();
    for j1 in 0..sl {
        for j2 in j1..sl {
            for i1 in 0..tl {
                for i2 in i1..tl {
                    if j2 - j1 + 1 > max_len || i2 - i1 + 1 > max_len {
                        continue;
                    }
                    let in_src = |j: u32| (j1..=j2).contains(&(j as usize));
                    let in_tgt = |i: u32| (i1..=i2).contains(&(i as usize));
                    let crossing = pair.links.iter().any(|&(j, i)| in_src(j) != in_tgt(i));
                    let inside: Vec<_> = pair
                        .links
                        .iter()
                        .filter(|&&(j, i)| in_src(j) && in_tgt(i))
                        .collect();
                    let edges_aligned = [j1, j2]
                        .iter()
                        .all(|&j| inside.iter().any(|l| l.0 as usize == j))
                        && [i1, i2]
                            .iter()
                            .all(|&i| inside.iter().any(|l| l.1 as usize == i));
                    if crossing || inside.is_empty() || !edges_aligned {
                        continue;
                    }
                    out.push(PhrasePair {
                        src: pair.source[j1..=j2].to_vec(),
                        tgt: pair.target[i1..=i2].to_vec(),
                        align: inside
                            .iter()
                            .map(|&&(j, i)| (j - j1 as u32, i - i1 as u32))
                            .collect(),
                    });
                }
            }
        }
    }
    out
}

/// Class-bigram log-likelihood summed event by event, straight from the
/// sentences.
pub fn event_objective(sentences: &[Vec<WordId>], map: &LabelMap) -> f64 {
    let boundary = None;
    let mut bigram: HashMap<(Option<u32>, u32), u64> = HashMap::new();
    let mut history: HashMap<Option<u32>, u64> = HashMap::new();
    let mut word: HashMap<WordId, u64> = HashMap::new();
    let mut class: HashMap<u32, u64> = HashMap::new();
    let mut events = Vec::new();
    for s in sentences {
        let mut prev = boundary;
        for &w in s {
            let c = map.class_of(w);
            *bigram.entry((prev, c)).or_insert(0) += 1;
            *history.entry(prev).or_insert(0) += 1;
            *word.entry(w).or_insert(0) += 1;
            *class.entry(c).or_insert(0) += 1;
            events.push((prev, c, w));
            prev = Some(c);
        }
    }
    events
        .iter()
        .map(|&(prev, c, w)| {
            let transition = bigram[&(prev, c)] as f64 / history[&prev] as f64;
            let emission = word[&w] as f64 / class[&c] as f64;
            transition.ln() + emission.ln()
        })
        .sum()
}

/// Sentences over two word groups `a*` and `b*` that strictly alternate,
/// starting with an `a` word. Returns the vocabulary, the id sentences and
/// the true two-block partition.
pub fn two_class_corpus(
    seed: u64,
    sentences: usize,
    group_size: usize,
) -> (Vocabulary, Vec<Vec<WordId>>, Vec<Vec<WordId>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lines: Vec<String> = (0..sentences)
        .map(|_| {
            let len = rng.gen_range(2..=10);
            (0..len)
                .map(|i| {
                    let group = if i % 2 == 0 { 'a' } else { 'b' };
                    format!("{group}{}", rng.gen_range(0..group_size))
                })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let vocab = Vocabulary::from_lines(lines.iter().map(String::as_str));
    let ids: Vec<Vec<WordId>> = lines
        .iter()
        .map(|l| l.split(' ').map(|t| vocab.id(t).unwrap()).collect())
        .collect();
    let mut truth = vec![Vec::new(), Vec::new()];
    for (id, token) in vocab.iter() {
        truth[usize::from(token.starts_with('b'))].push(id);
    }
    truth.sort();
    (vocab, ids, truth)
}

/// Random sentences over `vocab_size` words with a skewed word distribution;
/// every word occurs at least once.
pub fn random_sentences<R: Rng>(
    rng: &mut R,
    vocab_size: usize,
    sentences: usize,
) -> (Vocabulary, Vec<Vec<WordId>>) {
    let mut lines: Vec<String> = (0..vocab_size).map(|w| format!("w{w}")).collect();
    for _ in 0..sentences {
        let len = rng.gen_range(0..=8);
        let words: Vec<String> = (0..len)
            .map(|_| {
                let u: f64 = rng.gen();
                format!(
                    "w{}",
                    ((u * u * vocab_size as f64) as usize).min(vocab_size - 1)
                )
            })
            .collect();
        lines.push(words.join(" "));
    }
    let vocab = Vocabulary::from_lines(lines.iter().map(String::as_str));
    let ids = lines
        .iter()
        .map(|l| {
            phrasmooth::corpus::tokens(l)
                .map(|t| vocab.id(t).unwrap())
                .collect()
        })
        .collect();
    (vocab, ids)
}

/// Label map from explicit `(token, class)` entries covering the vocabulary.
pub fn labels(vocab: &Vocabulary, entries: &[(&str, u32)]) -> LabelMap {
    let mut assignment = vec![u32::MAX; vocab.len()];
    for &(token, class) in entries {
        assignment[vocab
            .id(token)
            .unwrap_or_else(|| panic!("unknown token {token}")) as usize] = class;
    }
    assert!(
        assignment.iter().all(|&c| c != u32::MAX),
        "label map must be total"
    );
    let k = assignment.iter().max().map_or(0, |&c| c as usize + 1);
    LabelMap::new(assignment, k).unwrap()
}

/// Uniformly random total map onto `k` labels (some labels may stay unused).
pub fn random_labels<R: Rng>(rng: &mut R, vocab_size: usize, k: u32) -> LabelMap {
    LabelMap::new(
        (0..vocab_size).map(|_| rng.gen_range(0..k)).collect(),
        k as usize,
    )
    .unwrap()
}

/// Minimum of (shifts + edit distance) over every sequence of at most
/// `max_shifts` unrestricted block shifts.
pub fn exhaustive_ter_cost(hyp: &[u8], reference: &[u8], max_shifts: usize) -> usize {
    let mut frontier = vec![hyp.to_vec()];
    let mut best = edit_distance(hyp, reference);
    for depth in 1..=max_shifts {
        let mut next = Vec::new();
        for h in &frontier {
            let n = h.len();
            for start in 0..n {
                for len in 1..=n - start {
                    for dest in 0..=n - len {
                        if dest == start {
                            continue;
                        }
                        let shifted = apply_shift(h, start, len, dest);
                        best = best.min(depth + edit_distance(&shifted, reference));
                        next.push(shifted);
                    }
                }
            }
        }
        next.sort();
        next.dedup();
        frontier = next;
    }
    best
}

/// Reference/hypothesis pairs of at most 8 tokens: random hypotheses,
/// shuffles, and references disturbed by a few shifts and a substitution.
pub fn random_suite(cases: usize, seed: u64) -> Vec<(Vec<u8>, Vec<u8>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases)
        .map(|_| {
            let vocab = rng.gen_range(2..=8u8);
            let ref_len = rng.gen_range(1..=8);
            let reference: Vec<u8> = (0..ref_len).map(|_| rng.gen_range(0..vocab)).collect();
            let hyp = match rng.gen_range(0..3) {
                0 => {
                    let len = rng.gen_range(0..=8);
                    (0..len).map(|_| rng.gen_range(0..vocab)).collect()
                }
                1 => {
                    let mut h = reference.clone();
                    h.shuffle(&mut rng);
                    h
                }
                _ => {
                    let mut h = reference.clone();
                    for _ in 0..rng.gen_range(1..=3) {
                        let n = h.len();
                        let start = rng.gen_range(0..n);
                        let len = rng.gen_range(1..=n - start);
                        let dest = rng.gen_range(0..=n - len);
                        h = apply_shift(&h, start, len, dest);
                    }
                    if rng.gen_bool(0.5) {
                        let i = rng.gen_range(0..h.len());
                        h[i] = rng.gen_range(0..vocab);
                    }
                    h
                }
            };
            (hyp, reference)
        })
        .collect()
}
