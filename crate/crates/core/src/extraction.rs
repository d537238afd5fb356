//! Phrase pair extraction under the alignment consistency rule, and the
//! phrase count tables built from it.
//!
//! A rectangle `[j1, j2] x [i1, i2]` is extracted when it holds at least one
//! link, no link has exactly one end inside it, and every boundary row and
//! column of the rectangle carries a link. The last condition means spans
//! are never widened over unaligned edge words.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;

use crate::corpus::{AlignedSentencePair, Vocabulary, WordId};

pub const DEFAULT_MAX_LEN: usize = 7;

/// Phrase-local alignment links `(source position, target position)`, sorted.
pub type Alignment = Vec<(u32, u32)>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhrasePair {
    pub src: Vec<WordId>,
    pub tgt: Vec<WordId>,
    pub align: Alignment,
}

impl PhrasePair {
    /// Target positions aligned to source position `j`.
    pub fn aligned_targets(&self, j: usize) -> Vec<usize> {
        aligned_targets(&self.align, j)
    }

    /// Source positions aligned to target position `i`.
    pub fn aligned_sources(&self, i: usize) -> Vec<usize> {
        aligned_sources(&self.align, i)
    }
}

pub fn aligned_targets(align: &[(u32, u32)], j: usize) -> Vec<usize> {
    align
        .iter()
        .filter(|&&(s, _)| s as usize == j)
        .map(|&(_, t)| t as usize)
        .collect()
}

pub fn aligned_sources(align: &[(u32, u32)], i: usize) -> Vec<usize> {
    let mut out: Vec<usize> = align
        .iter()
        .filter(|&&(_, t)| t as usize == i)
        .map(|&(s, _)| s as usize)
        .collect();
    out.sort_unstable();
    out
}

/// All consistent phrase pairs of one sentence pair with both sides no
/// longer than `max_len`, in (source span, target span) order.
pub fn extract_phrases(pair: &AlignedSentencePair, max_len: usize) -> Vec<PhrasePair> {
    let src_len = pair.source.len();
    let tgt_len = pair.target.len();
    let mut src_links: Vec<Vec<u32>> = vec![Vec::new(); src_len];
    let mut tgt_links: Vec<Vec<u32>> = vec![Vec::new(); tgt_len];
    for &(j, i) in &pair.links {
        src_links[j as usize].push(i);
        tgt_links[i as usize].push(j);
    }

    let mut out = Vec::new();
    for j1 in 0..src_len {
        if src_links[j1].is_empty() {
            continue;
        }
        let mut lo = usize::MAX;
        let mut hi = 0;
        for (j2, links) in src_links
            .iter()
            .enumerate()
            .take(src_len.min(j1 + max_len))
            .skip(j1)
        {
            for &i in links {
                lo = lo.min(i as usize);
                hi = hi.max(i as usize);
            }
            if links.is_empty() || hi - lo + 1 > max_len {
                continue;
            }
            // The tight target span's edges are aligned by construction;
            // reject it if any of its words links outside the source span.
            let closed = (lo..=hi).all(|i| {
                tgt_links[i]
                    .iter()
                    .all(|&j| (j1..=j2).contains(&(j as usize)))
            });
            if !closed {
                continue;
            }
            let align = pair
                .links
                .iter()
                .filter(|&&(j, _)| (j1..=j2).contains(&(j as usize)))
                .map(|&(j, i)| (j - j1 as u32, i - lo as u32))
                .collect();
            out.push(PhrasePair {
                src: pair.source[j1..=j2].to_vec(),
                tgt: pair.target[lo..=hi].to_vec(),
                align,
            });
        }
    }
    out
}

/// Counts for one distinct (source, target) phrase pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairStats {
    pub count: u64,
    /// Occurrence counts per observed in-phrase alignment.
    pub align_votes: HashMap<Alignment, u64>,
}

impl PairStats {
    /// Most frequent observed alignment; ties go to the lexicographically
    /// smallest link set.
    pub fn canonical_align(&self) -> &Alignment {
        self.align_votes
            .iter()
            .max_by(|(a, na), (b, nb)| na.cmp(nb).then_with(|| b.cmp(a)))
            .map(|(a, _)| a)
            .expect("a counted pair has at least one alignment")
    }
}

pub type PhraseKey = (Vec<WordId>, Vec<WordId>);

/// N(f,e), N(e), N(f) and alignment votes over a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhraseCountTable {
    pub pairs: HashMap<PhraseKey, PairStats>,
    pub tgt_count: HashMap<Vec<WordId>, u64>,
    pub src_count: HashMap<Vec<WordId>, u64>,
}

impl PhraseCountTable {
    pub fn add(&mut self, phrase: PhrasePair) {
        self.add_weighted(phrase, 1);
    }

    fn add_weighted(&mut self, phrase: PhrasePair, n: u64) {
        *self.tgt_count.entry(phrase.tgt.clone()).or_insert(0) += n;
        *self.src_count.entry(phrase.src.clone()).or_insert(0) += n;
        let stats = self.pairs.entry((phrase.src, phrase.tgt)).or_default();
        stats.count += n;
        *stats.align_votes.entry(phrase.align).or_insert(0) += n;
    }

    /// Associative merge; votes are summed so canonical choices do not
    /// depend on merge order.
    pub fn merge(mut self, other: Self) -> Self {
        let (mut big, small) = if self.pairs.len() >= other.pairs.len() {
            (std::mem::take(&mut self), other)
        } else {
            (other, self)
        };
        for (k, n) in small.tgt_count {
            *big.tgt_count.entry(k).or_insert(0) += n;
        }
        for (k, n) in small.src_count {
            *big.src_count.entry(k).or_insert(0) += n;
        }
        for (k, stats) in small.pairs {
            let entry = big.pairs.entry(k).or_default();
            entry.count += stats.count;
            for (a, n) in stats.align_votes {
                *entry.align_votes.entry(a).or_insert(0) += n;
            }
        }
        big
    }

    pub fn pair_count(&self, src: &[WordId], tgt: &[WordId]) -> Option<u64> {
        self.pairs
            .get(&(src.to_vec(), tgt.to_vec()))
            .map(|s| s.count)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Distinct pairs with their canonical alignments, sorted by ids.
    pub fn canonical_pairs(&self) -> Vec<(PhrasePair, u64)> {
        let mut out: Vec<_> = self
            .pairs
            .iter()
            .map(|((src, tgt), stats)| {
                (
                    PhrasePair {
                        src: src.clone(),
                        tgt: tgt.clone(),
                        align: stats.canonical_align().clone(),
                    },
                    stats.count,
                )
            })
            .collect();
        out.sort();
        out
    }

    /// Writes `src ||| tgt ||| count ||| alignment` lines sorted by the
    /// rendered (src, tgt) strings.
    pub fn write_dump<W: Write>(
        &self,
        src_vocab: &Vocabulary,
        tgt_vocab: &Vocabulary,
        mut w: W,
    ) -> std::io::Result<()> {
        let mut rows: Vec<(String, String, u64, String)> = self
            .pairs
            .iter()
            .map(|((src, tgt), stats)| {
                (
                    src_vocab.render(src),
                    tgt_vocab.render(tgt),
                    stats.count,
                    format_alignment(stats.canonical_align()),
                )
            })
            .collect();
        rows.sort();
        for (src, tgt, count, align) in rows {
            writeln!(w, "{src} ||| {tgt} ||| {count} ||| {align}")?;
        }
        Ok(())
    }
}

/// Pharaoh rendering: `j-i` pairs separated by spaces.
pub fn format_alignment(align: &[(u32, u32)]) -> String {
    align
        .iter()
        .map(|(j, i)| format!("{j}-{i}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Extracts and counts phrase pairs over a corpus. Sentences are processed
/// in parallel shards and merged.
pub fn accumulate(corpus: &[AlignedSentencePair], max_len: usize) -> PhraseCountTable {
    corpus
        .par_chunks(256)
        .map(|shard| {
            let mut table = PhraseCountTable::default();
            for pair in shard {
                for phrase in extract_phrases(pair, max_len) {
                    table.add(phrase);
                }
            }
            table
        })
        .reduce(PhraseCountTable::default, PhraseCountTable::merge)
}
