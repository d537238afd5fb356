//! Parallel corpus ingestion: tokenized text, Pharaoh alignments and
//! per-side vocabularies.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type WordId = u32;

/// Bijective token <-> id mapping. Ids are assigned in order of first
/// occurrence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<String>,
    index: HashMap<String, WordId>,
    frequency: Vec<u64>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vocabulary from whitespace-tokenized lines.
    pub fn from_lines<'a>(lines: impl IntoIterator<Item = &'a str>) -> Self {
        let mut vocab = Self::new();
        for line in lines {
            for token in tokens(line) {
                vocab.observe(token);
            }
        }
        vocab
    }

    /// Records one occurrence of `token`, returning its id.
    pub fn observe(&mut self, token: &str) -> WordId {
        let id = self.intern(token);
        self.frequency[id as usize] += 1;
        id
    }

    fn intern(&mut self, token: &str) -> WordId {
        if let Some(&id) = self.index.get(token) {
            return id;
        }
        let id = self.entries.len() as WordId;
        self.entries.push(token.to_owned());
        self.index.insert(token.to_owned(), id);
        self.frequency.push(0);
        id
    }

    pub fn id(&self, token: &str) -> Option<WordId> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: WordId) -> &str {
        &self.entries[id as usize]
    }

    pub fn frequency(&self, id: WordId) -> u64 {
        self.frequency[id as usize]
    }

    pub fn frequencies(&self) -> &[u64] {
        &self.frequency
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of running words the vocabulary was built from.
    pub fn running_words(&self) -> u64 {
        self.frequency.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (WordId, &str)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, t)| (i as WordId, t.as_str()))
    }

    /// Renders `ids` back to a space-joined string.
    pub fn render(&self, ids: &[WordId]) -> String {
        let mut out = String::new();
        for (n, &id) in ids.iter().enumerate() {
            if n > 0 {
                out.push(' ');
            }
            out.push_str(self.token(id));
        }
        out
    }

    /// Writes `token<TAB>id<TAB>count` lines in id order.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (id, token) in self.iter() {
            writeln!(w, "{}\t{}\t{}", token, id, self.frequency(id))?;
        }
        Ok(())
    }

    pub fn read_dump<R: BufRead>(reader: R, origin: &Path) -> Result<Self> {
        let mut vocab = Self::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            let parse_err = |message: &str| Error::Parse {
                file: origin.to_path_buf(),
                line: n + 1,
                message: message.to_owned(),
            };
            let mut fields = line.split('\t');
            let (Some(token), Some(id), Some(count), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(parse_err("expected `token<TAB>id<TAB>count`"));
            };
            let id: usize = id.parse().map_err(|_| parse_err("bad word id"))?;
            let count: u64 = count.parse().map_err(|_| parse_err("bad count"))?;
            if id != vocab.len() {
                return Err(parse_err("word ids must be contiguous and in order"));
            }
            if vocab.index.contains_key(token) {
                return Err(parse_err("duplicate token"));
            }
            vocab.intern(token);
            vocab.frequency[id] = count;
        }
        Ok(vocab)
    }
}

/// Splits a pre-tokenized line on spaces, skipping empty fields.
pub fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(' ').filter(|t| !t.is_empty())
}

/// A sentence pair with word alignment links `(source position, target position)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlignedSentencePair {
    pub source: Vec<WordId>,
    pub target: Vec<WordId>,
    /// Sorted and deduplicated.
    pub links: Vec<(u32, u32)>,
}

impl AlignedSentencePair {
    /// Normalizes `links` into a sorted set.
    ///
    /// Panics if a link lies outside the sentence pair.
    pub fn new(source: Vec<WordId>, target: Vec<WordId>, mut links: Vec<(u32, u32)>) -> Self {
        links.sort_unstable();
        links.dedup();
        for &(j, i) in &links {
            assert!(
                (j as usize) < source.len() && (i as usize) < target.len(),
                "link {j}-{i} out of range"
            );
        }
        Self {
            source,
            target,
            links,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    pub source_vocab: Vocabulary,
    pub target_vocab: Vocabulary,
    pub pairs: Vec<AlignedSentencePair>,
}

impl ParallelCorpus {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Number of sentence pairs kept for a subsample `fraction` in (0, 1].
    pub fn prefix_len(&self, fraction: f64) -> usize {
        let n = (fraction * self.pairs.len() as f64).ceil() as usize;
        n.min(self.pairs.len())
    }

    /// The leading `fraction` of sentence pairs with vocabularies recounted
    /// over the prefix. Word ids are unchanged: first-occurrence numbering
    /// makes the prefix vocabulary a prefix of the full one.
    pub fn prefix(&self, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Config(format!(
                "subsample fraction {fraction} outside (0, 1]"
            )));
        }
        let pairs = self.pairs[..self.prefix_len(fraction)].to_vec();
        let source_vocab = restrict(&self.source_vocab, pairs.iter().map(|p| &p.source[..]));
        let target_vocab = restrict(&self.target_vocab, pairs.iter().map(|p| &p.target[..]));
        Ok(Self {
            source_vocab,
            target_vocab,
            pairs,
        })
    }
}

fn restrict<'a>(full: &Vocabulary, sentences: impl Iterator<Item = &'a [WordId]>) -> Vocabulary {
    let mut vocab = Vocabulary::new();
    for sentence in sentences {
        for &id in sentence {
            let new_id = vocab.observe(full.token(id));
            debug_assert_eq!(new_id, id);
        }
    }
    vocab
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Loads a sentence-aligned parallel corpus with Pharaoh `j-i` alignments.
pub fn load_parallel_corpus(
    source_path: &Path,
    target_path: &Path,
    alignment_path: &Path,
) -> Result<ParallelCorpus> {
    let source_text = read_to_string(source_path)?;
    let target_text = read_to_string(target_path)?;
    let alignment_text = read_to_string(alignment_path)?;
    parse_parallel_corpus(&source_text, &target_text, &alignment_text, alignment_path)
}

/// In-memory variant of [`load_parallel_corpus`]. `alignment_origin` is used
/// in diagnostics only.
pub fn parse_parallel_corpus(
    source_text: &str,
    target_text: &str,
    alignment_text: &str,
    alignment_origin: &Path,
) -> Result<ParallelCorpus> {
    let src_lines: Vec<&str> = source_text.lines().collect();
    let tgt_lines: Vec<&str> = target_text.lines().collect();
    let aln_lines: Vec<&str> = alignment_text.lines().collect();
    let shortest = src_lines.len().min(tgt_lines.len()).min(aln_lines.len());
    let longest = src_lines.len().max(tgt_lines.len()).max(aln_lines.len());
    if shortest != longest {
        return Err(Error::LineCountMismatch { line: shortest + 1 });
    }

    let mut source_vocab = Vocabulary::new();
    let mut target_vocab = Vocabulary::new();
    let mut pairs = Vec::with_capacity(shortest);
    for (n, ((src, tgt), aln)) in src_lines.iter().zip(&tgt_lines).zip(&aln_lines).enumerate() {
        let source: Vec<WordId> = tokens(src).map(|t| source_vocab.observe(t)).collect();
        let target: Vec<WordId> = tokens(tgt).map(|t| target_vocab.observe(t)).collect();
        let links = parse_alignment_line(aln, source.len(), target.len(), alignment_origin, n + 1)?;
        pairs.push(AlignedSentencePair {
            source,
            target,
            links,
        });
    }
    Ok(ParallelCorpus {
        source_vocab,
        target_vocab,
        pairs,
    })
}

/// Parses one Pharaoh alignment line into a sorted link set.
pub fn parse_alignment_line(
    line: &str,
    src_len: usize,
    tgt_len: usize,
    file: &Path,
    line_no: usize,
) -> Result<Vec<(u32, u32)>> {
    let mut links = Vec::new();
    for token in tokens(line) {
        let malformed = || Error::MalformedLink {
            file: file.to_path_buf(),
            line: line_no,
            token: token.to_owned(),
        };
        let (j, i) = token.split_once('-').ok_or_else(malformed)?;
        if !is_uint(j) || !is_uint(i) {
            return Err(malformed());
        }
        let (j, i): (u32, u32) = match (j.parse(), i.parse()) {
            (Ok(j), Ok(i)) => (j, i),
            _ => return Err(malformed()),
        };
        if j as usize >= src_len || i as usize >= tgt_len {
            return Err(Error::LinkOutOfRange {
                file: file.to_path_buf(),
                line: line_no,
                token: token.to_owned(),
                src_len,
                tgt_len,
            });
        }
        links.push((j, i));
    }
    links.sort_unstable();
    links.dedup();
    Ok(links)
}

fn is_uint(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Fraction of running words in `text` that are absent from `vocab`.
pub fn oov_rate_of_text(text: &str, vocab: &Vocabulary) -> Result<f64> {
    let mut total = 0u64;
    let mut unknown = 0u64;
    for line in text.lines() {
        for token in tokens(line) {
            total += 1;
            if vocab.id(token).is_none() {
                unknown += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::EmptyTestSet);
    }
    Ok(unknown as f64 / total as f64)
}

pub fn oov_rate(test_path: &Path, vocab: &Vocabulary) -> Result<f64> {
    oov_rate_of_text(&read_to_string(test_path)?, vocab)
}
