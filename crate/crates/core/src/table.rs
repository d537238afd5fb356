//! Phrase table output.
//!
//! Records are `src ||| tgt ||| features ||| alignment`, preceded by a
//! `#features:` header naming the columns in order.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::extraction::format_alignment;
use crate::smoothing::{ScoredPair, SmoothedScores};

/// Which feature groups are emitted. The relative frequencies are always
/// present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FeatureSelection {
    pub lexical: bool,
    pub map_all: bool,
    pub map_each: bool,
    pub lexical_classes: bool,
}

impl Default for FeatureSelection {
    fn default() -> Self {
        Self {
            lexical: true,
            map_all: true,
            map_each: true,
            lexical_classes: false,
        }
    }
}

type Getter = fn(&SmoothedScores) -> f64;

const GROUPS: [(&str, [(&str, Getter); 2]); 5] = [
    (
        "std",
        [
            ("p_std_s2t", |s| s.p_std_s2t),
            ("p_std_t2s", |s| s.p_std_t2s),
        ],
    ),
    (
        "lex",
        [("lex_s2t", |s| s.lex_s2t), ("lex_t2s", |s| s.lex_t2s)],
    ),
    (
        "all",
        [
            ("p_all_s2t", |s| s.p_all_s2t),
            ("p_all_t2s", |s| s.p_all_t2s),
        ],
    ),
    (
        "each",
        [
            ("p_each_s2t", |s| s.p_each_s2t),
            ("p_each_t2s", |s| s.p_each_t2s),
        ],
    ),
    (
        "lex-all",
        [
            ("lex_all_s2t", |s| s.lex_all_s2t),
            ("lex_all_t2s", |s| s.lex_all_t2s),
        ],
    ),
];

impl FeatureSelection {
    /// Parses a comma-separated list of groups: `std`, `lex`, `all`, `each`, `lex-all`.
    pub fn parse(groups: &str) -> Result<Self> {
        let mut sel = FeatureSelection {
            lexical: false,
            map_all: false,
            map_each: false,
            lexical_classes: false,
        };
        for group in groups.split(',').map(str::trim).filter(|g| !g.is_empty()) {
            match group {
                "std" => {}
                "lex" => sel.lexical = true,
                "all" => sel.map_all = true,
                "each" => sel.map_each = true,
                "lex-all" => sel.lexical_classes = true,
                other => return Err(Error::Config(format!("unknown feature group `{other}`"))),
            }
        }
        Ok(sel)
    }

    fn enabled(&self, group: &str) -> bool {
        match group {
            "std" => true,
            "lex" => self.lexical,
            "all" => self.map_all,
            "each" => self.map_each,
            "lex-all" => self.lexical_classes,
            _ => unreachable!(),
        }
    }

    /// Group names in column order, e.g. `std,lex,all,each`.
    pub fn list(&self) -> String {
        GROUPS
            .iter()
            .filter(|(g, _)| self.enabled(g))
            .map(|(g, _)| *g)
            .collect::<Vec<_>>()
            .join(",")
    }

    fn columns(&self) -> impl Iterator<Item = (&'static str, Getter)> + '_ {
        GROUPS
            .iter()
            .filter(|(g, _)| self.enabled(g))
            .flat_map(|(_, cols)| cols.iter().copied())
    }

    /// Column names in emission order.
    pub fn names(&self) -> Vec<&'static str> {
        self.columns().map(|(n, _)| n).collect()
    }

    pub fn values(&self, scores: &SmoothedScores) -> Vec<f64> {
        self.columns().map(|(_, get)| get(scores)).collect()
    }
}

/// Six significant digits; scientific notation below 1e-4.
pub fn format_prob(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if x.abs() < 1e-4 {
        let s = format!("{x:.5e}");
        let (mantissa, exp) = s.split_once('e').expect("scientific format");
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_owned()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes one record per distinct pair, sorted by the rendered (src, tgt)
/// strings. Returns the record count.
pub fn write_table<W: Write>(
    scored: &[ScoredPair],
    src_vocab: &Vocabulary,
    tgt_vocab: &Vocabulary,
    selection: FeatureSelection,
    mut out: W,
) -> Result<usize> {
    let mut rows = Vec::with_capacity(scored.len());
    for sp in scored {
        let src = src_vocab.render(&sp.pair.src);
        let tgt = tgt_vocab.render(&sp.pair.tgt);
        let mut features = Vec::new();
        for ((name, _), value) in selection.columns().zip(selection.values(&sp.scores)) {
            if !(value > 0.0 && value <= 1.0 + 1e-12) {
                return Err(Error::InvalidFeature {
                    feature: name,
                    value,
                    src,
                    tgt,
                });
            }
            features.push(format_prob(value.min(1.0)));
        }
        rows.push((
            src,
            tgt,
            features.join(" "),
            format_alignment(&sp.pair.align),
        ));
    }
    rows.sort();
    let io = |e| Error::io("<phrase table>", e);
    writeln!(out, "#features: {}", selection.names().join(" ")).map_err(io)?;
    for (src, tgt, features, align) in &rows {
        writeln!(out, "{src} ||| {tgt} ||| {features} ||| {align}").map_err(io)?;
    }
    out.flush().map_err(io)?;
    Ok(rows.len())
}

pub fn emit_table(
    scored: &[ScoredPair],
    src_vocab: &Vocabulary,
    tgt_vocab: &Vocabulary,
    selection: FeatureSelection,
    path: &Path,
) -> Result<usize> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_table(
        scored,
        src_vocab,
        tgt_vocab,
        selection,
        BufWriter::new(file),
    )
    .map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}
