//! Phrase translation models smoothed by vocabulary reduction.
//!
//! The crate turns a word-aligned parallel corpus into a phrase table whose
//! relative-frequency scores are complemented by two label-based smoothing
//! models (map-all and map-each), learns the word classes used as labels,
//! and provides the metrics used to compare the resulting systems.

pub mod analysis;
pub mod clustering;
pub mod config;
pub mod corpus;
pub mod error;
pub mod extraction;
pub mod pipeline;
pub mod smoothing;
pub mod table;

pub use clustering::{ClassId, ClusteringState, InitMethod, LabelMap};
pub use config::{LabelSource, RunConfig};
pub use corpus::{AlignedSentencePair, ParallelCorpus, Vocabulary, WordId};
pub use error::{Error, Result};
pub use extraction::{PhraseCountTable, PhrasePair};
pub use smoothing::{Direction, GeneralizedCountTables, GeneralizedToken, LabelMaps, Weighting};
pub use table::FeatureSelection;
