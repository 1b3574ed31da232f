//! Sanskrit external-sandhi segmentation.
//!
//! Text is split into lexicon words by inverting sandhi rules over a
//! lattice whose word sequences are constrained by a phase automaton.
//! Solutions are merged at the word level and ranked by corpus
//! frequencies.

pub mod automaton;
pub mod engine;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod phonology;
pub mod ranking;
pub mod scoring;
pub mod segmenter;
mod tsv;

pub use automaton::{load_automaton, Phase, PhaseAutomaton, StateId};
pub use engine::{Engine, ResourcePaths, SegmentOptions, Segmentation};
pub use error::{Error, Result};
pub use eval::{compare, evaluate, load_corpus, Comparison, CorpusItem, Denominator, EvalOptions, EvalReport};
pub use lexicon::{load_lexicon, match_prefixes, Lexicon, LexiconEntry};
pub use phonology::{load_rules, parse_text, Context, PhonemeString, RuleIndex, SandhiRule, Scheme};
pub use ranking::{dedup, rank, rank_with, DedupKey, RankOptions, RankedSolution};
pub use scoring::{load_frequencies, FrequencyTables, Normalization, ScoreValue, Scorer};
pub use segmenter::{build_lattice, enumerate_solutions, synthesize, Enumeration, Lattice, Segment, Solution};
