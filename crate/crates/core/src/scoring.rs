//! Frequency tables and solution scorers.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::segmenter::{Segment, Solution};
use crate::tsv;

pub const SAMASA_WORDS: &str = "samasa_words.tsv";
pub const SANDHI_WORDS: &str = "sandhi_words.tsv";
pub const SAMASA_TRANSITIONS: &str = "samasa_transitions.tsv";
pub const SANDHI_TRANSITIONS: &str = "sandhi_transitions.tsv";

/// A `token -> count` table with its total.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountTable {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl CountTable {
    pub fn from_counts<K: Into<String>>(counts: impl IntoIterator<Item = (K, u64)>) -> Self {
        let mut t = CountTable::default();
        for (k, c) in counts {
            t.add(k.into(), c);
        }
        t
    }

    fn add(&mut self, key: String, count: u64) {
        *self.counts.entry(key).or_insert(0) += count;
        self.total += count;
    }

    /// Parses `token \t count` rows. Repeated tokens are summed.
    pub fn from_tsv(source_name: &str, text: &str) -> Result<Self> {
        let mut t = CountTable::default();
        for row in tsv::rows(source_name, text) {
            let (line, fields) = row?;
            if fields.len() != 2 || fields[0].is_empty() {
                return Err(tsv::malformed(source_name, line, "expected `token<TAB>count`"));
            }
            let count: i64 = fields[1]
                .parse()
                .map_err(|_| tsv::malformed(source_name, line, format!("bad count `{}`", fields[1])))?;
            if count < 0 {
                return Err(Error::NegativeCount {
                    source_name: source_name.to_string(),
                    line,
                });
            }
            if count == 0 {
                return Err(Error::ZeroCount {
                    source_name: source_name.to_string(),
                    line,
                });
            }
            t.add(fields[0].to_string(), count as u64);
        }
        Ok(t)
    }

    pub fn get(&self, key: &str) -> Option<u64> {
        self.counts.get(key).copied()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, &c)| (k.as_str(), c))
    }

    /// Every count multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Self {
        CountTable::from_counts(self.counts.iter().map(|(key, &c)| (key.clone(), c * k)))
    }
}

/// How counts become probabilities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Normalization {
    /// `count / (total + 1)`, absent keys count 1.
    #[default]
    AddOne,
    /// `count / total`, absent keys count 1. Only meaningful when every
    /// looked-up key is present.
    Relative,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FrequencyTables {
    pub samasa_words: CountTable,
    pub sandhi_words: CountTable,
    pub samasa_transitions: CountTable,
    pub sandhi_transitions: CountTable,
    pub normalization: Normalization,
}

impl FrequencyTables {
    fn probability(&self, table: &CountTable, key: &str) -> f64 {
        let count = table.get(key).unwrap_or(1) as f64;
        match self.normalization {
            Normalization::AddOne => count / (table.total() as f64 + 1.0),
            Normalization::Relative => count / table.total().max(1) as f64,
        }
    }

    pub fn scaled(&self, k: u64) -> Self {
        FrequencyTables {
            samasa_words: self.samasa_words.scaled(k),
            sandhi_words: self.sandhi_words.scaled(k),
            samasa_transitions: self.samasa_transitions.scaled(k),
            sandhi_transitions: self.sandhi_transitions.scaled(k),
            normalization: self.normalization,
        }
    }
}

/// Loads the four tables from `dir`. A missing file is an empty table.
pub fn load_frequencies(dir: &Path) -> Result<FrequencyTables> {
    let load = |name: &str| -> Result<CountTable> {
        let path = dir.join(name);
        if !path.exists() {
            return Ok(CountTable::default());
        }
        let text = tsv::read_file(&path)?;
        CountTable::from_tsv(&path.display().to_string(), &text)
    };
    Ok(FrequencyTables {
        samasa_words: load(SAMASA_WORDS)?,
        sandhi_words: load(SANDHI_WORDS)?,
        samasa_transitions: load(SAMASA_TRANSITIONS)?,
        sandhi_transitions: load(SANDHI_TRANSITIONS)?,
        normalization: Normalization::AddOne,
    })
}

pub fn word_probability(seg: &Segment, t: &FrequencyTables) -> f64 {
    let table = if seg.is_compound_component {
        &t.samasa_words
    } else {
        &t.sandhi_words
    };
    t.probability(table, seg.form.as_str())
}

/// Probability of the junction after `seg`. The final word and chunk
/// boundaries score 1.
pub fn transition_probability(seg: &Segment, t: &FrequencyTables) -> f64 {
    match &seg.out_transition {
        None => 1.0,
        Some(rule) if rule.is_boundary() => 1.0,
        Some(rule) => {
            let table = if seg.is_compound_component {
                &t.samasa_transitions
            } else {
                &t.sandhi_transitions
            };
            t.probability(table, &rule.rule_id)
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scorer {
    #[default]
    Pop,
    Mittal,
    Kumar,
    Unigram,
}

impl Scorer {
    pub const ALL: [Scorer; 4] = [Scorer::Pop, Scorer::Mittal, Scorer::Kumar, Scorer::Unigram];

    pub fn as_str(self) -> &'static str {
        match self {
            Scorer::Pop => "pop",
            Scorer::Mittal => "mittal",
            Scorer::Kumar => "kumar",
            Scorer::Unigram => "unigram",
        }
    }

    pub fn score(self, sol: &Solution, t: &FrequencyTables) -> ScoreValue {
        match self {
            Scorer::Pop => score_pop(sol, t),
            Scorer::Mittal => score_mittal(sol, t),
            Scorer::Kumar => score_kumar(sol, t),
            Scorer::Unigram => score_unigram(sol, t),
        }
    }
}

impl fmt::Display for Scorer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scorer {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Scorer::ALL
            .into_iter()
            .find(|sc| sc.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown scorer `{s}` (expected pop, mittal, kumar or unigram)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreValue {
    /// The plain product.
    pub value: f64,
    /// Natural log of the product, summed factor by factor so that long
    /// solutions still compare after `value` underflows.
    pub log_value: f64,
    pub scorer: Scorer,
}

impl ScoreValue {
    fn from_factors(scorer: Scorer, factors: impl IntoIterator<Item = f64>) -> Self {
        let (value, log_value) = factors
            .into_iter()
            .fold((1.0, 0.0), |(v, l), f: f64| (v * f, l + f.ln()));
        ScoreValue { value, log_value, scorer }
    }
}

/// `∏ P_w · P_t` over all segments.
pub fn score_pop(sol: &Solution, t: &FrequencyTables) -> ScoreValue {
    let factors = sol
        .segments
        .iter()
        .flat_map(|s| [word_probability(s, t), transition_probability(s, t)]);
    ScoreValue::from_factors(Scorer::Pop, factors)
}

/// `∏_{i<m} (P(c_i) + P(c_{i+1})) · P(r_i) / m`.
pub fn score_mittal(sol: &Solution, t: &FrequencyTables) -> ScoreValue {
    let segs = &sol.segments;
    let m = segs.len().max(1) as f64;
    let factors = segs
        .windows(2)
        .flat_map(|w| {
            [
                word_probability(&w[0], t) + word_probability(&w[1], t),
                transition_probability(&w[0], t),
            ]
        })
        .chain([1.0 / m]);
    ScoreValue::from_factors(Scorer::Mittal, factors)
}

/// `∏ P(c_i) · ∏ P(r_i) / m`.
pub fn score_kumar(sol: &Solution, t: &FrequencyTables) -> ScoreValue {
    let segs = &sol.segments;
    let m = segs.len().max(1) as f64;
    let words = segs.iter().map(|s| word_probability(s, t));
    let rules = segs.iter().map(|s| transition_probability(s, t));
    ScoreValue::from_factors(Scorer::Kumar, words.chain(rules).chain([1.0 / m]))
}

/// `∏ P(c_i)`.
pub fn score_unigram(sol: &Solution, t: &FrequencyTables) -> ScoreValue {
    ScoreValue::from_factors(Scorer::Unigram, sol.segments.iter().map(|s| word_probability(s, t)))
}
