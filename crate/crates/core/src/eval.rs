//! Gold-corpus evaluation and old/new comparison tables.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::engine::{Engine, SegmentOptions};
use crate::error::{Error, Result};
use crate::phonology::{parse_text, PhonemeString, Scheme};
use crate::tsv;

/// Ranks 1 to 5 get their own histogram bucket; the last bucket holds
/// everything later.
pub const HISTOGRAM_BUCKETS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusItem {
    pub sandhied: PhonemeString,
    pub gold: Vec<PhonemeString>,
}

/// Parses `sandhied \t gold words separated by spaces`.
pub fn parse_corpus(source_name: &str, text: &str) -> Result<Vec<CorpusItem>> {
    let mut items = Vec::new();
    for row in tsv::rows(source_name, text) {
        let (line, fields) = row?;
        let bad = |reason: String| tsv::malformed(source_name, line, reason);
        if fields.len() != 2 {
            return Err(bad("expected `sandhied<TAB>gold split`".into()));
        }
        let sandhied = parse_text(fields[0], Scheme::Slp1).map_err(|e| bad(e.to_string()))?;
        let gold = fields[1]
            .split(' ')
            .filter(|w| !w.is_empty())
            .map(PhonemeString::new)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| bad(e.to_string()))?;
        if sandhied.is_empty() || gold.is_empty() {
            return Err(bad("empty sandhied text or gold split".into()));
        }
        items.push(CorpusItem { sandhied, gold });
    }
    Ok(items)
}

pub fn load_corpus(path: &Path) -> Result<Vec<CorpusItem>> {
    let text = tsv::read_file(path)?;
    parse_corpus(&path.display().to_string(), &text)
}

/// Result for one corpus item.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ItemOutcome {
    pub solutions: usize,
    /// 1-based rank of the first solution matching the gold words.
    pub gold_position: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Denominator {
    /// All corpus items.
    Total,
    /// Items whose gold split was found.
    WithCorrect,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvalReport {
    pub total: usize,
    pub with_correct: usize,
    pub position_histogram: [usize; HISTOGRAM_BUCKETS],
    /// Items with exactly 1, 2 and 3 solutions.
    pub entries_with_k_solutions: [usize; 3],
    pub total_solutions: usize,
    pub avg_solutions: f64,
    pub avg_correct_position: f64,
    /// Set when an average had an empty denominator and is reported as 0.
    pub degenerate: bool,
    pub items: Vec<ItemOutcome>,
}

fn percent(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        100.0 * n as f64 / d as f64
    }
}

impl EvalReport {
    pub fn from_outcomes(items: Vec<ItemOutcome>) -> Self {
        let mut r = EvalReport {
            total: items.len(),
            ..Default::default()
        };
        let mut position_sum = 0usize;
        for item in &items {
            r.total_solutions += item.solutions;
            if (1..=3).contains(&item.solutions) {
                r.entries_with_k_solutions[item.solutions - 1] += 1;
            }
            if let Some(pos) = item.gold_position {
                r.with_correct += 1;
                position_sum += pos;
                r.position_histogram[pos.min(HISTOGRAM_BUCKETS) - 1] += 1;
            }
        }
        r.avg_solutions = if r.total == 0 {
            0.0
        } else {
            r.total_solutions as f64 / r.total as f64
        };
        r.avg_correct_position = if r.with_correct == 0 {
            0.0
        } else {
            position_sum as f64 / r.with_correct as f64
        };
        r.degenerate = r.with_correct == 0;
        r.items = items;
        r
    }

    pub fn incorrect(&self) -> usize {
        self.total - self.with_correct
    }

    pub fn recall(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.with_correct as f64 / self.total as f64
        }
    }

    pub fn recall_percent(&self) -> f64 {
        percent(self.with_correct, self.total)
    }

    pub fn incorrect_percent(&self) -> f64 {
        percent(self.incorrect(), self.total)
    }

    /// Share of the histogram bucket `rank` (1-based; 6 means later than 5).
    pub fn position_percent(&self, rank: usize, denom: Denominator) -> f64 {
        let n = self.position_histogram[rank - 1];
        match denom {
            Denominator::Total => percent(n, self.total),
            Denominator::WithCorrect => percent(n, self.with_correct),
        }
    }

    /// Share of gold splits found within the first `k` ranks.
    pub fn top_k_percent(&self, k: usize, denom: Denominator) -> f64 {
        let n: usize = self.position_histogram[..k.min(HISTOGRAM_BUCKETS - 1)].iter().sum();
        match denom {
            Denominator::Total => percent(n, self.total),
            Denominator::WithCorrect => percent(n, self.with_correct),
        }
    }

    pub fn k_solutions_percent(&self, k: usize) -> f64 {
        percent(self.entries_with_k_solutions[k - 1], self.total)
    }

    /// Rows of `(label, count, percent of total, percent of with_correct)`.
    pub fn rows(&self) -> Vec<(String, usize, Option<f64>, Option<f64>)> {
        let mut rows = vec![
            ("Input text".to_string(), self.total, None, None),
            ("Correct sol".to_string(), self.with_correct, Some(self.recall_percent()), None),
        ];
        for rank in 1..=HISTOGRAM_BUCKETS {
            let label = if rank < HISTOGRAM_BUCKETS {
                format!("Correct sol at {rank}")
            } else {
                format!("Correct sol after {}", HISTOGRAM_BUCKETS - 1)
            };
            rows.push((
                label,
                self.position_histogram[rank - 1],
                Some(self.position_percent(rank, Denominator::Total)),
                Some(self.position_percent(rank, Denominator::WithCorrect)),
            ));
        }
        rows.push(("Incorrect sol".into(), self.incorrect(), Some(self.incorrect_percent()), None));
        for k in 1..=3 {
            rows.push((
                format!("Entries with {k} sol"),
                self.entries_with_k_solutions[k - 1],
                Some(self.k_solutions_percent(k)),
                None,
            ));
        }
        rows
    }

    /// Aligned plain-text rendering.
    pub fn to_table(&self) -> String {
        let cell = |p: Option<f64>| p.map_or("-".to_string(), |v| format!("{v:.2}"));
        let mut out = String::new();
        writeln!(out, "{:<24} {:>8} {:>8} {:>10}", "", "count", "%total", "%correct").unwrap();
        for (label, n, pt, pc) in self.rows() {
            writeln!(out, "{label:<24} {n:>8} {:>8} {:>10}", cell(pt), cell(pc)).unwrap();
        }
        writeln!(out, "{:<24} {:>8.2}", "Avg solutions", self.avg_solutions).unwrap();
        writeln!(out, "{:<24} {:>8.2}", "Avg correct position", self.avg_correct_position).unwrap();
        if self.degenerate {
            writeln!(out, "(averages over an empty set are reported as 0)").unwrap();
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EvalOptions {
    pub segment: SegmentOptions,
}

pub fn evaluate_item(item: &CorpusItem, engine: &Engine, opts: &EvalOptions) -> ItemOutcome {
    let Ok(seg) = engine.segment(&item.sandhied, &opts.segment) else {
        return ItemOutcome::default();
    };
    let gold: Vec<&str> = item.gold.iter().map(|w| w.as_str()).collect();
    ItemOutcome {
        solutions: seg.solutions.len(),
        gold_position: seg
            .solutions
            .iter()
            .find(|r| r.solution.words() == gold)
            .map(|r| r.rank),
    }
}

/// Evaluates items in parallel; the report depends only on corpus order.
pub fn evaluate(corpus: &[CorpusItem], engine: &Engine, opts: &EvalOptions) -> EvalReport {
    let items = corpus.par_iter().map(|item| evaluate_item(item, engine, opts)).collect();
    EvalReport::from_outcomes(items)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub old_count: usize,
    pub old_percent: Option<f64>,
    pub new_count: usize,
    pub new_percent: Option<f64>,
}

impl ComparisonRow {
    pub fn delta(&self) -> Option<f64> {
        Some(self.new_percent? - self.old_percent?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub old_avg_solutions: f64,
    pub new_avg_solutions: f64,
    pub old_avg_position: f64,
    pub new_avg_position: f64,
}

/// Side-by-side table of two runs over the same corpus. Position rows use
/// the with-correct denominator.
pub fn compare(old: &EvalReport, new: &EvalReport) -> Result<Comparison> {
    if old.total != new.total {
        return Err(Error::DifferentCorpora(old.total, new.total));
    }
    let pick = |(label, n, pt, pc): (String, usize, Option<f64>, Option<f64>)| (label, n, pc.or(pt));
    let mut rows: Vec<ComparisonRow> = old
        .rows()
        .into_iter()
        .map(pick)
        .zip(new.rows().into_iter().map(pick))
        .map(|((label, on, op), (_, nn, np))| ComparisonRow {
            label,
            old_count: on,
            old_percent: op,
            new_count: nn,
            new_percent: np,
        })
        .collect();
    let top3 = |r: &EvalReport| r.position_histogram[..3].iter().sum();
    rows.push(ComparisonRow {
        label: "Correct sol in top 3".into(),
        old_count: top3(old),
        old_percent: Some(old.top_k_percent(3, Denominator::WithCorrect)),
        new_count: top3(new),
        new_percent: Some(new.top_k_percent(3, Denominator::WithCorrect)),
    });
    Ok(Comparison {
        rows,
        old_avg_solutions: old.avg_solutions,
        new_avg_solutions: new.avg_solutions,
        old_avg_position: old.avg_correct_position,
        new_avg_position: new.avg_correct_position,
    })
}

impl Comparison {
    pub fn to_table(&self) -> String {
        let cell = |p: Option<f64>| p.map_or("-".to_string(), |v| format!("{v:.2}"));
        let delta = |p: Option<f64>| p.map_or("-".to_string(), |v| format!("{v:+.2}"));
        let mut out = String::new();
        writeln!(out, "{:<24} {:>8} {:>8} {:>8} {:>8} {:>8}", "", "old", "%", "new", "%", "delta").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<24} {:>8} {:>8} {:>8} {:>8} {:>8}",
                r.label,
                r.old_count,
                cell(r.old_percent),
                r.new_count,
                cell(r.new_percent),
                delta(r.delta())
            )
            .unwrap();
        }
        writeln!(out, "{:<24} {:>8.2} {:>8} {:>8.2}", "Avg solutions", self.old_avg_solutions, "", self.new_avg_solutions).unwrap();
        writeln!(out, "{:<24} {:>8.2} {:>8} {:>8.2}", "Avg correct position", self.old_avg_position, "", self.new_avg_position).unwrap();
        out
    }
}
