//! Word-level merging and confidence ordering.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use crate::lexicon::LexiconEntry;
use crate::phonology::{PhonemeString, SandhiRule};
use crate::scoring::{FrequencyTables, ScoreValue, Scorer};
use crate::segmenter::Solution;

/// What survives merging: per segment, the form, whether it is a compound
/// member, and the junction rule that follows it. Phase names and glosses
/// are dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DedupKey(pub Vec<(PhonemeString, bool, Option<Arc<SandhiRule>>)>);

impl DedupKey {
    pub fn of(sol: &Solution) -> Self {
        DedupKey(
            sol.segments
                .iter()
                .map(|s| {
                    (
                        s.form.clone(),
                        s.is_compound_component,
                        s.out_transition.clone(),
                    )
                })
                .collect(),
        )
    }
}

/// One solution per [`DedupKey`], in first-occurrence order. The kept
/// solution collects every analysis of the merged ones.
pub fn dedup(solutions: Vec<Solution>) -> Vec<Solution> {
    let mut index: HashMap<DedupKey, usize> = HashMap::new();
    let mut out: Vec<Solution> = Vec::new();
    // Per kept solution and segment, the distinct entry lists seen so far.
    // Unions are built once at the end since many merged paths share lists.
    let mut seen: Vec<Vec<Vec<Arc<[LexiconEntry]>>>> = Vec::new();
    for sol in solutions {
        let key = DedupKey::of(&sol);
        match index.get(&key) {
            Some(&i) => {
                for (lists, seg) in seen[i].iter_mut().zip(sol.segments) {
                    if !lists.iter().any(|l| Arc::ptr_eq(l, &seg.entries)) {
                        lists.push(seg.entries);
                    }
                }
            }
            None => {
                index.insert(key, out.len());
                seen.push(sol.segments.iter().map(|g| vec![g.entries.clone()]).collect());
                out.push(sol);
            }
        }
    }
    for (sol, lists) in out.iter_mut().zip(seen) {
        for (seg, lists) in sol.segments.iter_mut().zip(lists) {
            if lists.len() < 2 {
                continue;
            }
            let mut union: Vec<LexiconEntry> = Vec::new();
            for e in lists.iter().flat_map(|l| l.iter()) {
                if !union.contains(e) {
                    union.push(e.clone());
                }
            }
            seg.entries = union.into();
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankedSolution {
    /// 1-based position in the output.
    pub rank: usize,
    pub score: ScoreValue,
    pub solution: Solution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankOptions {
    pub dedup: bool,
    pub sort: bool,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions { dedup: true, sort: true }
    }
}

fn by_confidence(a: &(ScoreValue, Solution), b: &(ScoreValue, Solution)) -> Ordering {
    let (sa, a) = a;
    let (sb, b) = b;
    let score = if sa.value == 0.0 && sb.value == 0.0 {
        sb.log_value.total_cmp(&sa.log_value)
    } else {
        sb.value.total_cmp(&sa.value)
    };
    score
        .then_with(|| a.segments.len().cmp(&b.segments.len()))
        .then_with(|| {
            let wa = a.segments.iter().map(|g| g.form.as_str());
            wa.cmp(b.segments.iter().map(|g| g.form.as_str()))
        })
}

/// Scores, merges and sorts. Equal scores go to the shorter solution, then
/// to the lexicographically smaller word sequence, then to enumeration
/// order.
pub fn rank(solutions: Vec<Solution>, scorer: Scorer, t: &FrequencyTables) -> Vec<RankedSolution> {
    rank_with(solutions, scorer, t, RankOptions::default())
}

/// [`rank`] with merging and sorting individually switchable. With both
/// off, solutions keep enumeration order and only gain scores.
pub fn rank_with(solutions: Vec<Solution>, scorer: Scorer, t: &FrequencyTables, opts: RankOptions) -> Vec<RankedSolution> {
    let solutions = if opts.dedup { dedup(solutions) } else { solutions };
    let mut scored: Vec<(ScoreValue, Solution)> = solutions
        .into_iter()
        .map(|mut s| {
            let score = scorer.score(&s, t);
            s.confidence = Some(score.value);
            (score, s)
        })
        .collect();
    if opts.sort {
        scored.sort_by(by_confidence);
    }
    scored
        .into_iter()
        .enumerate()
        .map(|(i, (score, solution))| RankedSolution {
            rank: i + 1,
            score,
            solution,
        })
        .collect()
}
