//! Accept/reject filtering of ranked solutions.
//!
//! Pruning is a pure function of the solution list and the constraints, so
//! the service keeps no session: clients resend the whole constraint set.

use std::fmt;

use viccheda_core::{RankedSolution, Solution};

use crate::dto::{PruneConstraint, WordChoice};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PruneError {
    /// A span that is empty, reversed or past the end of the input.
    BadSpan(WordChoice),
    /// The same word both accepted and rejected.
    Conflict(WordChoice),
}

impl fmt::Display for PruneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PruneError::BadSpan(c) => write!(f, "span {:?} of `{}` is not within the input", c.span, c.form),
            PruneError::Conflict(c) => write!(f, "`{}` at {:?} is both accepted and rejected", c.form, c.span),
        }
    }
}

impl std::error::Error for PruneError {}

pub fn validate(c: &PruneConstraint, text_len: usize) -> Result<(), PruneError> {
    for choice in c.accepted.iter().chain(&c.rejected) {
        let [start, end] = choice.span;
        if start >= end || end > text_len {
            return Err(PruneError::BadSpan(choice.clone()));
        }
    }
    if let Some(both) = c.accepted.iter().find(|a| c.rejected.contains(a)) {
        return Err(PruneError::Conflict(both.clone()));
    }
    Ok(())
}

pub fn contains(sol: &Solution, choice: &WordChoice) -> bool {
    sol.segments
        .iter()
        .any(|s| s.span.0 == choice.span[0] && s.span.1 == choice.span[1] && s.form.as_str() == choice.form)
}

/// Keeps the solutions holding every accepted word and no rejected one, in
/// their existing order, and renumbers ranks from 1.
pub fn prune(solutions: &[RankedSolution], c: &PruneConstraint) -> Vec<RankedSolution> {
    solutions
        .iter()
        .filter(|r| c.accepted.iter().all(|a| contains(&r.solution, a)))
        .filter(|r| !c.rejected.iter().any(|x| contains(&r.solution, x)))
        .enumerate()
        .map(|(i, r)| RankedSolution {
            rank: i + 1,
            ..r.clone()
        })
        .collect()
}
