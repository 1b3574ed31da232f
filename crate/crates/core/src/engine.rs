//! Loaded resources bundled behind one segmentation entry point.

use std::path::{Path, PathBuf};

use crate::automaton::{load_automaton, PhaseAutomaton};
use crate::error::Result;
use crate::lexicon::{load_lexicon, Lexicon};
use crate::phonology::{load_rules, PhonemeString, RuleIndex};
use crate::ranking::{rank_with, RankOptions, RankedSolution};
use crate::scoring::{load_frequencies, FrequencyTables, Scorer};
use crate::segmenter::{build_lattice, enumerate_solutions, Lattice, DEFAULT_SOLUTION_CAP};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResourcePaths {
    pub lexicon: PathBuf,
    pub rules: PathBuf,
    pub automaton: PathBuf,
    pub frequencies: PathBuf,
}

impl ResourcePaths {
    /// The standard layout under a data directory.
    pub fn in_dir(dir: &Path) -> Self {
        ResourcePaths {
            lexicon: dir.join("lexicon.tsv"),
            rules: dir.join("rules.tsv"),
            automaton: dir.join("automaton.tsv"),
            frequencies: dir.join("freq"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SegmentOptions {
    pub scorer: Scorer,
    pub rank: RankOptions,
    pub cap: Option<usize>,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        SegmentOptions {
            scorer: Scorer::Pop,
            rank: RankOptions::default(),
            cap: Some(DEFAULT_SOLUTION_CAP),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segmentation {
    pub solutions: Vec<RankedSolution>,
    pub truncated: bool,
    /// Solutions before merging, as counted on the lattice.
    pub total_paths: u128,
}

#[derive(Clone, Debug)]
pub struct Engine {
    pub automaton: PhaseAutomaton,
    pub lexicon: Lexicon,
    pub rules: RuleIndex,
    pub tables: FrequencyTables,
}

impl Engine {
    pub fn load(paths: &ResourcePaths) -> Result<Self> {
        let automaton = load_automaton(&paths.automaton)?;
        let lexicon = load_lexicon(&paths.lexicon, &automaton)?;
        let rules = load_rules(&paths.rules)?;
        let tables = load_frequencies(&paths.frequencies)?;
        Ok(Engine {
            automaton,
            lexicon,
            rules,
            tables,
        })
    }

    pub fn lattice(&self, text: &PhonemeString) -> Result<Lattice> {
        build_lattice(text, &self.lexicon, &self.rules, &self.automaton)
    }

    pub fn segment(&self, text: &PhonemeString, opts: &SegmentOptions) -> Result<Segmentation> {
        let lattice = self.lattice(text)?;
        Ok(self.rank_lattice(&lattice, opts))
    }

    pub fn rank_lattice(&self, lattice: &Lattice, opts: &SegmentOptions) -> Segmentation {
        let e = enumerate_solutions(lattice, opts.cap);
        Segmentation {
            solutions: rank_with(e.solutions, opts.scorer, &self.tables, opts.rank),
            truncated: e.truncated,
            total_paths: e.total_paths,
        }
    }
}
