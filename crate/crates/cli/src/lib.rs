//! Command line and HTTP front end for the viccheda segmenter.

pub mod dto;
pub mod prune;
pub mod server;

use std::path::{Path, PathBuf};

use anyhow::Context as _;
use viccheda_core::{
    parse_text, Engine, Lattice, PhonemeString, RankOptions, ResourcePaths, Scheme, Scorer, SegmentOptions,
    Segmentation,
};

/// Resource locations after applying flags and environment overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResourceSet {
    pub paths: ResourcePaths,
}

impl ResourceSet {
    /// Starts from the standard layout under `data_dir` and replaces any
    /// path given explicitly.
    pub fn resolve(
        data_dir: &Path,
        lexicon: Option<PathBuf>,
        rules: Option<PathBuf>,
        automaton: Option<PathBuf>,
        frequencies: Option<PathBuf>,
    ) -> Self {
        let mut paths = ResourcePaths::in_dir(data_dir);
        if let Some(p) = lexicon {
            paths.lexicon = p;
        }
        if let Some(p) = rules {
            paths.rules = p;
        }
        if let Some(p) = automaton {
            paths.automaton = p;
        }
        if let Some(p) = frequencies {
            paths.frequencies = p;
        }
        ResourceSet { paths }
    }

    pub fn load(&self) -> anyhow::Result<Engine> {
        for (what, path) in [
            ("lexicon", &self.paths.lexicon),
            ("rules", &self.paths.rules),
            ("automaton", &self.paths.automaton),
        ] {
            anyhow::ensure!(path.is_file(), "{what} file `{}` does not exist", path.display());
        }
        let engine = Engine::load(&self.paths).context("loading resources")?;
        for w in engine.automaton.warnings() {
            log::warn!("automaton: {w}");
        }
        Ok(engine)
    }
}

/// Per-request segmentation settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RequestOptions {
    pub scorer: Scorer,
    pub dedup: bool,
    pub sort: bool,
    pub cap: Option<usize>,
}

impl Default for RequestOptions {
    fn default() -> Self {
        let d = SegmentOptions::default();
        RequestOptions {
            scorer: d.scorer,
            dedup: d.rank.dedup,
            sort: d.rank.sort,
            cap: d.cap,
        }
    }
}

impl RequestOptions {
    pub fn segment_options(&self) -> SegmentOptions {
        SegmentOptions {
            scorer: self.scorer,
            rank: RankOptions {
                dedup: self.dedup,
                sort: self.sort,
            },
            cap: self.cap,
        }
    }
}

pub struct Segmented {
    pub text: PhonemeString,
    pub lattice: Lattice,
    pub segmentation: Segmentation,
}

/// Parses raw input and runs the whole pipeline on it.
pub fn segment_raw(engine: &Engine, raw: &str, opts: &RequestOptions) -> viccheda_core::Result<Segmented> {
    let text = parse_text(raw, Scheme::Slp1)?;
    let lattice = engine.lattice(&text)?;
    let segmentation = engine.rank_lattice(&lattice, &opts.segment_options());
    Ok(Segmented {
        text,
        lattice,
        segmentation,
    })
}
