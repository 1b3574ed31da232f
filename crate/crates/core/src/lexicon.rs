//! Inflected-form lexicon with a phoneme trie for prefix queries.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use crate::automaton::{Phase, PhaseAutomaton};
use crate::error::{Error, Result};
use crate::phonology::PhonemeString;
use crate::tsv;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LexiconEntry {
    pub surface: PhonemeString,
    pub phase: Phase,
    pub stem: String,
    /// Morphological analysis, e.g. `m. sg. nom.`.
    pub gloss: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct TrieNodeId(u32);

#[derive(Clone, Debug, Default)]
struct TrieNode {
    children: Vec<(u8, u32)>,
    entries: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    by_surface: BTreeMap<PhonemeString, Vec<usize>>,
    nodes: Vec<TrieNode>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon {
            entries: Vec::new(),
            by_surface: BTreeMap::new(),
            nodes: vec![TrieNode::default()],
        }
    }
}

/// Words of the lexicon starting at some text position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixMatch<'a> {
    /// Exclusive end position of the match.
    pub end: usize,
    pub entries: Vec<&'a LexiconEntry>,
}

impl Lexicon {
    pub fn from_entries(entries: impl IntoIterator<Item = LexiconEntry>) -> Self {
        let mut lex = Lexicon::default();
        let mut seen = HashSet::new();
        for entry in entries {
            if seen.insert(entry.clone()) {
                lex.insert(entry);
            }
        }
        lex
    }

    /// Parses `surface \t phase \t stem \t gloss` rows. Phases are resolved
    /// against `automaton`.
    pub fn from_tsv(source_name: &str, text: &str, automaton: &PhaseAutomaton) -> Result<Self> {
        let mut entries = Vec::new();
        for row in tsv::rows(source_name, text) {
            let (line, fields) = row?;
            let bad = |reason: String| tsv::malformed(source_name, line, reason);
            if fields.len() != 4 {
                return Err(bad("expected 4 tab-separated columns".into()));
            }
            if fields[0].is_empty() {
                return Err(bad("empty surface".into()));
            }
            let surface = PhonemeString::new(fields[0]).map_err(|e| bad(e.to_string()))?;
            let phase = automaton
                .phase(fields[1])
                .ok_or_else(|| Error::UnknownPhase(fields[1].to_string()))?;
            entries.push(LexiconEntry {
                surface,
                phase,
                stem: fields[2].to_string(),
                gloss: fields[3].to_string(),
            });
        }
        Ok(Lexicon::from_entries(entries))
    }

    fn insert(&mut self, entry: LexiconEntry) {
        let idx = self.entries.len();
        let mut node = 0usize;
        for &unit in entry.surface.units() {
            node = match self.nodes[node].children.binary_search_by_key(&unit, |&(u, _)| u) {
                Ok(pos) => self.nodes[node].children[pos].1 as usize,
                Err(pos) => {
                    let child = self.nodes.len();
                    self.nodes.push(TrieNode::default());
                    self.nodes[node].children.insert(pos, (unit, child as u32));
                    child
                }
            };
        }
        self.nodes[node].entries.push(idx as u32);
        self.by_surface.entry(entry.surface.clone()).or_default().push(idx);
        self.entries.push(entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn entry(&self, idx: usize) -> &LexiconEntry {
        &self.entries[idx]
    }

    /// All analyses of an exact surface form.
    pub fn lookup(&self, surface: &PhonemeString) -> Vec<&LexiconEntry> {
        self.by_surface
            .get(surface)
            .map(|ids| ids.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &PhonemeString> {
        self.by_surface.keys()
    }

    pub(crate) fn root(&self) -> TrieNodeId {
        TrieNodeId(0)
    }

    pub(crate) fn child(&self, node: TrieNodeId, unit: u8) -> Option<TrieNodeId> {
        let children = &self.nodes[node.0 as usize].children;
        children
            .binary_search_by_key(&unit, |&(u, _)| u)
            .ok()
            .map(|pos| TrieNodeId(children[pos].1))
    }

    pub(crate) fn walk(&self, mut node: TrieNodeId, units: &[u8]) -> Option<TrieNodeId> {
        for &u in units {
            node = self.child(node, u)?;
        }
        Some(node)
    }

    /// Indices of entries whose surface ends exactly at `node`.
    pub(crate) fn entries_at(&self, node: TrieNodeId) -> &[u32] {
        &self.nodes[node.0 as usize].entries
    }

    /// Entry ids stored along every trie path, for consistency checks.
    pub fn trie_entry_ids(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .nodes
            .iter()
            .flat_map(|n| n.entries.iter().map(|&i| i as usize))
            .collect();
        out.sort_unstable();
        out
    }
}

/// Every lexicon word that starts at `start`, including words that run
/// across later split locations. Sorted by ascending end.
pub fn match_prefixes<'a>(text: &PhonemeString, start: usize, lex: &'a Lexicon) -> Vec<PrefixMatch<'a>> {
    let mut out = Vec::new();
    let units = text.units();
    if start >= units.len() {
        return out;
    }
    let mut node = lex.root();
    for (offset, &unit) in units[start..].iter().enumerate() {
        match lex.child(node, unit) {
            Some(next) => node = next,
            None => break,
        }
        let ids = lex.entries_at(node);
        if !ids.is_empty() {
            out.push(PrefixMatch {
                end: start + offset + 1,
                entries: ids.iter().map(|&i| lex.entry(i as usize)).collect(),
            });
        }
    }
    out
}

/// Loads a lexicon file, resolving phases against `automaton`.
pub fn load_lexicon(path: &Path, automaton: &PhaseAutomaton) -> Result<Lexicon> {
    let text = tsv::read_file(path)?;
    Lexicon::from_tsv(&path.display().to_string(), &text, automaton)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::load_automaton;

    fn data(name: &str) -> std::path::PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
    }

    fn shipped() -> (PhaseAutomaton, Lexicon) {
        let auto = load_automaton(&data("automaton.tsv")).unwrap();
        let lex = load_lexicon(&data("lexicon.tsv"), &auto).unwrap();
        (auto, lex)
    }

    #[test]
    fn ramalayosti_prefixes() {
        let (_, lex) = shipped();
        let text = PhonemeString::new("rAmAlayo'sti").unwrap();
        let m = match_prefixes(&text, 0, &lex);
        let surfaces: Vec<_> = m
            .iter()
            .map(|pm| (pm.end, pm.entries[0].surface.to_string()))
            .collect();
        assert_eq!(surfaces, [(4, "rAmA".to_string())]);
        // rAma only surfaces through the a|A junction; see the segmenter's
        // junction-aware matching. rA alone is not a form.
        let text = PhonemeString::new("rAmasti").unwrap();
        let ends: Vec<_> = match_prefixes(&text, 0, &lex).iter().map(|pm| pm.end).collect();
        assert_eq!(ends, [4]);
    }

    #[test]
    fn asti_is_present_tense_of_as() {
        let (_, lex) = shipped();
        let text = PhonemeString::new("asti").unwrap();
        let m = match_prefixes(&text, 0, &lex);
        let last = m.last().unwrap();
        assert_eq!(last.end, 4);
        assert_eq!(last.entries.len(), 1);
        assert_eq!(last.entries[0].phase.name, "Verb");
        assert_eq!(last.entries[0].stem, "as");
        // `a` (iic) is a prefix of asti.
        assert_eq!(m[0].end, 1);
    }

    #[test]
    fn no_match_beyond_text() {
        let (_, lex) = shipped();
        let text = PhonemeString::new("asti").unwrap();
        assert!(match_prefixes(&text, 4, &lex).is_empty());
        assert!(match_prefixes(&text, 2, &lex).is_empty());
    }

    #[test]
    fn homophones_stay_distinct() {
        let (_, lex) = shipped();
        let rama = lex.lookup(&PhonemeString::new("rAma").unwrap());
        let phases: Vec<_> = rama.iter().map(|e| e.phase.name.as_str()).collect();
        assert_eq!(phases, ["Iic", "Verb"]);
        assert!(rama[0].phase.is_compound_component);
    }

    #[test]
    fn loader_errors_and_dedup() {
        let auto = PhaseAutomaton::from_tsv("a", "Start\tNoun\nNoun\tAccept\n").unwrap();
        let lex = Lexicon::from_tsv("l", "", &auto).unwrap();
        assert!(lex.is_empty());
        let twice = "vanam\tNoun\tvana\tn. sg. acc.\nvanam\tNoun\tvana\tn. sg. acc.\n";
        assert_eq!(Lexicon::from_tsv("l", twice, &auto).unwrap().len(), 1);
        assert!(matches!(
            Lexicon::from_tsv("l", "vanam\tXyz\tvana\t-\n", &auto),
            Err(Error::UnknownPhase(p)) if p == "Xyz"
        ));
        assert!(matches!(
            Lexicon::from_tsv("l", "vanam\tStart\tvana\t-\n", &auto),
            Err(Error::UnknownPhase(_))
        ));
        for bad in ["vanam\tNoun\tvana\n", "vanām\tNoun\tvana\t-\n", "\tNoun\tx\t-\n"] {
            assert!(
                matches!(Lexicon::from_tsv("l", bad, &auto), Err(Error::MalformedRow { .. })),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn trie_and_multimap_agree() {
        let (_, lex) = shipped();
        let mut from_map: Vec<usize> = lex
            .surfaces()
            .flat_map(|s| lex.lookup(s))
            .map(|e| lex.entries().iter().position(|x| x == e).unwrap())
            .collect();
        from_map.sort_unstable();
        assert_eq!(from_map, lex.trie_entry_ids());
        assert_eq!(from_map, (0..lex.len()).collect::<Vec<_>>());
    }
}
