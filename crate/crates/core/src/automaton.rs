//! The word-structure automaton.
//!
//! States are phase names plus the reserved `Start` and `Accept`. A lexicon
//! form of phase `P` may follow a word in state `S` when the edge `S -> P`
//! exists, possibly through silent states (`Start`, `Accept` and any state
//! declared `silent:` in the file). Reaching `Accept` closes a word and
//! implicitly returns to `Start`, so word chains are glued word by word.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tsv;

pub const START: &str = "Start";
pub const ACCEPT: &str = "Accept";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u16);

/// A lexical phase as resolved against an automaton.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Phase {
    pub id: StateId,
    pub name: String,
    pub is_compound_component: bool,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug)]
pub struct PhaseAutomaton {
    names: Vec<String>,
    ids: HashMap<String, StateId>,
    edges: BTreeSet<(StateId, StateId)>,
    silent: Vec<bool>,
    compound: Vec<bool>,
    next_phases: Vec<Vec<StateId>>,
    can_end: Vec<bool>,
    warnings: Vec<String>,
}

#[derive(Default)]
struct Builder {
    names: Vec<String>,
    ids: HashMap<String, StateId>,
    edges: BTreeSet<(StateId, StateId)>,
    silent: BTreeSet<StateId>,
    compound: BTreeSet<StateId>,
}

impl Builder {
    fn new() -> Self {
        let mut b = Builder::default();
        b.intern(START);
        b.intern(ACCEPT);
        b
    }

    fn intern(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = StateId(self.names.len() as u16);
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }
}

fn valid_state_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl PhaseAutomaton {
    /// Parses the edge-list format: `from \t to` rows plus optional
    /// `compound_phases: A, B` and `silent: X` header lines.
    pub fn from_tsv(source_name: &str, text: &str) -> Result<Self> {
        let mut b = Builder::new();
        let start = StateId(0);
        let accept = StateId(1);
        for row in tsv::rows(source_name, text) {
            let (line, fields) = row?;
            let bad = |reason: String| tsv::malformed(source_name, line, reason);
            if fields.len() == 1 {
                let (key, values) = fields[0]
                    .split_once(':')
                    .ok_or_else(|| bad("expected `from<TAB>to` or `key: values`".into()))?;
                let names: Vec<&str> = values
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .collect();
                for name in &names {
                    if !valid_state_name(name) || *name == START || *name == ACCEPT {
                        return Err(bad(format!("invalid state `{name}` in header")));
                    }
                }
                match key.trim() {
                    "compound_phases" => {
                        for name in names {
                            let id = b.intern(name);
                            b.compound.insert(id);
                        }
                    }
                    "silent" => {
                        for name in names {
                            let id = b.intern(name);
                            b.silent.insert(id);
                        }
                    }
                    other => return Err(bad(format!("unknown header `{other}`"))),
                }
                continue;
            }
            if fields.len() != 2 {
                return Err(bad("expected 2 tab-separated columns".into()));
            }
            let (from, to) = (fields[0], fields[1]);
            if !valid_state_name(from) || !valid_state_name(to) {
                return Err(bad("invalid state name".into()));
            }
            if to == START {
                return Err(bad("edges into Start are not allowed".into()));
            }
            if from == ACCEPT {
                return Err(bad("edges out of Accept are not allowed".into()));
            }
            let (f, t) = (b.intern(from), b.intern(to));
            b.edges.insert((f, t));
        }
        if let Some(&id) = b.compound.intersection(&b.silent).next() {
            return Err(tsv::malformed(
                source_name,
                0,
                format!("state `{}` is both silent and a compound phase", b.names[id.0 as usize]),
            ));
        }
        b.silent.insert(start);
        b.silent.insert(accept);
        Self::build(b)
    }

    fn build(b: Builder) -> Result<Self> {
        let n = b.names.len();
        let mut succ = vec![Vec::new(); n];
        for &(f, t) in &b.edges {
            succ[f.0 as usize].push(t);
        }

        // Plain graph reachability, for the Accept check and warnings.
        let reach_from = |from: StateId| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([from]);
            seen[from.0 as usize] = true;
            while let Some(s) = queue.pop_front() {
                for &t in &succ[s.0 as usize] {
                    if !seen[t.0 as usize] {
                        seen[t.0 as usize] = true;
                        queue.push_back(t);
                    }
                }
            }
            seen
        };
        let from_start = reach_from(StateId(0));
        if !from_start[1] {
            return Err(Error::NoAcceptPath);
        }

        let silent: Vec<bool> = (0..n).map(|i| b.silent.contains(&StateId(i as u16))).collect();
        let compound: Vec<bool> = (0..n).map(|i| b.compound.contains(&StateId(i as u16))).collect();

        let mut next_phases = Vec::with_capacity(n);
        let mut can_end = Vec::with_capacity(n);
        for s in 0..n {
            let (phases, ends) = silent_closure(StateId(s as u16), &succ, &silent);
            next_phases.push(phases);
            can_end.push(ends);
        }

        let mut warnings = Vec::new();
        for (i, name) in b.names.iter().enumerate() {
            if !from_start[i] {
                warnings.push(format!("state `{name}` is unreachable from Start"));
            } else if i != 1 && !reach_from(StateId(i as u16))[1] {
                warnings.push(format!("state `{name}` cannot reach Accept"));
            }
        }
        for w in &warnings {
            log::warn!("{w}");
        }

        Ok(PhaseAutomaton {
            names: b.names,
            ids: b.ids,
            edges: b.edges,
            silent,
            compound,
            next_phases,
            can_end,
            warnings,
        })
    }

    pub fn start(&self) -> StateId {
        StateId(0)
    }

    pub fn accept(&self) -> StateId {
        StateId(1)
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: StateId) -> &str {
        &self.names[id.0 as usize]
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.names.len()).map(|i| StateId(i as u16))
    }

    pub fn edges(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn is_silent(&self, id: StateId) -> bool {
        self.silent[id.0 as usize]
    }

    pub fn is_compound(&self, id: StateId) -> bool {
        self.compound[id.0 as usize]
    }

    /// Resolves a lexicon phase name. Silent and reserved states are not
    /// phases.
    pub fn phase(&self, name: &str) -> Option<Phase> {
        let id = self.state(name)?;
        if self.is_silent(id) {
            return None;
        }
        Some(Phase {
            id,
            name: name.to_string(),
            is_compound_component: self.is_compound(id),
        })
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Single-edge transition: `Some(phase)` when `state -> phase` is an
    /// edge of the graph.
    pub fn step(&self, state: StateId, phase: StateId) -> Option<StateId> {
        if self.is_silent(phase) {
            return None;
        }
        self.edges.contains(&(state, phase)).then_some(phase)
    }

    /// Phases the next word may take after a word that left the automaton
    /// in `state`, following silent states and word-chain resets.
    pub fn next_phases(&self, state: StateId) -> &[StateId] {
        &self.next_phases[state.0 as usize]
    }

    /// Chain-aware transition used by the segmenter.
    pub fn advance(&self, state: StateId, phase: StateId) -> Option<StateId> {
        self.next_phases(state).binary_search(&phase).ok().map(|_| phase)
    }

    /// Whether a word may end in `state`, i.e. `Accept` is reachable through
    /// silent states.
    pub fn can_end(&self, state: StateId) -> bool {
        self.can_end[state.0 as usize]
    }

    /// Runs a whole phase sequence as one word chain.
    pub fn accepts_sequence(&self, phases: &[StateId]) -> bool {
        let mut state = self.start();
        for &p in phases {
            match self.advance(state, p) {
                Some(next) => state = next,
                None => return false,
            }
        }
        !phases.is_empty() && self.can_end(state)
    }
}

fn silent_closure(from: StateId, succ: &[Vec<StateId>], silent: &[bool]) -> (Vec<StateId>, bool) {
    let accept = StateId(1);
    let start = StateId(0);
    let mut phases = BTreeSet::new();
    let mut can_end = false;
    let mut seen = vec![false; succ.len()];
    let mut queue = VecDeque::from([from]);
    seen[from.0 as usize] = true;
    while let Some(s) = queue.pop_front() {
        let mut targets = succ[s.0 as usize].clone();
        if s == accept {
            targets.push(start);
        }
        for t in targets {
            if t == accept {
                can_end = true;
            }
            if silent[t.0 as usize] {
                if !seen[t.0 as usize] {
                    seen[t.0 as usize] = true;
                    queue.push_back(t);
                }
            } else {
                phases.insert(t);
            }
        }
    }
    (phases.into_iter().collect(), can_end)
}

/// Loads an automaton file.
pub fn load_automaton(path: &Path) -> Result<PhaseAutomaton> {
    let text = tsv::read_file(path)?;
    PhaseAutomaton::from_tsv(&path.display().to_string(), &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEFAULT: &str = "\
compound_phases: Iic
silent: Subst
Start\tSubst
Subst\tNoun
Subst\tIic
Noun\tAccept
Iic\tIic
Iic\tIfc
Iic\tNoun
Ifc\tAccept
Start\tVerb
Verb\tAccept
";

    fn auto() -> PhaseAutomaton {
        PhaseAutomaton::from_tsv("t", DEFAULT).unwrap()
    }

    #[test]
    fn compound_chain_steps() {
        let a = auto();
        let id = |n: &str| a.state(n).unwrap();
        let subst = a.step(a.start(), id("Subst"));
        // Subst is silent, so it is not a phase a word can take.
        assert_eq!(subst, None);
        let s = a.step(id("Subst"), id("Iic")).unwrap();
        let s = a.step(s, id("Iic")).unwrap();
        let s = a.step(s, id("Ifc")).unwrap();
        assert_eq!(a.name(s), "Ifc");
        assert!(a.step(s, a.accept()).is_none());
        assert!(a.can_end(s));
    }

    #[test]
    fn absent_edge_rejects() {
        let a = auto();
        let id = |n: &str| a.state(n).unwrap();
        assert_eq!(a.step(id("Noun"), id("Iic")), None);
        assert_eq!(a.step(id("Iic"), id("Noun")), Some(id("Noun")));
        assert_eq!(a.step(id("Verb"), id("Ifc")), None);
    }

    #[test]
    fn word_chains_reset_after_accept() {
        let a = auto();
        let id = |n: &str| a.state(n).unwrap();
        assert_eq!(a.advance(id("Noun"), id("Iic")), Some(id("Iic")));
        assert_eq!(a.advance(id("Noun"), id("Verb")), Some(id("Verb")));
        assert_eq!(a.advance(id("Noun"), id("Ifc")), None);
        assert_eq!(a.advance(id("Iic"), id("Verb")), None);
        assert!(!a.can_end(id("Iic")));
        assert!(a.can_end(id("Noun")));
    }

    #[test]
    fn ramalayosti_phase_sequences() {
        let a = auto();
        let seq = |names: &[&str]| {
            let ids: Vec<_> = names.iter().map(|n| a.state(n).unwrap()).collect();
            a.accepts_sequence(&ids)
        };
        assert!(seq(&["Iic", "Noun", "Verb"]));
        assert!(seq(&["Iic", "Ifc", "Verb"]));
        assert!(seq(&["Iic", "Iic", "Noun", "Verb"]));
        assert!(seq(&["Noun", "Iic", "Noun", "Verb"]));
        assert!(seq(&["Verb", "Noun", "Verb"]));
        assert!(!seq(&["Noun", "Ifc", "Verb"]));
        assert!(!seq(&["Verb", "Ifc", "Verb"]));
        assert!(!seq(&["Noun", "Iic"]));
        assert!(!seq(&[]));
    }

    #[test]
    fn minimal_automaton() {
        let a = PhaseAutomaton::from_tsv("t", "Start\tNoun\nNoun\tAccept\n").unwrap();
        assert_eq!(a.state_count(), 3);
        let noun = a.state("Noun").unwrap();
        assert!(a.accepts_sequence(&[noun]));
        assert!(a.warnings().is_empty());
        assert!(!a.phase("Noun").unwrap().is_compound_component);
        assert!(a.phase("Start").is_none());
    }

    #[test]
    fn missing_accept_path() {
        assert!(matches!(
            PhaseAutomaton::from_tsv("t", "Start\tNoun\nVerb\tAccept\n"),
            Err(Error::NoAcceptPath)
        ));
        assert!(matches!(PhaseAutomaton::from_tsv("t", ""), Err(Error::NoAcceptPath)));
    }

    #[test]
    fn unreachable_states_warn() {
        let a = PhaseAutomaton::from_tsv("t", "Start\tNoun\nNoun\tAccept\nOrphan\tAccept\nStart\tDead\n").unwrap();
        assert_eq!(a.warnings().len(), 2);
        assert!(a.warnings().iter().any(|w| w.contains("Orphan")));
        assert!(a.warnings().iter().any(|w| w.contains("Dead")));
    }

    #[test]
    fn malformed_rows() {
        for bad in [
            "Start\tNoun\tAccept\n",
            "Noun\tStart\n",
            "Accept\tNoun\n",
            "bogus: X\n",
            "no header here\n",
            "compound_phases: Iic\nsilent: Iic\nStart\tIic\nIic\tAccept\n",
        ] {
            assert!(
                matches!(PhaseAutomaton::from_tsv("t", bad), Err(Error::MalformedRow { .. })),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn determinism() {
        let a = auto();
        for s in a.states() {
            for p in a.states() {
                if let Some(n) = a.step(s, p) {
                    assert_eq!(n, p);
                }
            }
        }
    }

    #[test]
    fn shipped_automaton_loads() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/automaton.tsv");
        let a = load_automaton(&path).unwrap();
        assert!(a.phase("Iic").unwrap().is_compound_component);
        assert!(!a.phase("Ifc").unwrap().is_compound_component);
        assert!(a.warnings().is_empty(), "{:?}", a.warnings());
    }
}
