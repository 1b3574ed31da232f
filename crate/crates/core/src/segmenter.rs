//! Lattice construction and solution enumeration.
//!
//! A lattice node is `(position, automaton state, carry)`. `position` is the
//! first text unit the next word owns outright; `carry` is the `v` part of
//! the junction just crossed, i.e. the phonemes the next word must start
//! with even though the surface text spells them inside the junction window.
//! A word edge out of `(p, q, v)` reads `v`, then `text[p..k]`, then the `u`
//! of a junction whose window starts at `k`, and lands on
//! `(k + |w|, phase, v')`. Words that reach the end of the text land on the
//! single accepting node.
//!
//! Each node is expanded once, so the work is bounded by
//! `(len + 1) * states * carries` regardless of how many solutions share it.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use crate::automaton::{Phase, PhaseAutomaton, StateId};
use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, LexiconEntry};
use crate::phonology::{JunctionCandidate, PhonemeString, RuleIndex, SandhiRule, BOUNDARY};

pub const DEFAULT_SOLUTION_CAP: usize = 10_000;

/// One split word of a solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    /// The word as split out, before sandhi.
    pub form: PhonemeString,
    /// Every analysis of `form` in `phase`.
    pub entries: Arc<[LexiconEntry]>,
    pub phase: Phase,
    pub is_compound_component: bool,
    /// Text units this word touches, junction windows included.
    pub span: (usize, usize),
    /// Junction to the next word; `None` only for the final word.
    pub out_transition: Option<Arc<SandhiRule>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub segments: Vec<Segment>,
    pub confidence: Option<f64>,
}

impl Solution {
    pub fn words(&self) -> Vec<&str> {
        self.segments.iter().map(|s| s.form.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeNode {
    pub position: usize,
    pub state: StateId,
    pub carry: PhonemeString,
}

#[derive(Clone, Debug)]
pub struct LatticeEdge {
    pub from: usize,
    pub to: usize,
    pub form: PhonemeString,
    pub entries: Arc<[LexiconEntry]>,
    pub phase: Phase,
    /// Surface window of the outgoing junction, absent for final words.
    pub window: Option<(usize, usize)>,
    pub rule: Option<Arc<SandhiRule>>,
}

/// Shared forest of all segmentations of one input.
#[derive(Clone, Debug)]
pub struct Lattice {
    text: PhonemeString,
    nodes: Vec<LatticeNode>,
    edges: Vec<LatticeEdge>,
    out: Vec<Vec<usize>>,
    paths: Vec<u128>,
    start: Option<usize>,
    accept: Option<usize>,
    expansions: usize,
    state_space: usize,
}

impl Lattice {
    pub fn text(&self) -> &PhonemeString {
        &self.text
    }

    pub fn nodes(&self) -> &[LatticeNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[LatticeEdge] {
        &self.edges
    }

    pub fn out_edges(&self, node: usize) -> impl Iterator<Item = &LatticeEdge> {
        self.out[node].iter().map(move |&e| &self.edges[e])
    }

    pub fn start(&self) -> Option<usize> {
        self.start
    }

    pub fn accept(&self) -> Option<usize> {
        self.accept
    }

    pub fn is_empty(&self) -> bool {
        self.start.is_none()
    }

    /// Number of Start-to-Accept paths, saturating.
    pub fn path_count(&self) -> u128 {
        self.start.map_or(0, |s| self.paths[s])
    }

    /// Nodes expanded while building, before pruning dead ends.
    pub fn expansions(&self) -> usize {
        self.expansions
    }

    /// Distinct `(state, carry)` pairs a node can take.
    pub fn state_space(&self) -> usize {
        self.state_space
    }
}

/// A lexicon word readable from a position, before phase filtering.
pub struct WordMatch<'a> {
    /// End of the units the word owns outright.
    pub free_end: usize,
    pub form: PhonemeString,
    pub entry_ids: &'a [u32],
    /// Junction that follows the word; `None` when it ends the text.
    pub junction: Option<JunctionCandidate<'a>>,
}

fn junction_table<'r>(text: &PhonemeString, rules: &'r RuleIndex) -> Vec<Vec<JunctionCandidate<'r>>> {
    (0..text.len()).map(|k| rules.invert_at(text, k)).collect()
}

fn for_each_word<'a>(
    text: &PhonemeString,
    junctions: &[Vec<JunctionCandidate<'a>>],
    lex: &'a Lexicon,
    start: usize,
    carry: &PhonemeString,
    mut visit: impl FnMut(WordMatch<'a>),
) {
    let units = text.units();
    let Some(mut node) = lex.walk(lex.root(), carry.units()) else {
        return;
    };
    let form_of = |k: usize, tail: &[u8]| {
        let mut f = String::with_capacity(carry.len() + k - start + tail.len());
        f.push_str(carry.as_str());
        f.push_str(&text.as_str()[start..k]);
        f.push_str(std::str::from_utf8(tail).expect("ASCII"));
        PhonemeString::from_trusted(f)
    };
    let mut k = start;
    loop {
        if k == units.len() {
            let ids = lex.entries_at(node);
            if !ids.is_empty() {
                visit(WordMatch {
                    free_end: k,
                    form: form_of(k, &[]),
                    entry_ids: ids,
                    junction: None,
                });
            }
            return;
        }
        for cand in &junctions[k] {
            let Some(end_node) = lex.walk(node, cand.u().units()) else {
                continue;
            };
            let ids: &'a [u32] = lex.entries_at(end_node);
            if ids.is_empty() {
                continue;
            }
            visit(WordMatch {
                free_end: k,
                form: form_of(k, cand.u().units()),
                entry_ids: ids,
                junction: Some(*cand),
            });
        }
        if units[k] == BOUNDARY {
            return;
        }
        match lex.child(node, units[k]) {
            Some(next) => node = next,
            None => return,
        }
        k += 1;
    }
}

/// Lexicon words readable from `start` with no pending junction, either
/// ending the text or followed by a junction whose `u` they end with.
/// Unlike [`crate::lexicon::match_prefixes`] this sees words that bypass a
/// split location, such as `rAma` in `rAmA...` through `a|A -> A`.
pub fn match_words<'a>(text: &PhonemeString, start: usize, lex: &'a Lexicon, rules: &'a RuleIndex) -> Vec<WordMatch<'a>> {
    let junctions = junction_table(text, rules);
    let mut out = Vec::new();
    if start < text.len() {
        for_each_word(text, &junctions, lex, start, &PhonemeString::empty(), |m| out.push(m));
    }
    out
}

struct RawEdge {
    from: usize,
    to: usize,
    form: PhonemeString,
    entry_ids: Vec<u32>,
    phase: StateId,
    window: Option<(usize, usize)>,
    rule: Option<SandhiRule>,
}

/// Builds the segmentation lattice of `text`. Dead ends are pruned, so every
/// remaining edge lies on a complete solution.
pub fn build_lattice(text: &PhonemeString, lex: &Lexicon, rules: &RuleIndex, auto: &PhaseAutomaton) -> Result<Lattice> {
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let len = text.len();
    let junctions = junction_table(text, rules);

    let mut carries: Vec<&PhonemeString> = rules.rules().iter().map(|r| &r.v).collect();
    carries.push(&rules.boundary_rule().v);
    carries.sort();
    carries.dedup();
    let state_space = auto.state_count() * carries.len();

    let mut keys: Vec<LatticeNode> = Vec::new();
    let mut memo: HashMap<LatticeNode, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |key: LatticeNode, keys: &mut Vec<LatticeNode>, queue: &mut VecDeque<usize>| -> usize {
        if let Some(&id) = memo.get(&key) {
            return id;
        }
        let id = keys.len();
        memo.insert(key.clone(), id);
        keys.push(key);
        queue.push_back(id);
        id
    };

    let start = intern(
        LatticeNode {
            position: 0,
            state: auto.start(),
            carry: PhonemeString::empty(),
        },
        &mut keys,
        &mut queue,
    );
    let accept_key = LatticeNode {
        position: len,
        state: auto.accept(),
        carry: PhonemeString::empty(),
    };
    let mut accept = None;
    let mut raw: Vec<RawEdge> = Vec::new();
    let mut expansions = 0usize;

    while let Some(id) = queue.pop_front() {
        if keys[id] == accept_key {
            continue;
        }
        expansions += 1;
        let LatticeNode { position, state, carry } = keys[id].clone();
        let allowed = auto.next_phases(state);
        let mut found: Vec<(LatticeNode, RawEdge)> = Vec::new();
        for_each_word(text, &junctions, lex, position, &carry, |m| {
            let mut by_phase: BTreeMap<StateId, Vec<u32>> = BTreeMap::new();
            for &e in m.entry_ids {
                let phase = lex.entry(e as usize).phase.id;
                if allowed.binary_search(&phase).is_ok() {
                    by_phase.entry(phase).or_default().push(e);
                }
            }
            for (phase, entry_ids) in by_phase {
                let (target, window, rule) = match &m.junction {
                    None => {
                        if !auto.can_end(phase) {
                            continue;
                        }
                        (accept_key.clone(), None, None)
                    }
                    Some(j) if j.rule.is_boundary() => {
                        if !auto.can_end(phase) {
                            continue;
                        }
                        let target = LatticeNode {
                            position: m.free_end + 1,
                            state: auto.start(),
                            carry: PhonemeString::empty(),
                        };
                        (target, Some((m.free_end, m.free_end + 1)), Some(j.rule.clone()))
                    }
                    Some(j) => {
                        if j.rule.context == crate::phonology::Context::Samasa && !auto.is_compound(phase) {
                            continue;
                        }
                        let end = m.free_end + j.consumed;
                        let target = LatticeNode {
                            position: end,
                            state: phase,
                            carry: j.rule.v.clone(),
                        };
                        (target, Some((m.free_end, end)), Some(j.rule.clone()))
                    }
                };
                found.push((
                    target,
                    RawEdge {
                        from: id,
                        to: usize::MAX,
                        form: m.form.clone(),
                        entry_ids,
                        phase,
                        window,
                        rule,
                    },
                ));
            }
        });
        for (target, mut edge) in found {
            let is_accept = target == accept_key;
            let to = intern(target, &mut keys, &mut queue);
            if is_accept {
                accept = Some(to);
            }
            edge.to = to;
            raw.push(edge);
        }
    }

    // Count paths to Accept; positions never decrease along an edge, and
    // only edges into Accept keep the position unchanged.
    let n = keys.len();
    let mut out_raw: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in raw.iter().enumerate() {
        out_raw[e.from].push(i);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(keys[i].position), Some(i) != accept));
    let mut paths = vec![0u128; n];
    for &i in &order {
        if Some(i) == accept {
            paths[i] = 1;
            continue;
        }
        paths[i] = out_raw[i]
            .iter()
            .fold(0u128, |acc, &e| acc.saturating_add(paths[raw[e].to]));
    }

    // Compact to live nodes, keeping discovery order.
    let mut remap = vec![usize::MAX; n];
    let mut nodes = Vec::new();
    let mut live_paths = Vec::new();
    for i in 0..n {
        if paths[i] > 0 {
            remap[i] = nodes.len();
            nodes.push(keys[i].clone());
            live_paths.push(paths[i]);
        }
    }
    let mut edges = Vec::new();
    let mut out = vec![Vec::new(); nodes.len()];
    for e in raw {
        if remap[e.from] == usize::MAX || remap[e.to] == usize::MAX {
            continue;
        }
        let phase_name = auto.name(e.phase).to_string();
        let id = edges.len();
        out[remap[e.from]].push(id);
        edges.push(LatticeEdge {
            from: remap[e.from],
            to: remap[e.to],
            form: e.form,
            entries: e.entry_ids.iter().map(|&i| lex.entry(i as usize).clone()).collect(),
            phase: Phase {
                id: e.phase,
                name: phase_name,
                is_compound_component: auto.is_compound(e.phase),
            },
            window: e.window,
            rule: e.rule.map(Arc::new),
        });
    }
    for list in &mut out {
        list.sort_by(|&a, &b| edge_order(&edges[a], &edges[b], &nodes));
    }

    let start = (paths[start] > 0).then(|| remap[start]);
    let accept = start.and(accept.map(|a| remap[a]));
    Ok(Lattice {
        text: text.clone(),
        nodes,
        edges,
        out,
        paths: live_paths,
        start,
        accept,
        expansions,
        state_space,
    })
}

// Longest reach first, then form, phase name and rule id.
fn edge_order(a: &LatticeEdge, b: &LatticeEdge, nodes: &[LatticeNode]) -> std::cmp::Ordering {
    let reach = |e: &LatticeEdge| e.window.map_or(nodes[e.to].position, |w| w.1);
    reach(b)
        .cmp(&reach(a))
        .then_with(|| a.form.cmp(&b.form))
        .then_with(|| a.phase.name.cmp(&b.phase.name))
        .then_with(|| {
            let id = |e: &LatticeEdge| e.rule.as_ref().map(|r| r.rule_id.clone());
            id(a).cmp(&id(b))
        })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Enumeration {
    pub solutions: Vec<Solution>,
    /// Set when the lattice holds more paths than the cap allowed.
    pub truncated: bool,
    pub total_paths: u128,
}

/// All Start-to-Accept paths in lattice order, up to `cap`.
pub fn enumerate_solutions(lat: &Lattice, cap: Option<usize>) -> Enumeration {
    let total_paths = lat.path_count();
    let cap = cap.unwrap_or(usize::MAX);
    let mut solutions = Vec::new();
    let Some(start) = lat.start else {
        return Enumeration {
            solutions,
            truncated: false,
            total_paths,
        };
    };
    let mut path: Vec<usize> = Vec::new();
    let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
    while let Some(&mut (node, ref mut next)) = stack.last_mut() {
        if solutions.len() >= cap {
            break;
        }
        if Some(node) == lat.accept {
            solutions.push(materialize(lat, &path));
            stack.pop();
            path.pop();
            continue;
        }
        match lat.out[node].get(*next) {
            Some(&edge) => {
                *next += 1;
                path.push(edge);
                stack.push((lat.edges[edge].to, 0));
            }
            None => {
                stack.pop();
                path.pop();
            }
        }
    }
    Enumeration {
        truncated: total_paths > solutions.len() as u128,
        solutions,
        total_paths,
    }
}

fn materialize(lat: &Lattice, path: &[usize]) -> Solution {
    let len = lat.text.len();
    let mut segments = Vec::with_capacity(path.len());
    let mut begin = 0;
    for &e in path {
        let edge = &lat.edges[e];
        let end = match (edge.window, &edge.rule) {
            (Some((ws, _)), Some(rule)) if rule.is_boundary() => ws,
            (Some((_, we)), _) => we,
            (None, _) => len,
        };
        segments.push(Segment {
            form: edge.form.clone(),
            entries: edge.entries.clone(),
            phase: edge.phase.clone(),
            is_compound_component: edge.phase.is_compound_component,
            span: (begin, end),
            out_transition: edge.rule.clone(),
        });
        begin = match (edge.window, &edge.rule) {
            (Some((_, we)), Some(rule)) if rule.is_boundary() => we,
            (Some((ws, _)), _) => ws,
            (None, _) => len,
        };
    }
    Solution {
        segments,
        confidence: None,
    }
}

/// Rebuilds the surface text of a solution by applying each recorded
/// junction forward.
pub fn synthesize(sol: &Solution, rules: &RuleIndex) -> Result<PhonemeString> {
    let mut out = String::new();
    let mut carry = PhonemeString::empty();
    let last = sol.segments.len().saturating_sub(1);
    for (i, seg) in sol.segments.iter().enumerate() {
        let mismatch = |id: &str| Error::RuleMismatch { rule_id: id.to_string() };
        let u = match (&seg.out_transition, i == last) {
            (Some(rule), false) => &rule.u,
            (None, true) => &PhonemeString::empty(),
            (Some(rule), true) => return Err(mismatch(&rule.rule_id)),
            (None, false) => return Err(mismatch("<missing>")),
        };
        let form = seg.form.as_str();
        if !seg.form.starts_with(&carry) || !seg.form.ends_with(u) || carry.len() + u.len() > form.len() {
            let id = seg.out_transition.as_ref().map_or("<final>", |r| r.rule_id.as_str());
            return Err(mismatch(id));
        }
        out.push_str(&form[carry.len()..form.len() - u.len()]);
        if let Some(rule) = &seg.out_transition {
            let known = if rule.is_boundary() {
                Some(rules.boundary_rule())
            } else {
                rules.apply(&rule.u, &rule.v, rule.context)
            };
            if known != Some(rule.as_ref()) {
                return Err(mismatch(&rule.rule_id));
            }
            out.push_str(rule.w.as_str());
            carry = rule.v.clone();
        }
    }
    Ok(PhonemeString::from_trusted(out))
}

/// Convenience wrapper: build the lattice and enumerate it.
pub fn segment_all(
    text: &PhonemeString,
    lex: &Lexicon,
    rules: &RuleIndex,
    auto: &PhaseAutomaton,
    cap: Option<usize>,
) -> Result<Enumeration> {
    let lat = build_lattice(text, lex, rules, auto)?;
    Ok(enumerate_solutions(&lat, cap))
}
