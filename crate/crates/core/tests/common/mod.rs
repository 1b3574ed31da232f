//! Independent oracles and random fixtures shared by the integration tests.
//!
//! Nothing here calls into the segmenter, the scorers or the automaton's
//! chain logic; the oracles work from raw tables.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use viccheda_core::{Lexicon, PhaseAutomaton, PhonemeString, RuleIndex, Solution};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// `(form, phase, rule id after the word)` per segment.
pub type Row = Vec<(String, String, Option<String>)>;

pub fn row_of(sol: &Solution) -> Row {
    sol.segments
        .iter()
        .map(|s| {
            (
                s.form.to_string(),
                s.phase.name.clone(),
                s.out_transition.as_ref().map(|r| r.rule_id.clone()),
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Forward brute-force splitter

/// A raw rule: `(id, u, v, w, samasa_only)`.
pub type RawRule = (String, String, String, String, bool);

/// A raw automaton: edges, silent states and compound phases, by name.
#[derive(Clone, Debug)]
pub struct RawAutomaton {
    pub edges: Vec<(String, String)>,
    pub silent: Vec<String>,
    pub compound: Vec<String>,
}

impl RawAutomaton {
    fn is_silent(&self, s: &str) -> bool {
        s == "Start" || s == "Accept" || self.silent.iter().any(|x| x == s)
    }

    /// Phases reachable from `state` through silent states, with Accept
    /// looping back to Start.
    pub fn next(&self, state: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut out = BTreeSet::new();
        let mut stack = vec![state.to_string()];
        while let Some(s) = stack.pop() {
            let mut succ: Vec<String> = self.edges.iter().filter(|(f, _)| *f == s).map(|(_, t)| t.clone()).collect();
            if s == "Accept" {
                succ.push("Start".into());
            }
            for t in succ {
                if self.is_silent(&t) {
                    if seen.insert(t.clone()) {
                        stack.push(t);
                    }
                } else {
                    out.insert(t);
                }
            }
        }
        out
    }

    pub fn can_end(&self, state: &str) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![state.to_string()];
        while let Some(s) = stack.pop() {
            for (f, t) in &self.edges {
                if *f == s && self.is_silent(t) {
                    if t == "Accept" {
                        return true;
                    }
                    if seen.insert(t.clone()) {
                        stack.push(t.clone());
                    }
                }
            }
        }
        false
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        if !self.compound.is_empty() {
            s += &format!("compound_phases: {}\n", self.compound.join(", "));
        }
        if !self.silent.is_empty() {
            s += &format!("silent: {}\n", self.silent.join(", "));
        }
        for (f, t) in &self.edges {
            s += &format!("{f}\t{t}\n");
        }
        s
    }
}

/// Every split of `text` found by generating word sequences forward and
/// keeping those whose sandhied rendering equals the text.
pub fn brute_force(text: &str, words: &[(String, String)], rules: &[RawRule], auto: &RawAutomaton) -> Vec<Row> {
    let mut all_rules: Vec<RawRule> = rules.to_vec();
    all_rules.push(("_".into(), String::new(), String::new(), " ".into(), false));
    let mut distinct: Vec<(String, String)> = words.to_vec();
    distinct.sort();
    distinct.dedup();
    let mut out = Vec::new();
    let mut path = Vec::new();
    search(text, 0, "", "Start", &distinct, &all_rules, auto, &mut path, &mut out);
    out.sort();
    out
}

#[allow(clippy::too_many_arguments)]
fn search(
    text: &str,
    done: usize,
    carry: &str,
    state: &str,
    words: &[(String, String)],
    rules: &[RawRule],
    auto: &RawAutomaton,
    path: &mut Row,
    out: &mut Vec<Row>,
) {
    let rest = &text[done..];
    let allowed = auto.next(state);
    for (form, phase) in words {
        if !allowed.contains(phase) || !form.starts_with(carry) {
            continue;
        }
        let mid = &form[carry.len()..];
        if mid == rest && auto.can_end(phase) {
            path.push((form.clone(), phase.clone(), None));
            out.push(path.clone());
            path.pop();
        }
        for (id, u, v, w, samasa) in rules {
            if *samasa && !auto.compound.contains(phase) {
                continue;
            }
            if !mid.ends_with(u.as_str()) {
                continue;
            }
            let piece = format!("{}{}", &mid[..mid.len() - u.len()], w);
            if !rest.starts_with(&piece) {
                continue;
            }
            let next_state = if id == "_" {
                if !auto.can_end(phase) {
                    continue;
                }
                "Start"
            } else {
                phase.as_str()
            };
            path.push((form.clone(), phase.clone(), Some(id.clone())));
            search(text, done + piece.len(), v, next_state, words, rules, auto, path, out);
            path.pop();
        }
    }
}

// ---------------------------------------------------------------------------
// Random fixtures

pub const SMALL_ALPHABET: &[u8] = b"aAikmgtH";

pub fn standard_automaton() -> RawAutomaton {
    let e = |a: &str, b: &str| (a.to_string(), b.to_string());
    RawAutomaton {
        edges: vec![
            e("Start", "Subst"),
            e("Subst", "Noun"),
            e("Subst", "Iic"),
            e("Iic", "Iic"),
            e("Iic", "Noun"),
            e("Iic", "Ifc"),
            e("Noun", "Accept"),
            e("Ifc", "Accept"),
            e("Start", "Verb"),
            e("Verb", "Accept"),
        ],
        silent: vec!["Subst".into()],
        compound: vec!["Iic".into()],
    }
}

pub const PHASES: &[&str] = &["Noun", "Iic", "Ifc", "Verb"];

pub struct RandomFixture {
    pub raw_auto: RawAutomaton,
    pub raw_words: Vec<(String, String)>,
    pub raw_rules: Vec<RawRule>,
    pub auto: PhaseAutomaton,
    pub lex: Lexicon,
    pub rules: RuleIndex,
}

fn random_word(rng: &mut StdRng, min: usize, max: usize, alphabet: &[u8]) -> String {
    let n = rng.gen_range(min..=max);
    (0..n).map(|_| *alphabet.choose(rng).unwrap() as char).collect()
}

pub fn random_fixture(rng: &mut StdRng, max_words: usize) -> RandomFixture {
    let raw_auto = standard_automaton();
    let n_words = rng.gen_range(1..=max_words);
    let raw_words: Vec<(String, String)> = (0..n_words)
        .map(|_| {
            let form = random_word(rng, 1, 4, SMALL_ALPHABET);
            (form, PHASES.choose(rng).unwrap().to_string())
        })
        .collect();

    let contexts = ["", "a", "A", "i", "m", "aH", "k", "g"];
    let mut raw_rules: Vec<RawRule> = Vec::new();
    let mut keys = BTreeSet::new();
    for i in 0..rng.gen_range(0..=10) {
        let u = contexts.choose(rng).unwrap().to_string();
        let v = contexts.choose(rng).unwrap().to_string();
        if u.is_empty() && v.is_empty() {
            continue;
        }
        let w = random_word(rng, 1, 3.min(u.len() + v.len() + 2), SMALL_ALPHABET);
        let samasa = rng.gen_bool(0.2);
        if keys.insert((u.clone(), v.clone(), samasa)) {
            raw_rules.push((format!("R{i:02}"), u, v, w, samasa));
        }
    }

    let auto = PhaseAutomaton::from_tsv("random", &raw_auto.to_tsv()).unwrap();
    let lex_tsv: String = raw_words.iter().map(|(f, p)| format!("{f}\t{p}\t{f}\t-\n")).collect();
    let lex = Lexicon::from_tsv("random", &lex_tsv, &auto).unwrap();
    let rules_tsv: String = raw_rules
        .iter()
        .map(|(id, u, v, w, s)| {
            let dash = |x: &str| if x.is_empty() { "-".to_string() } else { x.to_string() };
            format!("{id}\t{}\t{}\t{w}\t{}\t-\n", dash(u), dash(v), if *s { "Samasa" } else { "Sandhi" })
        })
        .collect();
    let rules = RuleIndex::from_tsv("random", &rules_tsv).unwrap();
    RandomFixture {
        raw_auto,
        raw_words,
        raw_rules,
        auto,
        lex,
        rules,
    }
}

/// Chains random lexicon words along the automaton, joined by random
/// applicable rules or spaces; sometimes a random phoneme string instead.
/// At most `max_len` units.
pub fn random_text(rng: &mut StdRng, f: &RandomFixture, max_len: usize) -> String {
    for _ in 0..50 {
        if rng.gen_bool(0.15) {
            return random_word(rng, 1, max_len, SMALL_ALPHABET);
        }
        if let Some(text) = chained_text(rng, f, max_len) {
            return text;
        }
    }
    random_word(rng, 1, max_len, SMALL_ALPHABET)
}

fn chained_text(rng: &mut StdRng, f: &RandomFixture, max_len: usize) -> Option<String> {
    let auto = &f.raw_auto;
    let target = rng.gen_range(1..=4);
    let mut state = "Start".to_string();
    let mut text = String::new();
    let mut carry = String::new();
    for i in 0.. {
        let allowed = auto.next(&state);
        let options: Vec<&(String, String)> = f
            .raw_words
            .iter()
            .filter(|(w, p)| allowed.contains(p) && w.starts_with(carry.as_str()))
            .collect();
        let &(word, phase) = &options.choose(rng)?;
        let body = &word[carry.len()..];
        let done = i + 1 >= target && auto.can_end(phase);
        if done {
            text += body;
            break;
        }
        if i > 8 {
            return None;
        }
        // Pick the junction after this word; the next word must start with v.
        let fitting: Vec<&RawRule> = f
            .raw_rules
            .iter()
            .filter(|(_, u, v, _, samasa)| {
                body.ends_with(u.as_str())
                    && (!samasa || auto.compound.contains(phase))
                    && f.raw_words.iter().any(|(w, _)| w.starts_with(v.as_str()))
            })
            .collect();
        if auto.can_end(phase) && (fitting.is_empty() || rng.gen_bool(0.15)) {
            text += body;
            text.push(' ');
            carry.clear();
            state = "Start".into();
        } else {
            let (_, u, v, w, _) = fitting.choose(rng)?;
            text += &body[..body.len() - u.len()];
            text += w;
            carry = v.clone();
            state = phase.clone();
        }
    }
    let text = text.trim().to_string();
    (!text.is_empty() && text.len() <= max_len && !text.contains("  ")).then_some(text)
}

pub fn phoneme_text(s: &str) -> PhonemeString {
    viccheda_core::parse_text(s, viccheda_core::Scheme::Slp1).unwrap()
}

// ---------------------------------------------------------------------------
// The twelve readings of rAmAlayo'sti and an exact scoring oracle

/// The twelve expected readings of rAmAlayo'sti, in reference order, as
/// `(form, phase, rule id of the junction that follows)`.
pub fn ramalayosti_rows() -> Vec<Row> {
    let r = |v: &[(&str, &str, Option<&str>)]| -> Row {
        v.iter()
            .map(|&(f, p, r)| (f.to_string(), p.to_string(), r.map(str::to_string)))
            .collect()
    };
    vec![
        r(&[("rAma", "Iic", Some("D02")), ("AlayaH", "Noun", Some("H01")), ("asti", "Verb", None)]),
        r(&[("rAma", "Iic", Some("D02")), ("AlayaH", "Ifc", Some("H01")), ("asti", "Verb", None)]),
        r(&[("rAma", "Iic", Some("D01")), ("alayaH", "Noun", Some("H01")), ("asti", "Verb", None)]),
        r(&[("rAma", "Iic", Some("D01")), ("a", "Iic", Some("J25")), ("layaH", "Noun", Some("H01")), ("asti", "Verb", None)]),
        r(&[("rAma", "Iic", Some("D01")), ("alayaH", "Ifc", Some("H01")), ("asti", "Verb", None)]),
        r(&[("rAmA", "Noun", Some("J25")), ("layaH", "Noun", Some("H01")), ("asti", "Verb", None)]),
        r(&[("rAmA", "Noun", Some("D04")), ("AlayaH", "Noun", Some("H01")), ("asti", "Verb", None)]),
        r(&[("rAmA", "Noun", Some("D03")), ("alayaH", "Noun", Some("H01")), ("asti", "Verb", None)]),
        r(&[("rAmA", "Noun", Some("D03")), ("a", "Iic", Some("J25")), ("layaH", "Noun", Some("H01")), ("asti", "Verb", None)]),
        r(&[("rAma", "Verb", Some("D02")), ("AlayaH", "Noun", Some("H01")), ("asti", "Verb", None)]),
        r(&[("rAma", "Verb", Some("D01")), ("alayaH", "Noun", Some("H01")), ("asti", "Verb", None)]),
        r(&[("rAma", "Verb", Some("D01")), ("a", "Iic", Some("J25")), ("layaH", "Noun", Some("H01")), ("asti", "Verb", None)]),
    ]
}

/// The shipped frequency counts, copied by hand.
pub struct Sheet {
    pub sandhi_words: HashMap<&'static str, u128>,
    pub samasa_words: HashMap<&'static str, u128>,
    pub sandhi_transitions: HashMap<&'static str, u128>,
    pub samasa_transitions: HashMap<&'static str, u128>,
}

pub fn shipped_sheet() -> Sheet {
    Sheet {
        sandhi_words: HashMap::from([
            ("asti", 120),
            ("rAmaH", 40),
            ("vanam", 35),
            ("gacCati", 60),
            ("AlayaH", 25),
            ("alayaH", 3),
            ("layaH", 6),
            ("rAmA", 8),
            ("rAma", 2),
            ("a", 4),
        ]),
        samasa_words: HashMap::from([("rAma", 30), ("a", 2)]),
        sandhi_transitions: HashMap::from([("H01", 45), ("H17", 20), ("M03", 15), ("D03", 5), ("D04", 7), ("J25", 12), ("J03", 9)]),
        samasa_transitions: HashMap::from([("D01", 6), ("D02", 18), ("J25", 3)]),
    }
}

/// Exact fraction over `u128`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio(pub u128, pub u128);

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Ratio {
    fn norm(self) -> Ratio {
        let g = gcd(self.0, self.1).max(1);
        Ratio(self.0 / g, self.1 / g)
    }
    pub fn mul(self, o: Ratio) -> Ratio {
        Ratio(self.0 * o.0, self.1 * o.1).norm()
    }
    pub fn add(self, o: Ratio) -> Ratio {
        Ratio(self.0 * o.1 + o.0 * self.1, self.1 * o.1).norm()
    }
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / self.1 as f64
    }
}

fn cell(table: &HashMap<&'static str, u128>, key: &str) -> Ratio {
    let total: u128 = table.values().sum();
    Ratio(*table.get(key).unwrap_or(&1), total + 1).norm()
}

/// `[pop, mittal, kumar, unigram]` for a row, compound membership read
/// from the phase name.
pub fn sheet_scores(sheet: &Sheet, row: &Row) -> [f64; 4] {
    let compound = |p: &str| p == "Iic";
    let pw: Vec<Ratio> = row
        .iter()
        .map(|(f, p, _)| cell(if compound(p) { &sheet.samasa_words } else { &sheet.sandhi_words }, f))
        .collect();
    let pt: Vec<Ratio> = row
        .iter()
        .map(|(_, p, r)| match r {
            None => Ratio(1, 1),
            Some(id) if id == "_" => Ratio(1, 1),
            Some(id) => cell(
                if compound(p) {
                    &sheet.samasa_transitions
                } else {
                    &sheet.sandhi_transitions
                },
                id,
            ),
        })
        .collect();
    let m = row.len() as u128;
    let one = Ratio(1, 1);
    let pop = pw.iter().zip(&pt).fold(one, |acc, (w, t)| acc.mul(*w).mul(*t));
    let mut mittal = Ratio(1, m);
    for i in 0..row.len() - 1 {
        mittal = mittal.mul(pw[i].add(pw[i + 1])).mul(pt[i]);
    }
    let unigram = pw.iter().fold(one, |acc, w| acc.mul(*w));
    let kumar = pt.iter().fold(unigram, |acc, t| acc.mul(*t)).mul(Ratio(1, m));
    [pop.to_f64(), mittal.to_f64(), kumar.to_f64(), unigram.to_f64()]
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs())
}
