//! Phoneme strings, the sandhi rule table and its inverted index.
//!
//! Text is held in SLP1, where every phoneme is exactly one ASCII code
//! point. A rule `u|v -> w` rewrites the last phonemes `u` of a word and the
//! first phonemes `v` of the following word into the surface window `w`.
//! Splitting runs the table backwards: [`RuleIndex::invert_at`] lists every
//! rule whose `w` occurs at a given text position.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tsv;

/// The SLP1 phoneme inventory, plus avagraha.
pub const SLP1_ALPHABET: &str = "aAiIuUfFxXeEoOMH~kKgGNcCjJYwWqQRtTdDnpPbBmyrlvSzshLZV'";

/// Hard segment boundary. Whitespace in the input collapses to this unit.
pub const BOUNDARY: u8 = b' ';

/// Longest `u` or `v` a rule may carry.
pub const MAX_CONTEXT_LEN: usize = 2;

pub fn is_phoneme(c: char) -> bool {
    c != ' ' && SLP1_ALPHABET.contains(c)
}

/// A sequence of SLP1 phonemes, possibly containing [`BOUNDARY`] units.
/// Cheap to clone.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhonemeString(Arc<str>);

impl PhonemeString {
    /// Builds a phoneme string from SLP1 text that contains no whitespace.
    pub fn new(text: &str) -> Result<Self> {
        for (position, ch) in text.chars().enumerate() {
            if !is_phoneme(ch) {
                return Err(Error::InvalidPhoneme { position, ch });
            }
        }
        Ok(PhonemeString(text.into()))
    }

    pub fn empty() -> Self {
        PhonemeString::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// One byte per phoneme.
    pub fn units(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn is_boundary_at(&self, pos: usize) -> bool {
        self.units().get(pos) == Some(&BOUNDARY)
    }

    pub fn boundary_count(&self) -> usize {
        self.units().iter().filter(|&&b| b == BOUNDARY).count()
    }

    /// The units in `range` as a new phoneme string.
    pub fn slice(&self, range: std::ops::Range<usize>) -> PhonemeString {
        PhonemeString(self.0[range].into())
    }

    pub fn starts_with(&self, prefix: &PhonemeString) -> bool {
        self.0.starts_with(prefix.as_str())
    }

    pub fn ends_with(&self, suffix: &PhonemeString) -> bool {
        self.0.ends_with(suffix.as_str())
    }

    /// Wraps units already known to be phonemes or boundaries.
    pub(crate) fn from_trusted(units: String) -> Self {
        PhonemeString(units.into())
    }
}

impl fmt::Display for PhonemeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for PhonemeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl FromStr for PhonemeString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PhonemeString::new(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Slp1,
}

/// Reads raw input text. Whitespace runs collapse to one [`BOUNDARY`];
/// leading and trailing whitespace is dropped. Error positions count
/// characters, not bytes.
pub fn parse_text(raw: &str, scheme: Scheme) -> Result<PhonemeString> {
    let Scheme::Slp1 = scheme;
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for (position, ch) in raw.chars().enumerate() {
        if ch.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if !is_phoneme(ch) {
            return Err(Error::InvalidPhoneme { position, ch });
        }
        if pending_space {
            out.push(BOUNDARY as char);
            pending_space = false;
        }
        out.push(ch);
    }
    Ok(PhonemeString(out.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Context {
    Sandhi,
    Samasa,
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Context::Sandhi => "Sandhi",
            Context::Samasa => "Samasa",
        })
    }
}

impl FromStr for Context {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "Sandhi" | "sandhi" => Ok(Context::Sandhi),
            "Samasa" | "samasa" => Ok(Context::Samasa),
            other => Err(format!("unknown context `{other}`")),
        }
    }
}

/// One junction rule `u|v -> w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SandhiRule {
    pub rule_id: String,
    pub u: PhonemeString,
    pub v: PhonemeString,
    pub w: PhonemeString,
    pub context: Context,
    pub source_sutra: Option<String>,
}

/// Id of the implicit juxtaposition across a whitespace boundary.
pub const BOUNDARY_RULE_ID: &str = "_";

impl SandhiRule {
    /// The implicit rule that joins two words across a hard boundary.
    pub fn boundary() -> Self {
        SandhiRule {
            rule_id: BOUNDARY_RULE_ID.to_string(),
            u: PhonemeString::empty(),
            v: PhonemeString::empty(),
            w: PhonemeString(" ".into()),
            context: Context::Sandhi,
            source_sutra: None,
        }
    }

    pub fn is_boundary(&self) -> bool {
        self.rule_id == BOUNDARY_RULE_ID && self.w.units() == [BOUNDARY]
    }
}

impl fmt::Display for SandhiRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{} -> {}", self.u, self.v, self.w)
    }
}

/// A split candidate returned by [`RuleIndex::invert_at`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JunctionCandidate<'a> {
    pub rule: &'a SandhiRule,
    /// Number of text units covered by `rule.w`.
    pub consumed: usize,
}

impl JunctionCandidate<'_> {
    pub fn u(&self) -> &PhonemeString {
        &self.rule.u
    }

    pub fn v(&self) -> &PhonemeString {
        &self.rule.v
    }
}

type ForwardKey = (PhonemeString, PhonemeString, Context);

/// Forward rule table and its inverse. Immutable once built.
#[derive(Clone, Debug)]
pub struct RuleIndex {
    rules: Vec<SandhiRule>,
    forward: HashMap<ForwardKey, usize>,
    inverse: HashMap<PhonemeString, Vec<usize>>,
    by_id: HashMap<String, usize>,
    // Rule indices keyed by the first unit of `w`, longest `w` first.
    buckets: Vec<Vec<usize>>,
    boundary: SandhiRule,
}

impl Default for RuleIndex {
    fn default() -> Self {
        RuleIndex {
            rules: Vec::new(),
            forward: HashMap::new(),
            inverse: HashMap::new(),
            by_id: HashMap::new(),
            buckets: vec![Vec::new(); 128],
            boundary: SandhiRule::boundary(),
        }
    }
}

fn parse_context_field(field: &str) -> Result<PhonemeString> {
    if field == "-" {
        Ok(PhonemeString::empty())
    } else {
        PhonemeString::new(field)
    }
}

impl RuleIndex {
    pub fn from_rules(rules: impl IntoIterator<Item = SandhiRule>) -> Result<Self> {
        let mut index = RuleIndex::default();
        for rule in rules {
            index.insert(rule)?;
        }
        index.finish();
        Ok(index)
    }

    /// Parses the rule TSV format:
    /// `rule_id \t u \t v \t w \t context \t sutra`.
    pub fn from_tsv(source_name: &str, text: &str) -> Result<Self> {
        let mut index = RuleIndex::default();
        for row in tsv::rows(source_name, text) {
            let (line, fields) = row?;
            let bad = |reason: &str| tsv::malformed(source_name, line, reason);
            if fields.len() != 6 {
                return Err(bad("expected 6 tab-separated columns"));
            }
            let rule_id = fields[0];
            if rule_id.is_empty() || rule_id == BOUNDARY_RULE_ID {
                return Err(bad("invalid rule id"));
            }
            let u = parse_context_field(fields[1]).map_err(|e| bad(&e.to_string()))?;
            let v = parse_context_field(fields[2]).map_err(|e| bad(&e.to_string()))?;
            if fields[3] == "-" || fields[3].is_empty() {
                return Err(bad("empty result"));
            }
            let w = PhonemeString::new(fields[3]).map_err(|e| bad(&e.to_string()))?;
            let context: Context = fields[4].parse().map_err(|e: String| bad(&e))?;
            let source_sutra = match fields[5] {
                "" | "-" => None,
                s => Some(s.to_string()),
            };
            let rule = SandhiRule {
                rule_id: rule_id.to_string(),
                u,
                v,
                w,
                context,
                source_sutra,
            };
            validate(&rule).map_err(bad)?;
            index.insert(rule)?;
        }
        index.finish();
        Ok(index)
    }

    fn insert(&mut self, rule: SandhiRule) -> Result<()> {
        validate(&rule).map_err(|reason| Error::MalformedRow {
            source_name: rule.rule_id.clone(),
            line: 0,
            reason: reason.to_string(),
        })?;
        if self.by_id.contains_key(&rule.rule_id) {
            return Err(Error::DuplicateRule(rule.rule_id));
        }
        let key = (rule.u.clone(), rule.v.clone(), rule.context);
        if self.forward.contains_key(&key) {
            return Err(Error::ConflictingRule {
                u: rule.u.to_string(),
                v: rule.v.to_string(),
                context: rule.context.to_string(),
            });
        }
        let idx = self.rules.len();
        self.forward.insert(key, idx);
        self.inverse.entry(rule.w.clone()).or_default().push(idx);
        self.by_id.insert(rule.rule_id.clone(), idx);
        self.buckets[rule.w.units()[0] as usize].push(idx);
        self.rules.push(rule);
        Ok(())
    }

    fn finish(&mut self) {
        let rules = &self.rules;
        for bucket in &mut self.buckets {
            bucket.sort_by(|&a, &b| {
                rules[b]
                    .w
                    .len()
                    .cmp(&rules[a].w.len())
                    .then_with(|| rules[a].rule_id.cmp(&rules[b].rule_id))
            });
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> &[SandhiRule] {
        &self.rules
    }

    pub fn boundary_rule(&self) -> &SandhiRule {
        &self.boundary
    }

    pub fn get(&self, rule_id: &str) -> Option<&SandhiRule> {
        if rule_id == BOUNDARY_RULE_ID {
            return Some(&self.boundary);
        }
        self.by_id.get(rule_id).map(|&i| &self.rules[i])
    }

    /// Forward lookup: the rule that joins `u` and `v` in `context`.
    pub fn apply(&self, u: &PhonemeString, v: &PhonemeString, context: Context) -> Option<&SandhiRule> {
        self.forward
            .get(&(u.clone(), v.clone(), context))
            .map(|&i| &self.rules[i])
    }

    /// Every rule whose result is exactly `w`.
    pub fn producing<'a>(&'a self, w: &PhonemeString) -> impl Iterator<Item = &'a SandhiRule> + 'a {
        self.inverse
            .get(w)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(move |&i| &self.rules[i])
    }

    /// All junctions whose surface window starts at `pos`, longest window
    /// first. A boundary unit yields only the implicit boundary junction.
    pub fn invert_at<'a>(&'a self, text: &PhonemeString, pos: usize) -> Vec<JunctionCandidate<'a>> {
        let units = text.units();
        let Some(&first) = units.get(pos) else {
            return Vec::new();
        };
        if first == BOUNDARY {
            return vec![JunctionCandidate {
                rule: &self.boundary,
                consumed: 1,
            }];
        }
        let rest = &units[pos..];
        self.buckets[first as usize]
            .iter()
            .map(|&i| &self.rules[i])
            .filter(|rule| rest.starts_with(rule.w.units()))
            .map(|rule| JunctionCandidate {
                rule,
                consumed: rule.w.len(),
            })
            .collect()
    }
}

fn validate(rule: &SandhiRule) -> std::result::Result<(), &'static str> {
    if rule.u.len() > MAX_CONTEXT_LEN || rule.v.len() > MAX_CONTEXT_LEN {
        return Err("u and v hold at most two phonemes");
    }
    if rule.u.is_empty() && rule.v.is_empty() {
        return Err("u and v are both empty");
    }
    if rule.w.is_empty() {
        return Err("empty result");
    }
    if rule.w.len() > rule.u.len() + rule.v.len() + 2 {
        return Err("result introduces more than two phonemes");
    }
    Ok(())
}

/// Loads a rule table file.
pub fn load_rules(path: &Path) -> Result<RuleIndex> {
    let text = tsv::read_file(path)?;
    RuleIndex::from_tsv(&path.display().to_string(), &text)
}
