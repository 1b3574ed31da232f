//! Wire format shared by the CLI JSON output and the HTTP service.
//!
//! Every top-level document carries `"schema": SCHEMA_VERSION` so clients
//! can tell when the shape changes.

use serde::{Deserialize, Serialize};

use viccheda_core::eval::ItemOutcome;
use viccheda_core::{
    Comparison, EvalReport, Lattice, RankedSolution, SandhiRule, Scorer, Segment, Segmentation,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleDto {
    pub rule_id: String,
    pub u: String,
    pub v: String,
    pub w: String,
    pub context: String,
}

impl From<&SandhiRule> for RuleDto {
    fn from(r: &SandhiRule) -> Self {
        RuleDto {
            rule_id: r.rule_id.clone(),
            u: r.u.to_string(),
            v: r.v.to_string(),
            w: r.w.to_string(),
            context: r.context.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDto {
    pub phase: String,
    pub stem: String,
    pub gloss: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentDto {
    pub form: String,
    /// Phase of the representative path; `analyses` lists every phase
    /// merged into this segment.
    pub phase: String,
    pub compound: bool,
    /// Half-open unit range, junction windows included.
    pub span: [usize; 2],
    pub analyses: Vec<AnalysisDto>,
    /// Junction to the next word; null on the final word.
    pub transition: Option<RuleDto>,
}

impl From<&Segment> for SegmentDto {
    fn from(s: &Segment) -> Self {
        SegmentDto {
            form: s.form.to_string(),
            phase: s.phase.name.clone(),
            compound: s.is_compound_component,
            span: [s.span.0, s.span.1],
            analyses: s
                .entries
                .iter()
                .map(|e| AnalysisDto {
                    phase: e.phase.name.clone(),
                    stem: e.stem.clone(),
                    gloss: e.gloss.clone(),
                })
                .collect(),
            transition: s.out_transition.as_deref().map(RuleDto::from),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionDto {
    pub rank: usize,
    pub confidence: f64,
    /// Natural log of the confidence; still ordered when it underflows.
    pub log_confidence: f64,
    pub words: Vec<String>,
    pub segments: Vec<SegmentDto>,
}

impl From<&RankedSolution> for SolutionDto {
    fn from(r: &RankedSolution) -> Self {
        SolutionDto {
            rank: r.rank,
            confidence: r.score.value,
            log_confidence: r.score.log_value,
            words: r.solution.words().into_iter().map(String::from).collect(),
            segments: r.solution.segments.iter().map(SegmentDto::from).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDto {
    pub id: usize,
    pub position: usize,
    pub state: String,
    pub carry: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeDto {
    pub from: usize,
    pub to: usize,
    pub form: String,
    pub phase: String,
    pub compound: bool,
    pub window: Option<[usize; 2]>,
    pub rule_id: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeDto {
    pub start: Option<usize>,
    pub accept: Option<usize>,
    pub nodes: Vec<NodeDto>,
    pub edges: Vec<EdgeDto>,
}

impl LatticeDto {
    pub fn new(lat: &Lattice, state_name: impl Fn(viccheda_core::StateId) -> String) -> Self {
        LatticeDto {
            start: lat.start(),
            accept: lat.accept(),
            nodes: lat
                .nodes()
                .iter()
                .enumerate()
                .map(|(id, n)| NodeDto {
                    id,
                    position: n.position,
                    state: state_name(n.state),
                    carry: n.carry.to_string(),
                })
                .collect(),
            edges: lat
                .edges()
                .iter()
                .map(|e| EdgeDto {
                    from: e.from,
                    to: e.to,
                    form: e.form.to_string(),
                    phase: e.phase.name.clone(),
                    compound: e.phase.is_compound_component,
                    window: e.window.map(|(a, b)| [a, b]),
                    rule_id: e.rule.as_ref().map(|r| r.rule_id.clone()),
                })
                .collect(),
        }
    }
}

/// Ranked solutions for one input, as printed by `segment` and returned by
/// both POST endpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentResponse {
    pub schema: u32,
    pub text: String,
    pub scorer: String,
    pub dedup: bool,
    pub truncated: bool,
    /// Unmerged solutions counted on the lattice, saturating at `u64::MAX`.
    pub total_paths: u64,
    pub solutions: Vec<SolutionDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeDto>,
    /// Why the list is empty, when pruning removed everything.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl SegmentResponse {
    pub fn new(text: &str, scorer: Scorer, dedup: bool, seg: &Segmentation) -> Self {
        SegmentResponse {
            schema: SCHEMA_VERSION,
            text: text.to_string(),
            scorer: scorer.to_string(),
            dedup,
            truncated: seg.truncated,
            total_paths: u64::try_from(seg.total_paths).unwrap_or(u64::MAX),
            solutions: seg.solutions.iter().map(SolutionDto::from).collect(),
            lattice: None,
            reason: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentRequest {
    pub text: String,
    #[serde(default)]
    pub scorer: Option<String>,
    #[serde(default)]
    pub dedup: Option<bool>,
}

/// A split word picked out of the grid.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WordChoice {
    pub span: [usize; 2],
    pub form: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneConstraint {
    #[serde(default)]
    pub accepted: Vec<WordChoice>,
    #[serde(default)]
    pub rejected: Vec<WordChoice>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneRequest {
    pub text: String,
    #[serde(default)]
    pub constraints: PruneConstraint,
    #[serde(default)]
    pub scorer: Option<String>,
    #[serde(default)]
    pub dedup: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorDto {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub schema: u32,
    pub error: ErrorDto,
}

impl ErrorResponse {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        ErrorResponse {
            schema: SCHEMA_VERSION,
            error: ErrorDto {
                kind: kind.to_string(),
                message: message.into(),
                position: None,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub schema: u32,
    pub status: String,
    pub lexicon_entries: usize,
    pub rules: usize,
    pub states: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItemDto {
    pub solutions: usize,
    pub gold_position: Option<usize>,
}

impl From<&ItemOutcome> for ItemDto {
    fn from(o: &ItemOutcome) -> Self {
        ItemDto {
            solutions: o.solutions,
            gold_position: o.gold_position,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDto {
    pub total: usize,
    pub with_correct: usize,
    pub incorrect: usize,
    pub recall: f64,
    /// Ranks 1 to 5, then everything later.
    pub position_histogram: Vec<usize>,
    pub position_percent_of_total: Vec<f64>,
    pub position_percent_of_correct: Vec<f64>,
    pub entries_with_k_solutions: Vec<usize>,
    pub total_solutions: usize,
    pub avg_solutions: f64,
    pub avg_correct_position: f64,
    pub degenerate: bool,
    pub items: Vec<ItemDto>,
}

impl From<&EvalReport> for ReportDto {
    fn from(r: &EvalReport) -> Self {
        use viccheda_core::Denominator;
        let ranks = 1..=r.position_histogram.len();
        ReportDto {
            total: r.total,
            with_correct: r.with_correct,
            incorrect: r.incorrect(),
            recall: r.recall(),
            position_histogram: r.position_histogram.to_vec(),
            position_percent_of_total: ranks.clone().map(|k| r.position_percent(k, Denominator::Total)).collect(),
            position_percent_of_correct: ranks.map(|k| r.position_percent(k, Denominator::WithCorrect)).collect(),
            entries_with_k_solutions: r.entries_with_k_solutions.to_vec(),
            total_solutions: r.total_solutions,
            avg_solutions: r.avg_solutions,
            avg_correct_position: r.avg_correct_position,
            degenerate: r.degenerate,
            items: r.items.iter().map(ItemDto::from).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRowDto {
    pub label: String,
    pub old_count: usize,
    pub old_percent: Option<f64>,
    pub new_count: usize,
    pub new_percent: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResponse {
    pub schema: u32,
    pub corpus: String,
    pub scorer: String,
    pub report: ReportDto,
    /// Unranked run against the ranked one, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<ReportDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Vec<ComparisonRowDto>>,
}

pub fn comparison_rows(c: &Comparison) -> Vec<ComparisonRowDto> {
    c.rows
        .iter()
        .map(|r| ComparisonRowDto {
            label: r.label.clone(),
            old_count: r.old_count,
            old_percent: r.old_percent,
            new_count: r.new_count,
            new_percent: r.new_percent,
            delta: r.delta(),
        })
        .collect()
}
