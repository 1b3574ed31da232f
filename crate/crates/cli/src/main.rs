use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand, ValueEnum};

use viccheda::dto::{comparison_rows, EvalResponse, ReportDto, SegmentResponse, SCHEMA_VERSION};
use viccheda::server::{serve, AppState};
use viccheda::{segment_raw, RequestOptions, ResourceSet};
use viccheda_core::{compare, evaluate, load_corpus, EvalOptions, RankedSolution, Scorer};

#[derive(Parser)]
#[command(name = "viccheda", version, about = "Sanskrit sandhi splitter with frequency ranking")]
struct Cli {
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ResourceArgs {
    /// Directory holding lexicon.tsv, rules.tsv, automaton.tsv and freq/.
    #[arg(long, global = true, env = "VICCHEDA_DATA", default_value = "data")]
    data: PathBuf,
    #[arg(long, global = true, env = "VICCHEDA_LEXICON")]
    lexicon: Option<PathBuf>,
    #[arg(long, global = true, env = "VICCHEDA_RULES")]
    rules: Option<PathBuf>,
    #[arg(long, global = true, env = "VICCHEDA_AUTOMATON")]
    automaton: Option<PathBuf>,
    /// Directory of frequency tables.
    #[arg(long, global = true, env = "VICCHEDA_FREQ")]
    freq: Option<PathBuf>,
}

impl ResourceArgs {
    fn resolve(&self) -> ResourceSet {
        ResourceSet::resolve(
            &self.data,
            self.lexicon.clone(),
            self.rules.clone(),
            self.automaton.clone(),
            self.freq.clone(),
        )
    }
}

#[derive(Args, Clone, Copy)]
struct RankArgs {
    #[arg(long, default_value_t = Scorer::Pop, value_parser = parse_scorer)]
    scorer: Scorer,
    /// Keep solutions that differ only in phase or analysis.
    #[arg(long)]
    no_dedup: bool,
    /// Keep enumeration order instead of sorting by confidence.
    #[arg(long)]
    no_rank: bool,
    /// Stop enumerating after this many solutions; 0 means no limit.
    #[arg(long, default_value_t = viccheda_core::segmenter::DEFAULT_SOLUTION_CAP)]
    max_solutions: usize,
}

impl RankArgs {
    fn options(&self) -> RequestOptions {
        RequestOptions {
            scorer: self.scorer,
            dedup: !self.no_dedup,
            sort: !self.no_rank,
            cap: (self.max_solutions > 0).then_some(self.max_solutions),
        }
    }
}

fn parse_scorer(s: &str) -> Result<Scorer, String> {
    s.parse()
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Split one sandhied text and print its ranked readings.
    Segment {
        /// SLP1 text; several arguments are joined with spaces.
        #[arg(required = true)]
        text: Vec<String>,
        #[command(flatten)]
        rank: RankArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Score a corpus of `sandhied<TAB>gold split` rows.
    Eval {
        corpus: PathBuf,
        #[command(flatten)]
        rank: RankArgs,
        /// Also run without merging and sorting and print both side by side.
        #[arg(long)]
        compare: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        format: ReportFormat,
        /// Write report.json and report.txt into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the JSON service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long, default_value_t = viccheda_core::segmenter::DEFAULT_SOLUTION_CAP)]
        max_solutions: usize,
    },
    /// Load every resource and report what was found.
    CheckResources,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let resources = cli.resources.resolve();
    match cli.command {
        Command::Segment { text, rank, format } => {
            let engine = resources.load()?;
            let raw = text.join(" ");
            let opts = rank.options();
            let out = segment_raw(&engine, &raw, &opts).with_context(|| format!("cannot segment `{raw}`"))?;
            let seg = &out.segmentation;
            match format {
                Format::Json => {
                    let resp = SegmentResponse::new(out.text.as_str(), opts.scorer, opts.dedup, seg);
                    println!("{}", serde_json::to_string_pretty(&resp)?);
                }
                Format::Tsv => print!("{}", to_tsv(&seg.solutions)),
            }
            if seg.truncated {
                log::warn!("output truncated after {} of {} solutions", seg.solutions.len(), seg.total_paths);
            }
            Ok(if seg.solutions.is_empty() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Eval {
            corpus,
            rank,
            compare: with_baseline,
            format,
            out,
        } => {
            let engine = resources.load()?;
            let items = load_corpus(&corpus)?;
            let opts = rank.options();
            let report = evaluate(&items, &engine, &EvalOptions { segment: opts.segment_options() });
            let mut text = report.to_table();
            let mut resp = EvalResponse {
                schema: SCHEMA_VERSION,
                corpus: corpus.display().to_string(),
                scorer: opts.scorer.to_string(),
                report: ReportDto::from(&report),
                baseline: None,
                comparison: None,
            };
            if with_baseline {
                let raw = RequestOptions {
                    dedup: false,
                    sort: false,
                    ..opts
                };
                let baseline = evaluate(&items, &engine, &EvalOptions { segment: raw.segment_options() });
                let cmp = compare(&baseline, &report)?;
                text = cmp.to_table();
                resp.baseline = Some(ReportDto::from(&baseline));
                resp.comparison = Some(comparison_rows(&cmp));
            }
            let json = serde_json::to_string_pretty(&resp)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).with_context(|| format!("creating `{}`", dir.display()))?;
                std::fs::write(dir.join("report.json"), format!("{json}\n"))?;
                std::fs::write(dir.join("report.txt"), &text)?;
            }
            match format {
                ReportFormat::Table => print!("{text}"),
                ReportFormat::Json => println!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve { addr, max_solutions } => {
            let engine = resources.load()?;
            let state = AppState {
                engine: Arc::new(engine),
                cap: (max_solutions > 0).then_some(max_solutions),
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(serve(state, &addr))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckResources => {
            let engine = resources.load()?;
            let p = &resources.paths;
            println!("lexicon    {} ({} entries)", p.lexicon.display(), engine.lexicon.len());
            println!("rules      {} ({} rules)", p.rules.display(), engine.rules.len());
            println!("automaton  {} ({} states)", p.automaton.display(), engine.automaton.state_count());
            let t = &engine.tables;
            println!(
                "freq       {} (words {}+{}, transitions {}+{})",
                p.frequencies.display(),
                t.sandhi_words.len(),
                t.samasa_words.len(),
                t.sandhi_transitions.len(),
                t.samasa_transitions.len()
            );
            for w in engine.automaton.warnings() {
                println!("warning: {w}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// One line per solution: rank, confidence, `form:phase` words, and the
/// rule ids between them.
fn to_tsv(solutions: &[RankedSolution]) -> String {
    let mut out = String::from("# rank\tconfidence\twords\ttransitions\n");
    for r in solutions {
        let words: Vec<String> = r.solution.segments.iter().map(|s| format!("{}:{}", s.form, s.phase.name)).collect();
        let rules: Vec<&str> = r
            .solution
            .segments
            .iter()
            .filter_map(|s| s.out_transition.as_ref().map(|t| t.rule_id.as_str()))
            .collect();
        writeln!(out, "{}\t{:e}\t{}\t{}", r.rank, r.score.value, words.join(" "), rules.join(" ")).unwrap();
    }
    out
}
