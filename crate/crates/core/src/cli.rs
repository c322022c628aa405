//! The `crown` command line.
//!
//! Exit codes: 0 on success, 1 on input errors (bad flags, unreadable or
//! malformed files), 2 on computational degeneracy such as a group with no
//! scorable paper. Every report opens with the effective configuration and
//! the SHA-256 of each input file.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::baselines::{BaselineTable, Weighting};
use crate::corpus::{parse_journals, parse_papers, CitationWindow, Corpus, Journal};
use crate::diagnostics::{
    self, consistency_counterexample, primary_only_scheme, shipped_counterexample,
    Counterexample, CrownIndicator, DiagnosticsError, SearchBounds,
};
use crate::indicators::{self, GroupSelection, IndicatorError, UnscorableEntry};
use crate::synth::{generate_corpus, FieldSpec, SynthConfig, SynthError};

#[derive(Debug, Parser)]
#[command(name = "crown", version, about = "Field-normalized citation indicators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a corpus and print a summary.
    Ingest(CorpusArgs),
    /// Export the per-(category, year) baseline table.
    Baselines(CorpusArgs),
    /// Score a group of papers.
    Score(ScoreArgs),
    /// Generate a seeded synthetic corpus.
    Synth(SynthArgs),
    /// Run a diagnostic.
    Diagnose {
        #[command(subcommand)]
        which: Diagnose,
    },
}

#[derive(Debug, Subcommand)]
enum Diagnose {
    /// Exhaustive search for an order reversal when one paper joins both groups.
    Consistency(ConsistencyArgs),
    /// Compare scores under two journal-to-category schemes.
    Indexer(IndexerArgs),
    /// Mann-Whitney rank-sum test between two groups.
    Ranksum(RanksumArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    #[arg(long)]
    papers: PathBuf,
    #[arg(long)]
    journals: PathBuf,
    /// `all` or `yearsN`.
    #[arg(long, default_value = "all", value_parser = parse_window)]
    window: CitationWindow,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ScoringArgs {
    #[arg(long, default_value = "harmonic", value_parser = parse_weighting)]
    weighting: Weighting,
    #[arg(long = "top-x", default_value_t = 1.0)]
    top_x: f64,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    group: PathBuf,
    #[command(flatten)]
    scoring: ScoringArgs,
    /// Also write per-paper scores as TSV to this path.
    #[arg(long = "per-paper")]
    per_paper: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// `name:mean_references:papers_per_year`; repeatable.
    #[arg(long = "field", value_parser = parse_field)]
    fields: Vec<FieldSpec>,
    /// Inclusive range `FIRST-LAST`.
    #[arg(long, default_value = "2000-2009", value_parser = parse_years)]
    years: (i32, i32),
    #[arg(long = "cross-field", default_value_t = 0.1)]
    cross_field: f64,
    #[arg(long = "multi-category", default_value_t = 0.5)]
    multi_category: f64,
    #[arg(long = "journals-per-field", default_value_t = 4)]
    journals_per_field: u32,
    /// Share of references sent to the current top decile.
    #[arg(long, default_value_t = 0.0)]
    skew: f64,
    /// Drop unfillable reference slots instead of emitting external keys.
    #[arg(long = "internal-only")]
    internal_only: bool,
    /// Directory receiving papers.jsonl and journals.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ConsistencyArgs {
    #[arg(long, default_value = "cpp_fcsm", value_parser = parse_indicator)]
    indicator: CrownIndicator,
    #[arg(long = "max-size", default_value_t = 2)]
    max_size: usize,
    #[arg(long = "max-value", default_value_t = 4)]
    max_value: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct IndexerArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    group: PathBuf,
    /// Alternative journals file; defaults to the primary-category-only
    /// derivation of --journals.
    #[arg(long = "scheme-b")]
    scheme_b: Option<PathBuf>,
    #[command(flatten)]
    scoring: ScoringArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Metric {
    Ncs,
    Fractional,
}

#[derive(Debug, Args)]
struct RanksumArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    group: PathBuf,
    #[arg(long = "group-b")]
    group_b: PathBuf,
    #[arg(long, value_enum, default_value = "ncs")]
    metric: Metric,
    #[arg(long, default_value = "harmonic", value_parser = parse_weighting)]
    weighting: Weighting,
}

fn parse_window(s: &str) -> Result<CitationWindow, String> {
    s.parse().map_err(|e: crate::corpus::CorpusError| e.to_string())
}

fn parse_weighting(s: &str) -> Result<Weighting, String> {
    s.parse()
}

fn parse_indicator(s: &str) -> Result<CrownIndicator, String> {
    s.parse()
}

fn parse_field(s: &str) -> Result<FieldSpec, String> {
    let parts: Vec<&str> = s.rsplitn(3, ':').collect();
    if parts.len() != 3 {
        return Err(format!("expected name:mean:papers_per_year, got `{s}`"));
    }
    let mean = parts[1]
        .parse::<f64>()
        .map_err(|e| format!("bad mean in `{s}`: {e}"))?;
    let per_year = parts[0]
        .parse::<u32>()
        .map_err(|e| format!("bad papers per year in `{s}`: {e}"))?;
    Ok(FieldSpec::new(parts[2], mean, per_year))
}

fn parse_years(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s
        .split_once('-')
        .ok_or_else(|| format!("expected FIRST-LAST, got `{s}`"))?;
    let first = a.trim().parse().map_err(|e| format!("bad year `{a}`: {e}"))?;
    let last = b.trim().parse().map_err(|e| format!("bad year `{b}`: {e}"))?;
    Ok((first, last))
}

enum Failure {
    Input(String),
    Degenerate(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<crate::corpus::CorpusError> for Failure {
    fn from(e: crate::corpus::CorpusError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<IndicatorError> for Failure {
    fn from(e: IndicatorError) -> Self {
        match e {
            IndicatorError::NoScorable
            | IndicatorError::AllUnscorable { .. }
            | IndicatorError::NoFractionalData => Failure::Degenerate(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<DiagnosticsError> for Failure {
    fn from(e: DiagnosticsError) -> Self {
        match e {
            DiagnosticsError::DegenerateVariance | DiagnosticsError::FractionalNotInvariant(_) => {
                Failure::Degenerate(e.to_string())
            }
            DiagnosticsError::Indicator(inner) => inner.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Runs the CLI against the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(Failure::Degenerate(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Ingest(args) => ingest(args, stdout),
        Command::Baselines(args) => baselines(args, stdout),
        Command::Score(args) => score(args, stdout),
        Command::Synth(args) => synth(args, stdout),
        Command::Diagnose { which } => match which {
            Diagnose::Consistency(args) => consistency(args, stdout),
            Diagnose::Indexer(args) => indexer(args, stdout),
            Diagnose::Ranksum(args) => ranksum(args, stdout),
        },
    }
}

#[derive(Debug, Clone, Serialize)]
struct InputDigest {
    role: &'static str,
    path: String,
    sha256: String,
}

fn read_input(role: &'static str, path: &Path) -> Result<(Vec<u8>, InputDigest), Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::Input(format!("cannot read {role} file {}: {e}", path.display())))?;
    let digest = InputDigest {
        role,
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    Ok((bytes, digest))
}

struct Loaded {
    corpus: Corpus,
    journals: Vec<Journal>,
    inputs: Vec<InputDigest>,
}

fn load_corpus(args: &CorpusArgs) -> Result<Loaded, Failure> {
    let (paper_bytes, paper_digest) = read_input("papers", &args.papers)?;
    let (journal_bytes, journal_digest) = read_input("journals", &args.journals)?;
    let papers = parse_papers(paper_bytes.as_slice())
        .map_err(|e| Failure::Input(format!("{}: {e}", args.papers.display())))?;
    let journals = parse_journals(journal_bytes.as_slice())
        .map_err(|e| Failure::Input(format!("{}: {e}", args.journals.display())))?;
    let corpus = Corpus::build(papers, journals.clone(), args.window)?;
    Ok(Loaded {
        corpus,
        journals,
        inputs: vec![paper_digest, journal_digest],
    })
}

fn load_group(path: &Path, inputs: &mut Vec<InputDigest>, role: &'static str) -> Result<GroupSelection, Failure> {
    let (bytes, digest) = read_input(role, path)?;
    inputs.push(digest);
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "group".to_string());
    GroupSelection::parse(name, bytes.as_slice())
        .map_err(|e| Failure::Input(format!("{}: malformed group file: {e}", path.display())))
}

/// Ordered key/value configuration printed at the top of every report.
struct Header {
    command: &'static str,
    config: Vec<(&'static str, String)>,
    inputs: Vec<InputDigest>,
}

impl Header {
    fn new(command: &'static str) -> Self {
        Header {
            command,
            config: Vec::new(),
            inputs: Vec::new(),
        }
    }

    fn set(mut self, key: &'static str, value: impl ToString) -> Self {
        self.config.push((key, value.to_string()));
        self
    }

    fn tsv(&self) -> String {
        let mut s = format!("# crown {}\n", self.command);
        for (k, v) in &self.config {
            s.push_str(&format!("# {k}: {v}\n"));
        }
        for i in &self.inputs {
            s.push_str(&format!("# input {}: {} sha256={}\n", i.role, i.path, i.sha256));
        }
        s
    }

    fn json(&self, body_key: &str, body: Value) -> Value {
        let config: serde_json::Map<String, Value> = self
            .config
            .iter()
            .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
            .collect();
        json!({
            "command": self.command,
            "config": config,
            "inputs": self.inputs,
            body_key: body,
        })
    }
}

fn emit(output: &OutputArgs, stdout: &mut dyn Write, bytes: &[u8]) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => Ok(stdout.write_all(bytes)?),
    }
}

fn json_bytes(value: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s.into_bytes()
}

fn corpus_header(command: &'static str, args: &CorpusArgs, loaded: &Loaded) -> Header {
    let mut h = Header::new(command)
        .set("window", args.window)
        .set("scheme", args.journals.display())
        .set("seed", "none");
    h.inputs = loaded.inputs.clone();
    h
}

fn ingest(args: CorpusArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let loaded = load_corpus(&args)?;
    let corpus = &loaded.corpus;
    let years: Vec<i32> = corpus.papers().map(|p| p.year).collect();
    let categories: std::collections::BTreeSet<&str> = loaded
        .journals
        .iter()
        .flat_map(|j| j.categories.iter().map(String::as_str))
        .collect();
    let summary: Vec<(&str, String)> = vec![
        ("papers", corpus.len().to_string()),
        ("journals", loaded.journals.len().to_string()),
        ("categories", categories.len().to_string()),
        (
            "multi_category_journals",
            loaded
                .journals
                .iter()
                .filter(|j| j.categories.len() > 1)
                .count()
                .to_string(),
        ),
        ("citation_edges", corpus.edge_count().to_string()),
        (
            "references",
            corpus.papers().map(|p| p.reference_count()).sum::<usize>().to_string(),
        ),
        ("external_references", corpus.external_reference_count().to_string()),
        (
            "citation_overrides",
            corpus
                .papers()
                .filter(|p| p.raw_citation_count.is_some())
                .count()
                .to_string(),
        ),
        ("first_year", years.iter().min().expect("non-empty").to_string()),
        ("last_year", years.iter().max().expect("non-empty").to_string()),
        ("baseline_cells", BaselineTable::compute(corpus).len().to_string()),
    ];
    let header = corpus_header("ingest", &args, &loaded);
    let bytes = match args.output.format {
        Format::Tsv => {
            let mut s = header.tsv();
            s.push_str("key\tvalue\n");
            for (k, v) in &summary {
                s.push_str(&format!("{k}\t{v}\n"));
            }
            s.into_bytes()
        }
        Format::Json => {
            let body: serde_json::Map<String, Value> = summary
                .iter()
                .map(|(k, v)| {
                    let n: u64 = v.parse().expect("summary values are integers");
                    (k.to_string(), Value::from(n))
                })
                .collect();
            json_bytes(&header.json("summary", Value::Object(body)))
        }
    };
    emit(&args.output, stdout, &bytes)
}

fn baselines(args: CorpusArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let loaded = load_corpus(&args)?;
    let table = BaselineTable::compute(&loaded.corpus);
    let header = corpus_header("baselines", &args, &loaded);
    let bytes = match args.output.format {
        Format::Tsv => {
            let mut out = header.tsv().into_bytes();
            table.write_tsv(&mut out)?;
            out
        }
        Format::Json => {
            let cells: Vec<Value> = table
                .cells()
                .map(|(category, year, cell)| {
                    json!({
                        "category": category,
                        "year": year,
                        "n": cell.n,
                        "mean_citations": cell.mean_citations,
                    })
                })
                .collect();
            json_bytes(&header.json("baselines", Value::Array(cells)))
        }
    };
    emit(&args.output, stdout, &bytes)
}

fn coverage_tsv(unscorable: &[UnscorableEntry]) -> String {
    let mut s = String::from("paper_id\treason\n");
    for u in unscorable {
        s.push_str(&format!("{}\t{}\n", u.paper_id, u.reason));
    }
    s
}

fn score(args: ScoreArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let mut loaded = load_corpus(&args.corpus)?;
    let group = load_group(&args.group, &mut loaded.inputs, "group")?;
    let table = BaselineTable::compute(&loaded.corpus);
    let mut header = Header::new("score")
        .set("weighting", args.scoring.weighting)
        .set("window", args.corpus.window)
        .set("top_x", args.scoring.top_x)
        .set("scheme", args.corpus.journals.display())
        .set("seed", "none");
    header.inputs = loaded.inputs.clone();

    let result = indicators::evaluate_group(
        &loaded.corpus,
        &table,
        &group,
        args.scoring.weighting,
        args.scoring.top_x,
    );
    let (report, scored) = match result {
        Ok(r) => r,
        Err(IndicatorError::AllUnscorable { group, unscorable }) => {
            let bytes = match args.corpus.output.format {
                Format::Tsv => {
                    let mut s = header.tsv();
                    s.push_str(&coverage_tsv(&unscorable));
                    s.into_bytes()
                }
                Format::Json => json_bytes(&header.json(
                    "coverage",
                    json!({ "group": group, "n_scorable": 0, "unscorable": unscorable }),
                )),
            };
            emit(&args.corpus.output, stdout, &bytes)?;
            return Err(Failure::Degenerate(format!(
                "every paper in group `{group}` is unscorable"
            )));
        }
        Err(e) => return Err(e.into()),
    };

    if let Some(path) = &args.per_paper {
        let mut out = Vec::new();
        indicators::write_scored_tsv(&scored, &mut out)?;
        fs::write(path, out)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }

    let bytes = match args.corpus.output.format {
        Format::Tsv => {
            let mut out = header.tsv().into_bytes();
            report.write_tsv(&mut out)?;
            if !report.unscorable.is_empty() {
                out.extend_from_slice(b"\n");
                out.extend_from_slice(coverage_tsv(&report.unscorable).as_bytes());
            }
            out
        }
        Format::Json => json_bytes(&header.json(
            "report",
            serde_json::to_value(&report).expect("report serializes"),
        )),
    };
    emit(&args.corpus.output, stdout, &bytes)
}

fn synth(args: SynthArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let defaults = SynthConfig::default();
    let config = SynthConfig {
        fields: if args.fields.is_empty() {
            defaults.fields
        } else {
            args.fields
        },
        first_year: args.years.0,
        last_year: args.years.1,
        cross_field_fraction: args.cross_field,
        multi_category_journal_fraction: args.multi_category,
        journals_per_field: args.journals_per_field,
        preferential_share: args.skew,
        internal_only: args.internal_only,
        seed: args.seed,
    };
    let out = generate_corpus(&config)?;
    out.write_to(&args.out)?;

    let fields: Vec<String> = config
        .fields
        .iter()
        .map(|f| format!("{}:{}:{}", f.name, f.mean_references, f.papers_per_year))
        .collect();
    let header = Header::new("synth")
        .set("seed", config.seed)
        .set("fields", fields.join(","))
        .set("years", format!("{}-{}", config.first_year, config.last_year))
        .set("cross_field", config.cross_field_fraction)
        .set("multi_category", config.multi_category_journal_fraction)
        .set("journals_per_field", config.journals_per_field)
        .set("skew", config.preferential_share)
        .set("internal_only", config.internal_only)
        .set("rng", "chacha8");
    let mut text = header.tsv();
    for (name, bytes) in [("papers.jsonl", &out.papers_jsonl), ("journals.csv", &out.journals_csv)] {
        text.push_str(&format!(
            "# output {}: sha256={}\n",
            args.out.join(name).display(),
            hex::encode(Sha256::digest(bytes))
        ));
    }
    text.push_str(&format!("papers\t{}\njournals\t{}\n", out.papers.len(), out.journals.len()));
    stdout.write_all(text.as_bytes())?;
    Ok(())
}

fn pairs_text(pairs: &[(u64, u64)]) -> String {
    pairs
        .iter()
        .map(|(c, e)| format!("({c},{e})"))
        .collect::<Vec<_>>()
        .join(";")
}

fn counterexample_tsv(label: &str, ce: &Counterexample) -> String {
    format!(
        "{label}\t{}\t{}\t{}\t({},{})\t{}\t{}\t{}\t{}\t{}\n",
        ce.indicator,
        pairs_text(&ce.group_a),
        pairs_text(&ce.group_b),
        ce.added_paper.0,
        ce.added_paper.1,
        ce.before_a,
        ce.before_b,
        ce.after_a,
        ce.after_b,
        ce.is_flip()
    )
}

fn consistency(args: ConsistencyArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let bounds = SearchBounds {
        max_group_size: args.max_size,
        max_value: args.max_value,
    };
    if bounds.max_group_size == 0 || bounds.max_value == 0 {
        return Err(Failure::Input("search bounds must be at least 1".into()));
    }
    let found = consistency_counterexample(args.indicator, bounds);
    let shipped = shipped_counterexample();
    let shipped_here = Counterexample::evaluate(
        args.indicator,
        &shipped.group_a,
        &shipped.group_b,
        shipped.added_paper,
    );
    let header = Header::new("diagnose consistency")
        .set("indicator", args.indicator)
        .set("max_size", bounds.max_group_size)
        .set("max_value", bounds.max_value)
        .set("seed", "none");
    let bytes = match args.output.format {
        Format::Tsv => {
            let mut s = header.tsv();
            s.push_str("instance\tindicator\tgroup_a\tgroup_b\tadded\tbefore_a\tbefore_b\tafter_a\tafter_b\tflip\n");
            s.push_str(&counterexample_tsv("shipped", &shipped_here));
            match &found {
                Some(ce) => s.push_str(&counterexample_tsv("search", ce)),
                None => s.push_str(&format!("search\t{}\tnone\n", args.indicator)),
            }
            s.into_bytes()
        }
        Format::Json => json_bytes(&header.json(
            "result",
            json!({ "shipped": shipped_here, "search": found }),
        )),
    };
    emit(&args.output, stdout, &bytes)
}

fn indexer(args: IndexerArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let mut loaded = load_corpus(&args.corpus)?;
    let group = load_group(&args.group, &mut loaded.inputs, "group")?;
    let (scheme_b, scheme_b_label) = match &args.scheme_b {
        Some(path) => {
            let (bytes, digest) = read_input("scheme_b", path)?;
            loaded.inputs.push(digest);
            let journals = parse_journals(bytes.as_slice())
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            (journals, path.display().to_string())
        }
        None => (primary_only_scheme(&loaded.journals), "primary-only".to_string()),
    };
    let report = diagnostics::indexer_sensitivity(
        &loaded.corpus,
        &group,
        &loaded.journals,
        &scheme_b,
        args.scoring.weighting,
        args.scoring.top_x,
    )?;
    let mut header = Header::new("diagnose indexer")
        .set("weighting", args.scoring.weighting)
        .set("window", args.corpus.window)
        .set("top_x", args.scoring.top_x)
        .set("scheme", args.corpus.journals.display())
        .set("scheme_b", scheme_b_label)
        .set("seed", "none");
    header.inputs = loaded.inputs;
    let bytes = match args.corpus.output.format {
        Format::Tsv => {
            let mut out = header.tsv().into_bytes();
            report.write_tsv(&mut out)?;
            let d = &report.deltas;
            writeln!(
                out,
                "\ngroup\tdelta_cpp_fcsm\tdelta_mncs\tdelta_mdncs\tdelta_pp_top1\tdelta_mean_fractional"
            )?;
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                report.group,
                d.cpp_fcsm,
                d.mncs,
                d.mdncs,
                d.pp_top1,
                d.mean_fractional.map_or_else(|| "NA".into(), |v| v.to_string())
            )?;
            out
        }
        Format::Json => json_bytes(&header.json(
            "sensitivity",
            serde_json::to_value(&report).expect("report serializes"),
        )),
    };
    emit(&args.corpus.output, stdout, &bytes)
}

fn ranksum(args: RanksumArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let mut loaded = load_corpus(&args.corpus)?;
    let group_a = load_group(&args.group, &mut loaded.inputs, "group")?;
    let group_b = load_group(&args.group_b, &mut loaded.inputs, "group_b")?;
    let table = BaselineTable::compute(&loaded.corpus);
    let sample = |group: &GroupSelection| -> Result<Vec<f64>, Failure> {
        group.validate(&loaded.corpus)?;
        let scored =
            indicators::score_papers(&loaded.corpus, &table, &group.paper_ids, args.weighting)?;
        Ok(scored
            .iter()
            .filter_map(|s| match args.metric {
                Metric::Ncs => s.ncs,
                Metric::Fractional => s.fractional,
            })
            .collect())
    };
    let a = sample(&group_a)?;
    let b = sample(&group_b)?;
    let result = diagnostics::rank_sum_test(&a, &b)?;
    let metric = match args.metric {
        Metric::Ncs => "ncs",
        Metric::Fractional => "fractional",
    };
    let mut header = Header::new("diagnose ranksum")
        .set("metric", metric)
        .set("weighting", args.weighting)
        .set("window", args.corpus.window)
        .set("scheme", args.corpus.journals.display())
        .set("seed", "none");
    header.inputs = loaded.inputs;
    let bytes = match args.corpus.output.format {
        Format::Tsv => {
            let mut s = header.tsv();
            s.push_str("group_a\tgroup_b\tn_a\tn_b\tu\tz\tp_two_sided\n");
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                group_a.name, group_b.name, result.n_a, result.n_b, result.u, result.z, result.p_two_sided
            ));
            s.into_bytes()
        }
        Format::Json => json_bytes(&header.json(
            "ranksum",
            json!({
                "group_a": group_a.name,
                "group_b": group_b.name,
                "result": result,
            }),
        )),
    };
    emit(&args.corpus.output, stdout, &bytes)
}
