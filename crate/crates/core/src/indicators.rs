//! Group-level citation impact indicators.
//!
//! Ratio-of-sums (CPP/FCSm) and mean-of-ratios (MNCS) are computed from the
//! same `(c, e)` pairs, next to the median variant (MdNCS), percentile-based
//! top-x% shares and citing-side fractional counts. Group statistics only
//! ever see scorable papers; the report carries both `n_total` and
//! `n_scorable` with the excluded ids.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{BaselineTable, FieldYearCell, Unscorable, Weighting};
use crate::corpus::{CitationWindow, Corpus};

#[derive(Debug, Error)]
pub enum IndicatorError {
    #[error("no scorable papers")]
    NoScorable,
    #[error("group `{0}` is empty")]
    EmptyGroup(String),
    #[error("group `{group}` lists unknown paper `{id}`")]
    UnknownPaper { group: String, id: String },
    #[error("group `{group}` lists paper `{id}` twice")]
    DuplicatePaper { group: String, id: String },
    #[error("every paper in group `{group}` is unscorable")]
    AllUnscorable {
        group: String,
        unscorable: Vec<UnscorableEntry>,
    },
    #[error("no member of the reference set has {citations} citations")]
    NotInCell { citations: u64 },
    #[error("top-x share must lie in (0, 100), got {0}")]
    InvalidTopX(f64),
    #[error("paper `{0}` carries a citation-count override and has no citing-side data")]
    CountOverridden(String),
    #[error("no paper in the group has citing-side data for fractional counting")]
    NoFractionalData,
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = IndicatorError> = std::result::Result<T, E>;

/// Observed and expected citations of one paper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScorePair {
    pub citations: f64,
    pub expected: f64,
}

impl ScorePair {
    pub fn new(citations: f64, expected: f64) -> Self {
        ScorePair {
            citations,
            expected,
        }
    }

    pub fn ncs(&self) -> f64 {
        self.citations / self.expected
    }
}

impl From<(f64, f64)> for ScorePair {
    fn from((c, e): (f64, f64)) -> Self {
        ScorePair::new(c, e)
    }
}

/// Old crown indicator: `Σ c / Σ e`.
pub fn cpp_fcsm(pairs: &[ScorePair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(IndicatorError::NoScorable);
    }
    let c = stable_sum(pairs.iter().map(|p| p.citations));
    let e = stable_sum(pairs.iter().map(|p| p.expected));
    Ok(c / e)
}

/// New crown indicator: mean of `c / e`.
pub fn mncs(pairs: &[ScorePair]) -> Result<f64> {
    let ncs: Vec<f64> = pairs.iter().map(ScorePair::ncs).collect();
    mean(&ncs).ok_or(IndicatorError::NoScorable)
}

/// Median of `c / e`.
pub fn mdncs(pairs: &[ScorePair]) -> Result<f64> {
    let ncs: Vec<f64> = pairs.iter().map(ScorePair::ncs).collect();
    median(&ncs).ok_or(IndicatorError::NoScorable)
}

/// Neumaier-compensated sum, accumulated in iteration order.
pub fn stable_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(stable_sum(values.iter().copied()) / values.len() as f64)
}

/// Median; an even count takes the midpoint of the central pair.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

/// Percentile of a citation count within its reference set:
/// `100 (L + T/2) / n`, with `L` members below and `T` tied (self included).
pub fn percentile_rank(citations: u64, cell: &FieldYearCell) -> Result<f64> {
    let (below, tied) = cell.below_and_tied(citations);
    if tied == 0 {
        return Err(IndicatorError::NotInCell { citations });
    }
    // 50 (2L + T) / n keeps the numerator an exact integer.
    Ok(50.0 * (2 * below + tied) as f64 / cell.n as f64)
}

/// Equal-weight mean of the per-cell percentiles.
pub fn combined_percentile(citations: u64, cells: &[&FieldYearCell]) -> Result<f64> {
    let per_cell = cells
        .iter()
        .map(|cell| percentile_rank(citations, cell))
        .collect::<Result<Vec<_>>>()?;
    mean(&per_cell).ok_or(IndicatorError::NoScorable)
}

/// Citing-side fractional count: each citing paper `q` contributes `1 / R(q)`.
pub fn fractional_score(corpus: &Corpus, paper_id: &str) -> Result<f64> {
    let paper = corpus.paper(paper_id)?;
    if paper.raw_citation_count.is_some() {
        return Err(IndicatorError::CountOverridden(paper_id.to_string()));
    }
    let mut weights = Vec::new();
    for citing in corpus.cited_by(paper_id)? {
        let r = corpus.paper(citing)?.reference_count();
        weights.push(1.0 / r as f64);
    }
    Ok(stable_sum(weights))
}

/// Sum of fractional scores over every paper without a count override.
///
/// With all references internal this equals the number of papers holding
/// at least one reference.
pub fn total_fractional(corpus: &Corpus) -> f64 {
    stable_sum(
        corpus
            .papers()
            .filter_map(|p| fractional_score(corpus, &p.id).ok()),
    )
}

/// Mean fractional count over `paper_ids`, skipping papers with count
/// overrides.
pub fn mean_fractional(corpus: &Corpus, paper_ids: &[String]) -> Result<f64> {
    if paper_ids.is_empty() {
        return Err(IndicatorError::EmptyGroup(String::new()));
    }
    let mut scores = Vec::with_capacity(paper_ids.len());
    for id in paper_ids {
        match fractional_score(corpus, id) {
            Ok(f) => scores.push(f),
            Err(IndicatorError::CountOverridden(_)) => {}
            Err(e) => return Err(e),
        }
    }
    mean(&scores).ok_or(IndicatorError::NoFractionalData)
}

/// A named set of corpus papers under evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSelection {
    pub name: String,
    pub paper_ids: Vec<String>,
}

impl GroupSelection {
    pub fn new(name: impl Into<String>, paper_ids: Vec<String>) -> Self {
        GroupSelection {
            name: name.into(),
            paper_ids,
        }
    }

    /// One paper id per line; `#` starts a comment, blank lines are skipped.
    pub fn parse<R: BufRead>(name: impl Into<String>, reader: R) -> Result<Self> {
        let mut ids = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let content = line.split('#').next().unwrap_or("").trim();
            if !content.is_empty() {
                ids.push(content.to_string());
            }
        }
        Ok(GroupSelection::new(name, ids))
    }

    /// The whole corpus as one group.
    pub fn whole_corpus(name: impl Into<String>, corpus: &Corpus) -> Self {
        GroupSelection::new(name, corpus.papers().map(|p| p.id.clone()).collect())
    }

    pub fn validate(&self, corpus: &Corpus) -> Result<()> {
        if self.paper_ids.is_empty() {
            return Err(IndicatorError::EmptyGroup(self.name.clone()));
        }
        let mut seen = HashSet::new();
        for id in &self.paper_ids {
            if !corpus.contains(id) {
                return Err(IndicatorError::UnknownPaper {
                    group: self.name.clone(),
                    id: id.clone(),
                });
            }
            if !seen.insert(id.as_str()) {
                return Err(IndicatorError::DuplicatePaper {
                    group: self.name.clone(),
                    id: id.clone(),
                });
            }
        }
        Ok(())
    }

    /// Ids in ascending order, the accumulation order for all statistics.
    pub fn sorted_ids(&self) -> Vec<String> {
        let mut ids = self.paper_ids.clone();
        ids.sort();
        ids
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPaper {
    pub paper_id: String,
    pub citations: u64,
    pub expected: Option<f64>,
    pub ncs: Option<f64>,
    pub percentile: Option<f64>,
    pub fractional: Option<f64>,
    pub unscorable: Option<Unscorable>,
}

impl ScoredPaper {
    pub fn is_scorable(&self) -> bool {
        self.unscorable.is_none()
    }

    pub fn pair(&self) -> Option<ScorePair> {
        self.expected
            .map(|e| ScorePair::new(self.citations as f64, e))
    }
}

/// Scores one corpus paper against `baselines`.
pub fn score_paper(
    corpus: &Corpus,
    baselines: &BaselineTable,
    paper_id: &str,
    weighting: Weighting,
) -> Result<ScoredPaper> {
    let paper = corpus.paper(paper_id)?;
    let citations = corpus.citation_count(paper_id)?;
    let categories = &corpus.journal_of(paper).categories;

    let percentile = match baselines.cells_for(categories, paper.year) {
        Ok(cells) => Some(combined_percentile(citations, &cells)?),
        Err(_) => None,
    };
    let (expected, unscorable) = match baselines.expected_for(categories, paper.year, weighting) {
        Ok(e) => (Some(e), None),
        Err(reason) => (None, Some(reason)),
    };
    let fractional = match fractional_score(corpus, paper_id) {
        Ok(f) => Some(f),
        Err(IndicatorError::CountOverridden(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(ScoredPaper {
        paper_id: paper_id.to_string(),
        citations,
        expected,
        ncs: expected.map(|e| citations as f64 / e),
        percentile,
        fractional,
        unscorable,
    })
}

/// Scores `paper_ids` in ascending id order.
pub fn score_papers(
    corpus: &Corpus,
    baselines: &BaselineTable,
    paper_ids: &[String],
    weighting: Weighting,
) -> Result<Vec<ScoredPaper>> {
    let mut ids = paper_ids.to_vec();
    ids.sort();
    ids.iter()
        .map(|id| score_paper(corpus, baselines, id, weighting))
        .collect()
}

/// Share of scorable papers whose percentile is at least `100 - x`.
pub fn pp_top(scored: &[ScoredPaper], x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 100.0) {
        return Err(IndicatorError::InvalidTopX(x));
    }
    let threshold = 100.0 - x;
    let percentiles: Vec<f64> = scored
        .iter()
        .filter(|s| s.is_scorable())
        .filter_map(|s| s.percentile)
        .collect();
    if percentiles.is_empty() {
        return Err(IndicatorError::NoScorable);
    }
    let hits = percentiles.iter().filter(|&&p| p >= threshold).count();
    Ok(hits as f64 / percentiles.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnscorableEntry {
    pub paper_id: String,
    pub reason: Unscorable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub group: String,
    pub n_total: usize,
    pub n_scorable: usize,
    pub cpp_fcsm: f64,
    pub mncs: f64,
    pub mdncs: f64,
    /// Top-x% share at `top_x` (1.0 unless configured otherwise).
    pub pp_top1: f64,
    pub top_x: f64,
    /// `None` only when every group paper carries a citation-count override.
    pub mean_fractional: Option<f64>,
    pub n_fractional: usize,
    pub weighting: Weighting,
    pub window: CitationWindow,
    pub unscorable: Vec<UnscorableEntry>,
    pub fractional_excluded: Vec<String>,
}

pub const REPORT_TSV_COLUMNS: [&str; 8] = [
    "group",
    "n_total",
    "n_scorable",
    "cpp_fcsm",
    "mncs",
    "mdncs",
    "pp_top1",
    "mean_fractional",
];

impl IndicatorReport {
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", REPORT_TSV_COLUMNS.join("\t"))?;
        let mean_fractional = self
            .mean_fractional
            .map_or_else(|| "NA".to_string(), |f| f.to_string());
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.group,
            self.n_total,
            self.n_scorable,
            self.cpp_fcsm,
            self.mncs,
            self.mdncs,
            self.pp_top1,
            mean_fractional
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }
}

/// Computes every indicator for `group`, with the scored papers it used.
pub fn evaluate_group(
    corpus: &Corpus,
    baselines: &BaselineTable,
    group: &GroupSelection,
    weighting: Weighting,
    top_x: f64,
) -> Result<(IndicatorReport, Vec<ScoredPaper>)> {
    if !(top_x > 0.0 && top_x < 100.0) {
        return Err(IndicatorError::InvalidTopX(top_x));
    }
    group.validate(corpus)?;
    let scored = score_papers(corpus, baselines, &group.paper_ids, weighting)?;

    let unscorable: Vec<UnscorableEntry> = scored
        .iter()
        .filter_map(|s| {
            s.unscorable.clone().map(|reason| UnscorableEntry {
                paper_id: s.paper_id.clone(),
                reason,
            })
        })
        .collect();
    let pairs: Vec<ScorePair> = scored
        .iter()
        .filter(|s| s.is_scorable())
        .filter_map(ScoredPaper::pair)
        .collect();
    if pairs.is_empty() {
        return Err(IndicatorError::AllUnscorable {
            group: group.name.clone(),
            unscorable,
        });
    }

    let fractional: Vec<f64> = scored.iter().filter_map(|s| s.fractional).collect();
    let fractional_excluded: Vec<String> = scored
        .iter()
        .filter(|s| s.fractional.is_none())
        .map(|s| s.paper_id.clone())
        .collect();
    for id in &fractional_excluded {
        log::warn!("paper `{id}` has a citation-count override; excluded from fractional counting");
    }

    let report = IndicatorReport {
        group: group.name.clone(),
        n_total: scored.len(),
        n_scorable: pairs.len(),
        cpp_fcsm: cpp_fcsm(&pairs)?,
        mncs: mncs(&pairs)?,
        mdncs: mdncs(&pairs)?,
        pp_top1: pp_top(&scored, top_x)?,
        top_x,
        mean_fractional: mean(&fractional),
        n_fractional: fractional.len(),
        weighting,
        window: corpus.window(),
        unscorable,
        fractional_excluded,
    };
    Ok((report, scored))
}

pub fn score_group(
    corpus: &Corpus,
    baselines: &BaselineTable,
    group: &GroupSelection,
    weighting: Weighting,
    top_x: f64,
) -> Result<IndicatorReport> {
    evaluate_group(corpus, baselines, group, weighting, top_x).map(|(report, _)| report)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

/// Per-paper TSV: `paper_id, citations, expected, ncs, percentile, fractional, unscorable`.
pub fn write_scored_tsv<W: Write>(scored: &[ScoredPaper], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "paper_id\tcitations\texpected\tncs\tpercentile\tfractional\tunscorable"
    )?;
    for s in scored {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.paper_id,
            s.citations,
            opt(s.expected),
            opt(s.ncs),
            opt(s.percentile),
            opt(s.fractional),
            s.unscorable.as_ref().map_or_else(String::new, ToString::to_string)
        )?;
    }
    Ok(())
}
