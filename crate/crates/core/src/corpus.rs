//! Bibliographic input parsing and the resolved citation graph.
//!
//! Papers arrive as JSON Lines, journals as CSV. [`Corpus::build`] resolves
//! reference keys against paper ids: keys that match become citation edges,
//! everything else stays external but still counts toward the citing
//! paper's reference count `R`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Read};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_YEAR: i64 = 1900;
pub const MAX_YEAR: i64 = 2100;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed record: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: empty paper id")]
    EmptyId { line: usize },
    #[error("line {line}: duplicate paper id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: year {year} of paper `{id}` outside [{MIN_YEAR}, {MAX_YEAR}]")]
    YearOutOfRange { line: usize, id: String, year: i64 },
    #[error("line {line}: paper `{id}` references itself")]
    SelfReference { line: usize, id: String },
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("journals header must be `id,title,categories`, found `{found}`")]
    BadHeader { found: String },
    #[error("line {line}: journal `{id}` has no categories")]
    EmptyCategories { line: usize, id: String },
    #[error("line {line}: journal `{id}` lists category `{category}` twice")]
    DuplicateCategory {
        line: usize,
        id: String,
        category: String,
    },
    #[error("line {line}: duplicate journal id `{id}`")]
    DuplicateJournal { line: usize, id: String },
    #[error("paper `{paper}` names unknown journal `{journal}`")]
    UnresolvedJournal { paper: String, journal: String },
    #[error("corpus has no papers")]
    EmptyCorpus,
    #[error("unknown paper `{0}`")]
    UnknownPaper(String),
    #[error("invalid citation window `{0}` (expected `all` or `yearsN` with N >= 1)")]
    InvalidWindow(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

/// A publication record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paper {
    pub id: String,
    pub year: i32,
    #[serde(rename = "journal")]
    pub journal_id: String,
    pub references: Vec<String>,
    #[serde(
        rename = "citations",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub raw_citation_count: Option<u64>,
}

impl Paper {
    /// Length of the full reference list, internal and external keys alike.
    pub fn reference_count(&self) -> usize {
        self.references.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Journal {
    pub id: String,
    pub title: String,
    /// Non-empty; the first entry is the primary category.
    pub categories: Vec<String>,
}

impl Journal {
    pub fn primary_category(&self) -> &str {
        &self.categories[0]
    }
}

/// Which citing papers count toward a cited paper's citations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CitationWindow {
    #[default]
    All,
    /// Citing papers from the cited paper's year through `n - 1` years later.
    FixedYears(u32),
}

impl CitationWindow {
    pub fn fixed_years(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(CorpusError::InvalidWindow("years0".into()));
        }
        Ok(CitationWindow::FixedYears(n))
    }

    pub fn admits(&self, cited_year: i32, citing_year: i32) -> bool {
        match *self {
            CitationWindow::All => true,
            CitationWindow::FixedYears(n) => {
                let lag = i64::from(citing_year) - i64::from(cited_year);
                lag >= 0 && lag < i64::from(n)
            }
        }
    }
}

impl fmt::Display for CitationWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CitationWindow::All => f.write_str("all"),
            CitationWindow::FixedYears(n) => write!(f, "years{n}"),
        }
    }
}

impl FromStr for CitationWindow {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(CitationWindow::All);
        }
        s.strip_prefix("years")
            .and_then(|n| n.parse::<u32>().ok())
            .filter(|&n| n >= 1)
            .map(CitationWindow::FixedYears)
            .ok_or_else(|| CorpusError::InvalidWindow(s.to_string()))
    }
}

impl Serialize for CitationWindow {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CitationWindow {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Deserialize)]
struct RawPaper {
    id: String,
    year: i64,
    journal: String,
    references: Vec<String>,
    #[serde(default)]
    citations: Option<u64>,
}

/// Parses a JSON Lines paper stream. Blank lines are ignored; any invalid
/// record aborts the parse with its 1-based line number.
pub fn parse_papers<R: BufRead>(reader: R) -> Result<Vec<Paper>> {
    let mut papers = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawPaper = serde_json::from_str(&line).map_err(|source| CorpusError::Json {
            line: line_no,
            source,
        })?;
        if raw.id.is_empty() {
            return Err(CorpusError::EmptyId { line: line_no });
        }
        if !(MIN_YEAR..=MAX_YEAR).contains(&raw.year) {
            return Err(CorpusError::YearOutOfRange {
                line: line_no,
                id: raw.id,
                year: raw.year,
            });
        }
        if raw.references.contains(&raw.id) {
            return Err(CorpusError::SelfReference {
                line: line_no,
                id: raw.id,
            });
        }
        if !seen.insert(raw.id.clone()) {
            return Err(CorpusError::DuplicateId {
                line: line_no,
                id: raw.id,
            });
        }
        papers.push(Paper {
            id: raw.id,
            year: raw.year as i32,
            journal_id: raw.journal,
            references: raw.references,
            raw_citation_count: raw.citations,
        });
    }
    Ok(papers)
}

/// Parses a journals CSV with header `id,title,categories`, categories
/// pipe-separated.
pub fn parse_journals<R: Read>(reader: R) -> Result<Vec<Journal>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(1, e))?.clone();
    if header.iter().map(str::trim).collect::<Vec<_>>() != ["id", "title", "categories"] {
        return Err(CorpusError::BadHeader {
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut journals = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            csv_error(line, e)
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let id = record[0].trim().to_string();
        let title = record[1].to_string();
        let categories: Vec<String> = record[2]
            .split('|')
            .map(|c| c.trim().to_string())
            .filter(|c| !c.is_empty())
            .collect();
        if categories.is_empty() {
            return Err(CorpusError::EmptyCategories { line, id });
        }
        let mut distinct = HashSet::new();
        for c in &categories {
            if !distinct.insert(c.as_str()) {
                return Err(CorpusError::DuplicateCategory {
                    line,
                    id,
                    category: c.clone(),
                });
            }
        }
        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateJournal { line, id });
        }
        journals.push(Journal {
            id,
            title,
            categories,
        });
    }
    Ok(journals)
}

fn csv_error(line: usize, e: csv::Error) -> CorpusError {
    CorpusError::Csv {
        line,
        message: e.to_string(),
    }
}

/// Immutable resolved collection of papers, journals and citation edges.
///
/// All maps are ordered by id, so iteration (and every downstream
/// floating-point accumulation) runs in ascending paper-id order.
#[derive(Debug, Clone)]
pub struct Corpus {
    papers: BTreeMap<String, Paper>,
    journals: BTreeMap<String, Journal>,
    cited_by: BTreeMap<String, Vec<String>>,
    window: CitationWindow,
}

impl Corpus {
    pub fn build(
        papers: Vec<Paper>,
        journals: Vec<Journal>,
        window: CitationWindow,
    ) -> Result<Corpus> {
        if papers.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        let journals: BTreeMap<String, Journal> =
            journals.into_iter().map(|j| (j.id.clone(), j)).collect();
        let mut by_id = BTreeMap::new();
        for paper in papers {
            if !journals.contains_key(&paper.journal_id) {
                return Err(CorpusError::UnresolvedJournal {
                    paper: paper.id,
                    journal: paper.journal_id,
                });
            }
            if by_id.contains_key(&paper.id) {
                return Err(CorpusError::DuplicateId {
                    line: 0,
                    id: paper.id,
                });
            }
            by_id.insert(paper.id.clone(), paper);
        }

        let mut cited_by: BTreeMap<String, Vec<String>> =
            by_id.keys().map(|id| (id.clone(), Vec::new())).collect();
        // Citing papers are visited in ascending id order, so every
        // cited_by list comes out sorted.
        for citing in by_id.values() {
            let distinct: BTreeSet<&str> = citing.references.iter().map(String::as_str).collect();
            for key in distinct {
                if let Some(cited) = by_id.get(key) {
                    if window.admits(cited.year, citing.year) {
                        cited_by
                            .get_mut(key)
                            .expect("index covers all papers")
                            .push(citing.id.clone());
                    }
                }
            }
        }

        Ok(Corpus {
            papers: by_id,
            journals,
            cited_by,
            window,
        })
    }

    /// Rebuilds the corpus with a different journal-to-category scheme.
    pub fn with_journals(&self, journals: Vec<Journal>) -> Result<Corpus> {
        Corpus::build(self.papers.values().cloned().collect(), journals, self.window)
    }

    pub fn window(&self) -> CitationWindow {
        self.window
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    /// Papers in ascending id order.
    pub fn papers(&self) -> impl Iterator<Item = &Paper> {
        self.papers.values()
    }

    pub fn journals(&self) -> impl Iterator<Item = &Journal> {
        self.journals.values()
    }

    pub fn paper(&self, id: &str) -> Result<&Paper> {
        self.papers
            .get(id)
            .ok_or_else(|| CorpusError::UnknownPaper(id.to_string()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.papers.contains_key(id)
    }

    pub fn journal(&self, id: &str) -> Option<&Journal> {
        self.journals.get(id)
    }

    /// The journal of a paper already known to be in the corpus.
    pub fn journal_of(&self, paper: &Paper) -> &Journal {
        &self.journals[&paper.journal_id]
    }

    /// Ids of papers citing `id` within the window, ascending.
    pub fn cited_by(&self, id: &str) -> Result<&[String]> {
        self.cited_by
            .get(id)
            .map(Vec::as_slice)
            .ok_or_else(|| CorpusError::UnknownPaper(id.to_string()))
    }

    /// The override if one was supplied, else the number of citing papers.
    pub fn citation_count(&self, id: &str) -> Result<u64> {
        let paper = self.paper(id)?;
        Ok(match paper.raw_citation_count {
            Some(n) => n,
            None => self.cited_by[id].len() as u64,
        })
    }

    pub fn edge_count(&self) -> usize {
        self.cited_by.values().map(Vec::len).sum()
    }

    pub fn external_reference_count(&self) -> usize {
        self.papers
            .values()
            .flat_map(|p| p.references.iter())
            .filter(|r| !self.papers.contains_key(*r))
            .count()
    }
}
