//! Per-(category, year) reference sets and expected citation values.
//!
//! The corpus itself is the reference universe: every paper contributes its
//! citation count to the cell of each category its journal carries, keyed by
//! publication year. A paper in `m` categories therefore sits in `m` cells.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Paper};
use crate::indicators::stable_sum;

/// How a multi-category paper's per-field expectations are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Arithmetic,
    #[default]
    Harmonic,
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::Arithmetic => "arithmetic",
            Weighting::Harmonic => "harmonic",
        })
    }
}

impl FromStr for Weighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "arithmetic" => Ok(Weighting::Arithmetic),
            "harmonic" => Ok(Weighting::Harmonic),
            other => Err(format!(
                "unknown weighting `{other}` (expected arithmetic or harmonic)"
            )),
        }
    }
}

/// Why a paper cannot be normalized.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Unscorable {
    #[error("zero baseline in category `{category}` for {year}")]
    ZeroBaseline { category: String, year: i32 },
    #[error("zero combined baseline for {year}")]
    ZeroExpected { year: i32 },
    #[error("no reference set for category `{category}` in {year}")]
    MissingCell { category: String, year: i32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldYearCell {
    pub n: usize,
    pub mean_citations: f64,
    pub sorted_citations: Vec<u64>,
}

impl FieldYearCell {
    fn from_counts(mut counts: Vec<u64>) -> Self {
        // Integer sum, so the mean does not depend on accumulation order.
        let total: u64 = counts.iter().sum();
        counts.sort_unstable();
        FieldYearCell {
            n: counts.len(),
            mean_citations: total as f64 / counts.len() as f64,
            sorted_citations: counts,
        }
    }

    /// `(L, T)`: members cited strictly less than `citations`, and members
    /// tied with it.
    pub fn below_and_tied(&self, citations: u64) -> (usize, usize) {
        let below = self.sorted_citations.partition_point(|&c| c < citations);
        let through = self.sorted_citations.partition_point(|&c| c <= citations);
        (below, through - below)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BaselineTable {
    cells: BTreeMap<(String, i32), FieldYearCell>,
}

impl BaselineTable {
    pub fn compute(corpus: &Corpus) -> Self {
        let mut counts: BTreeMap<(String, i32), Vec<u64>> = BTreeMap::new();
        for paper in corpus.papers() {
            let c = corpus
                .citation_count(&paper.id)
                .expect("paper iterated from corpus");
            for category in &corpus.journal_of(paper).categories {
                counts
                    .entry((category.clone(), paper.year))
                    .or_default()
                    .push(c);
            }
        }
        BaselineTable {
            cells: counts
                .into_iter()
                .map(|(k, v)| (k, FieldYearCell::from_counts(v)))
                .collect(),
        }
    }

    pub fn cell(&self, category: &str, year: i32) -> Option<&FieldYearCell> {
        self.cells.get(&(category.to_string(), year))
    }

    pub fn cells(&self) -> impl Iterator<Item = (&str, i32, &FieldYearCell)> {
        self.cells.iter().map(|((c, y), cell)| (c.as_str(), *y, cell))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// The reference sets of a paper, one per category of its journal.
    pub fn cells_for<'a>(
        &'a self,
        categories: &'a [String],
        year: i32,
    ) -> Result<Vec<&'a FieldYearCell>, Unscorable> {
        categories
            .iter()
            .map(|category| {
                self.cell(category, year).ok_or_else(|| Unscorable::MissingCell {
                    category: category.clone(),
                    year,
                })
            })
            .collect()
    }

    /// Per-category expected values `e_j` in the journal's category order.
    pub fn field_expectations(
        &self,
        categories: &[String],
        year: i32,
    ) -> Result<Vec<f64>, Unscorable> {
        Ok(self
            .cells_for(categories, year)?
            .into_iter()
            .map(|cell| cell.mean_citations)
            .collect())
    }

    /// Combined expected citations `e` for a paper in `categories` published
    /// in `year`.
    pub fn expected_for(
        &self,
        categories: &[String],
        year: i32,
        weighting: Weighting,
    ) -> Result<f64, Unscorable> {
        let per_field = self.field_expectations(categories, year)?;
        if weighting == Weighting::Harmonic {
            if let Some(pos) = per_field.iter().position(|&e| e == 0.0) {
                return Err(Unscorable::ZeroBaseline {
                    category: categories[pos].clone(),
                    year,
                });
            }
        }
        let e = combine(&per_field, weighting);
        if e == 0.0 {
            return Err(Unscorable::ZeroExpected { year });
        }
        Ok(e)
    }

    pub fn expected_citations(
        &self,
        corpus: &Corpus,
        paper: &Paper,
        weighting: Weighting,
    ) -> Result<f64, Unscorable> {
        self.expected_for(&corpus.journal_of(paper).categories, paper.year, weighting)
    }

    /// `c / e` for a corpus paper.
    pub fn normalized_score(
        &self,
        corpus: &Corpus,
        paper: &Paper,
        weighting: Weighting,
    ) -> Result<f64, Unscorable> {
        let e = self.expected_citations(corpus, paper, weighting)?;
        let c = corpus
            .citation_count(&paper.id)
            .expect("paper belongs to corpus");
        Ok(c as f64 / e)
    }

    /// Writes `category, year, n, mean_citations` as TSV.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "category\tyear\tn\tmean_citations")?;
        for ((category, year), cell) in &self.cells {
            writeln!(out, "{category}\t{year}\t{}\t{}", cell.n, cell.mean_citations)?;
        }
        Ok(())
    }
}

/// Equal-weight combination of per-field expectations.
///
/// The harmonic form is the one for which `c / e` equals the average of the
/// per-field ratios `c / e_j`.
pub fn combine(per_field: &[f64], weighting: Weighting) -> f64 {
    let m = per_field.len() as f64;
    match weighting {
        Weighting::Arithmetic => stable_sum(per_field.iter().copied()) / m,
        Weighting::Harmonic => m / stable_sum(per_field.iter().map(|e| 1.0 / e)),
    }
}
