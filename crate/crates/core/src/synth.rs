//! Seeded synthetic corpora with field-dependent citation densities.
//!
//! Generation is single-threaded and fully determined by the seed. The RNG
//! is ChaCha8 seeded with `seed_from_u64(seed)`, consumed in this order:
//!
//! 1. multi-category journal selection (one index sample), then for each
//!    selected journal in ascending order: the number of extra categories,
//!    then which other fields supply them;
//! 2. papers in year-major, field, index order: journal choice, reference
//!    count `R ~ Poisson(field mean)`, then for each reference slot the
//!    within/cross-field draw, the preferential draw (only when the skew
//!    knob is non-zero) and the target index, with up to
//!    [`DUPLICATE_RETRIES`] redraws of the target on a repeated pick.
//!
//! References only target papers from strictly earlier years. A slot that
//! cannot be filled (no earlier papers, or only repeats) becomes an external
//! key unless `internal_only` is set, in which case it is dropped.

use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Journal, Paper, MAX_YEAR, MIN_YEAR};

pub const DUPLICATE_RETRIES: usize = 8;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub name: String,
    pub mean_references: f64,
    pub papers_per_year: u32,
}

impl FieldSpec {
    pub fn new(name: impl Into<String>, mean_references: f64, papers_per_year: u32) -> Self {
        FieldSpec {
            name: name.into(),
            mean_references,
            papers_per_year,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub fields: Vec<FieldSpec>,
    pub first_year: i32,
    pub last_year: i32,
    /// Probability that a reference goes to another field.
    pub cross_field_fraction: f64,
    /// Share of journals carrying 2-3 categories.
    pub multi_category_journal_fraction: f64,
    pub journals_per_field: u32,
    /// Share of references redirected to the top decile of the candidate
    /// pool by citations received so far.
    pub preferential_share: f64,
    pub internal_only: bool,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            fields: vec![
                FieldSpec::new("mathematics", 6.0, 100),
                FieldSpec::new("biomedicine", 40.0, 100),
            ],
            first_year: 2000,
            last_year: 2009,
            cross_field_fraction: 0.1,
            multi_category_journal_fraction: 0.5,
            journals_per_field: 4,
            preferential_share: 0.0,
            internal_only: false,
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::Degenerate(msg));
        if self.fields.is_empty() {
            return bad("no fields".into());
        }
        if self.first_year > self.last_year {
            return bad(format!(
                "empty year range {}..={}",
                self.first_year, self.last_year
            ));
        }
        let years = i64::from(self.first_year)..=i64::from(self.last_year);
        if *years.start() < MIN_YEAR || *years.end() > MAX_YEAR {
            return bad(format!("years must lie in [{MIN_YEAR}, {MAX_YEAR}]"));
        }
        for (name, v) in [
            ("cross_field_fraction", self.cross_field_fraction),
            (
                "multi_category_journal_fraction",
                self.multi_category_journal_fraction,
            ),
            ("preferential_share", self.preferential_share),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} = {v} outside [0, 1]"));
            }
        }
        if self.journals_per_field == 0 {
            return bad("journals_per_field must be at least 1".into());
        }
        let mut names = std::collections::HashSet::new();
        for f in &self.fields {
            if f.name.trim().is_empty() || f.name.contains('|') {
                return bad(format!("invalid field name `{}`", f.name));
            }
            if !names.insert(f.name.as_str()) {
                return bad(format!("field `{}` listed twice", f.name));
            }
            if !(f.mean_references > 0.0 && f.mean_references.is_finite()) {
                return bad(format!(
                    "field `{}` needs a positive mean reference count",
                    f.name
                ));
            }
            if f.papers_per_year == 0 {
                return bad(format!("field `{}` has zero papers per year", f.name));
            }
        }
        Ok(())
    }

    pub fn total_papers(&self) -> usize {
        let years = (self.last_year - self.first_year + 1) as usize;
        years
            * self
                .fields
                .iter()
                .map(|f| f.papers_per_year as usize)
                .sum::<usize>()
    }
}

/// Generated records together with their serialized file forms.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub papers: Vec<Paper>,
    pub journals: Vec<Journal>,
    /// Field index of each paper, aligned with `papers`.
    pub paper_fields: Vec<usize>,
    pub papers_jsonl: Vec<u8>,
    pub journals_csv: Vec<u8>,
}

impl SynthCorpus {
    pub fn write_to(&self, dir: &Path) -> Result<(), SynthError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("papers.jsonl"), &self.papers_jsonl)?;
        std::fs::write(dir.join("journals.csv"), &self.journals_csv)?;
        Ok(())
    }
}

pub fn generate_corpus(config: &SynthConfig) -> Result<SynthCorpus, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let journals = generate_journals(config, &mut rng);
    let per_field = config.journals_per_field as usize;
    let field_journal = |field: usize, k: usize| &journals[field * per_field + k];

    let poissons: Vec<Poisson<f64>> = config
        .fields
        .iter()
        .map(|f| Poisson::new(f.mean_references).expect("validated mean"))
        .collect();

    let n_fields = config.fields.len();
    let total = config.total_papers();
    let mut papers: Vec<Paper> = Vec::with_capacity(total);
    let mut paper_fields: Vec<usize> = Vec::with_capacity(total);
    let mut received = vec![0u64; total];
    // Earlier-year papers per field, grown at each year boundary.
    let mut by_field: Vec<Vec<usize>> = vec![Vec::new(); n_fields];

    for year in config.first_year..=config.last_year {
        let pools = YearPools::build(&by_field, &received, config.preferential_share > 0.0);
        let year_start = papers.len();

        for (field, spec) in config.fields.iter().enumerate() {
            for _ in 0..spec.papers_per_year {
                let idx = papers.len();
                let id = paper_id(idx);
                let journal = field_journal(field, rng.random_range(0..per_field));
                let wanted = poissons[field].sample(&mut rng) as usize;

                let mut chosen: Vec<usize> = Vec::with_capacity(wanted);
                let mut references = Vec::with_capacity(wanted);
                for slot in 0..wanted {
                    let cross = n_fields > 1 && rng.random_bool(config.cross_field_fraction);
                    let pool = if cross {
                        &pools.cross[field]
                    } else {
                        &pools.within[field]
                    };
                    match pool.draw(&mut rng, config.preferential_share, &chosen) {
                        Some(target) => {
                            chosen.push(target);
                            received[target] += 1;
                            references.push(paper_id(target));
                        }
                        None if config.internal_only => {}
                        None => references.push(format!("ext:{id}:{slot}")),
                    }
                }

                papers.push(Paper {
                    id,
                    year,
                    journal_id: journal.id.clone(),
                    references,
                    raw_citation_count: None,
                });
                paper_fields.push(field);
            }
        }

        for (offset, &field) in paper_fields[year_start..].iter().enumerate() {
            by_field[field].push(year_start + offset);
        }
    }

    let mut papers_jsonl = Vec::new();
    for paper in &papers {
        serde_json::to_writer(&mut papers_jsonl, paper).expect("paper serializes");
        papers_jsonl.push(b'\n');
    }
    let journals_csv = write_journals_csv(&journals)?;

    Ok(SynthCorpus {
        papers,
        journals,
        paper_fields,
        papers_jsonl,
        journals_csv,
    })
}

fn paper_id(idx: usize) -> String {
    format!("p{idx:07}")
}

/// One journal list per field, `journals_per_field` each. The first journal
/// of every field stays single-category.
fn generate_journals(config: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<Journal> {
    let n_fields = config.fields.len();
    let per_field = config.journals_per_field as usize;
    let mut journals: Vec<Journal> = config
        .fields
        .iter()
        .enumerate()
        .flat_map(|(f, spec)| {
            (0..per_field).map(move |k| Journal {
                id: format!("j{f}-{k}"),
                title: format!("{} Letters {}", spec.name, k + 1),
                categories: vec![spec.name.clone()],
            })
        })
        .collect();

    if n_fields < 2 {
        return journals;
    }
    let eligible: Vec<usize> = (0..journals.len())
        .filter(|i| i % per_field != 0)
        .collect();
    let wanted = (config.multi_category_journal_fraction * journals.len() as f64).round() as usize;
    let n_multi = wanted.min(eligible.len());
    let mut selected: Vec<usize> = index::sample(rng, eligible.len(), n_multi)
        .into_iter()
        .map(|i| eligible[i])
        .collect();
    selected.sort_unstable();

    for j in selected {
        let own = j / per_field;
        let others: Vec<usize> = (0..n_fields).filter(|&f| f != own).collect();
        let extra = (1 + rng.random_range(0..2usize)).min(others.len());
        for pick in index::sample(rng, others.len(), extra) {
            let name = config.fields[others[pick]].name.clone();
            journals[j].categories.push(name);
        }
    }
    journals
}

fn write_journals_csv(journals: &[Journal]) -> Result<Vec<u8>, SynthError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["id", "title", "categories"])?;
    for j in journals {
        wtr.write_record([j.id.as_str(), j.title.as_str(), &j.categories.join("|")])?;
    }
    wtr.flush()?;
    Ok(wtr.into_inner().map_err(|e| e.into_error())?)
}

struct Pool {
    members: Vec<usize>,
    top_decile: Vec<usize>,
}

impl Pool {
    fn new(members: Vec<usize>, received: &[u64], skewed: bool) -> Self {
        let top_decile = if skewed && !members.is_empty() {
            let mut ranked = members.clone();
            ranked.sort_by(|&a, &b| received[b].cmp(&received[a]).then(a.cmp(&b)));
            ranked.truncate(members.len().div_ceil(10));
            ranked
        } else {
            Vec::new()
        };
        Pool {
            members,
            top_decile,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, preferential: f64, taken: &[usize]) -> Option<usize> {
        if self.members.is_empty() {
            return None;
        }
        let source = if preferential > 0.0 && rng.random_bool(preferential) {
            &self.top_decile
        } else {
            &self.members
        };
        for _ in 0..=DUPLICATE_RETRIES {
            let target = source[rng.random_range(0..source.len())];
            if !taken.contains(&target) {
                return Some(target);
            }
        }
        None
    }
}

struct YearPools {
    within: Vec<Pool>,
    cross: Vec<Pool>,
}

impl YearPools {
    fn build(by_field: &[Vec<usize>], received: &[u64], skewed: bool) -> Self {
        let within = by_field
            .iter()
            .map(|m| Pool::new(m.clone(), received, skewed))
            .collect();
        let cross = (0..by_field.len())
            .map(|f| {
                let mut members: Vec<usize> = by_field
                    .iter()
                    .enumerate()
                    .filter(|&(g, _)| g != f)
                    .flat_map(|(_, m)| m.iter().copied())
                    .collect();
                members.sort_unstable();
                Pool::new(members, received, skewed)
            })
            .collect();
        YearPools { within, cross }
    }
}
