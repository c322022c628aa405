//! Field-normalized citation impact indicators.
//!
//! The pipeline runs bottom-up: [`corpus`] parses papers and journals into a
//! citation graph, [`baselines`] derives per-(category, year) reference sets,
//! [`indicators`] scores groups of papers, and [`diagnostics`] probes the
//! indicators for order reversals, category-assignment artifacts and
//! group differences. [`synth`] generates seeded corpora for all of it and
//! [`cli`] drives everything from the `crown` binary.

pub mod baselines;
pub mod cli;
pub mod corpus;
pub mod diagnostics;
pub mod indicators;
pub mod synth;

pub use baselines::{BaselineTable, FieldYearCell, Unscorable, Weighting};
pub use corpus::{CitationWindow, Corpus, CorpusError, Journal, Paper};
pub use diagnostics::{
    consistency_counterexample, indexer_sensitivity, rank_sum_test, Counterexample,
    CrownIndicator, RankSumResult, SearchBounds, SensitivityReport,
};
pub use indicators::{
    cpp_fcsm, fractional_score, mdncs, mean_fractional, mncs, percentile_rank, pp_top,
    score_group, GroupSelection, IndicatorReport, ScorePair, ScoredPaper,
};
pub use synth::{generate_corpus, FieldSpec, SynthConfig, SynthCorpus};
