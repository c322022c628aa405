//! Executable checks for three failure modes of subject-category
//! normalization: order reversals of ratio-of-sums indicators, sensitivity
//! to how journals are assigned to categories, and a non-parametric
//! comparison of two groups.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::baselines::{BaselineTable, Weighting};
use crate::corpus::{Corpus, CorpusError, Journal};
use crate::indicators::{self, GroupSelection, IndicatorError, IndicatorReport, ScorePair};

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("scheme is missing journal `{0}`")]
    SchemeMissingJournal(String),
    #[error("fractional score of `{0}` changed between schemes")]
    FractionalNotInvariant(String),
    #[error("rank-sum test needs non-empty samples with at least 3 values in total")]
    InsufficientSample,
    #[error("all values tied across both samples; variance is zero")]
    DegenerateVariance,
    #[error("non-finite score in rank-sum sample")]
    NonFinite,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
}

pub type Result<T, E = DiagnosticsError> = std::result::Result<T, E>;

/// Group indicator under test in the consistency search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrownIndicator {
    CppFcsm,
    Mncs,
}

impl fmt::Display for CrownIndicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrownIndicator::CppFcsm => "cpp_fcsm",
            CrownIndicator::Mncs => "mncs",
        })
    }
}

impl FromStr for CrownIndicator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cpp_fcsm" => Ok(CrownIndicator::CppFcsm),
            "mncs" => Ok(CrownIndicator::Mncs),
            other => Err(format!(
                "unknown indicator `{other}` (expected cpp_fcsm or mncs)"
            )),
        }
    }
}

/// An integer `(c, e)` paper with `e >= 1`.
pub type IntPair = (u64, u64);

impl CrownIndicator {
    /// Exact value over integer pairs.
    pub fn exact(&self, group: &[IntPair]) -> Ratio<i64> {
        match self {
            CrownIndicator::CppFcsm => {
                let c: u64 = group.iter().map(|p| p.0).sum();
                let e: u64 = group.iter().map(|p| p.1).sum();
                Ratio::new(c as i64, e as i64)
            }
            CrownIndicator::Mncs => {
                let total: Ratio<i64> = group
                    .iter()
                    .map(|&(c, e)| Ratio::new(c as i64, e as i64))
                    .sum();
                total / group.len() as i64
            }
        }
    }

    /// Floating-point value through the indicators module.
    pub fn value(&self, group: &[IntPair]) -> f64 {
        let pairs: Vec<ScorePair> = group
            .iter()
            .map(|&(c, e)| ScorePair::new(c as f64, e as f64))
            .collect();
        match self {
            CrownIndicator::CppFcsm => indicators::cpp_fcsm(&pairs),
            CrownIndicator::Mncs => indicators::mncs(&pairs),
        }
        .expect("non-empty group")
    }
}

/// Two groups whose ordering flips when the same paper joins both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub indicator: CrownIndicator,
    pub group_a: Vec<IntPair>,
    pub group_b: Vec<IntPair>,
    pub added_paper: IntPair,
    pub before_a: f64,
    pub before_b: f64,
    pub after_a: f64,
    pub after_b: f64,
}

impl Counterexample {
    /// Values of `indicator` on a candidate instance, whether or not it flips.
    pub fn evaluate(
        indicator: CrownIndicator,
        group_a: &[IntPair],
        group_b: &[IntPair],
        added_paper: IntPair,
    ) -> Self {
        let with = |g: &[IntPair]| {
            let mut g = g.to_vec();
            g.push(added_paper);
            g
        };
        Counterexample {
            indicator,
            group_a: group_a.to_vec(),
            group_b: group_b.to_vec(),
            added_paper,
            before_a: indicator.value(group_a),
            before_b: indicator.value(group_b),
            after_a: indicator.value(&with(group_a)),
            after_b: indicator.value(&with(group_b)),
        }
    }

    /// Strict reversal: `A > B` before, `A' < B'` after (exact arithmetic).
    pub fn is_flip(&self) -> bool {
        is_flip(self.indicator, &self.group_a, &self.group_b, self.added_paper)
    }
}

/// A=[(1,1)], B=[(9,10)], x=(0,10).
pub fn shipped_counterexample() -> Counterexample {
    Counterexample::evaluate(CrownIndicator::CppFcsm, &[(1, 1)], &[(9, 10)], (0, 10))
}

fn is_flip(indicator: CrownIndicator, a: &[IntPair], b: &[IntPair], x: IntPair) -> bool {
    if indicator.exact(a) <= indicator.exact(b) {
        return false;
    }
    let mut a2 = a.to_vec();
    a2.push(x);
    let mut b2 = b.to_vec();
    b2.push(x);
    indicator.exact(&a2) < indicator.exact(&b2)
}

/// Exhaustive search limits: group sizes `1..=max_group_size`, integer
/// `c` in `0..=max_value`, `e` in `1..=max_value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_group_size: usize,
    pub max_value: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_group_size: 2,
            max_value: 4,
        }
    }
}

/// Every multiset of `size` pairs drawn from `domain`, as non-decreasing
/// index sequences in lexicographic order.
fn multisets(domain: &[IntPair], size: usize) -> Vec<Vec<IntPair>> {
    fn rec(
        domain: &[IntPair],
        size: usize,
        start: usize,
        cur: &mut Vec<IntPair>,
        out: &mut Vec<Vec<IntPair>>,
    ) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..domain.len() {
            cur.push(domain[i]);
            rec(domain, size, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(domain, size, 0, &mut Vec::with_capacity(size), &mut out);
    out
}

/// Searches equal-size group pairs for an order reversal under `indicator`.
///
/// With `P = (v + 1) v` distinct pairs for `v = max_value`, size `s` has
/// `C(P + s - 1, s)` groups and the search visits up to that squared times
/// `P` instances. Instances are visited in lexicographic order (size, A, B,
/// x), so the first flip found is deterministic.
pub fn consistency_counterexample(
    indicator: CrownIndicator,
    bounds: SearchBounds,
) -> Option<Counterexample> {
    let domain: Vec<IntPair> = (0..=bounds.max_value)
        .flat_map(|c| (1..=bounds.max_value).map(move |e| (c, e)))
        .collect();
    for size in 1..=bounds.max_group_size {
        let groups = multisets(&domain, size);
        let values: Vec<Ratio<i64>> = groups.iter().map(|g| indicator.exact(g)).collect();
        for (a, va) in groups.iter().zip(&values) {
            for (b, vb) in groups.iter().zip(&values) {
                if va <= vb {
                    continue;
                }
                for &x in &domain {
                    if is_flip(indicator, a, b, x) {
                        return Some(Counterexample::evaluate(indicator, a, b, x));
                    }
                }
            }
        }
    }
    None
}

/// Keeps only each journal's first (primary) category.
pub fn primary_only_scheme(journals: &[Journal]) -> Vec<Journal> {
    journals
        .iter()
        .map(|j| Journal {
            id: j.id.clone(),
            title: j.title.clone(),
            categories: vec![j.categories[0].clone()],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperSensitivity {
    pub paper_id: String,
    pub ncs_a: Option<f64>,
    pub ncs_b: Option<f64>,
    pub delta: Option<f64>,
    pub percentile_a: Option<f64>,
    pub percentile_b: Option<f64>,
    pub fractional_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDeltas {
    pub cpp_fcsm: f64,
    pub mncs: f64,
    pub mdncs: f64,
    pub pp_top1: f64,
    pub mean_fractional: Option<f64>,
}

/// Per-paper and group-level changes when the category scheme is swapped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub group: String,
    pub weighting: Weighting,
    pub papers: Vec<PaperSensitivity>,
    pub report_a: IndicatorReport,
    pub report_b: IndicatorReport,
    /// `b - a` for each group indicator.
    pub deltas: GroupDeltas,
}

impl SensitivityReport {
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        writeln!(
            out,
            "paper_id\tncs_a\tncs_b\tdelta\tpercentile_a\tpercentile_b\tfractional_delta"
        )?;
        for p in &self.papers {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                p.paper_id,
                opt(p.ncs_a),
                opt(p.ncs_b),
                opt(p.delta),
                opt(p.percentile_a),
                opt(p.percentile_b),
                opt(p.fractional_delta)
            )?;
        }
        Ok(())
    }

    pub fn max_abs_ncs_delta(&self) -> f64 {
        self.papers
            .iter()
            .filter_map(|p| p.delta)
            .fold(0.0, |m, d| m.max(d.abs()))
    }
}

fn check_scheme(corpus: &Corpus, scheme: &[Journal]) -> Result<()> {
    for paper in corpus.papers() {
        if !scheme.iter().any(|j| j.id == paper.journal_id) {
            return Err(DiagnosticsError::SchemeMissingJournal(
                paper.journal_id.clone(),
            ));
        }
    }
    Ok(())
}

/// Scores `group` under two journal-to-category schemes for the same papers.
pub fn indexer_sensitivity(
    corpus: &Corpus,
    group: &GroupSelection,
    scheme_a: &[Journal],
    scheme_b: &[Journal],
    weighting: Weighting,
    top_x: f64,
) -> Result<SensitivityReport> {
    check_scheme(corpus, scheme_a)?;
    check_scheme(corpus, scheme_b)?;
    let corpus_a = corpus.with_journals(scheme_a.to_vec())?;
    let corpus_b = corpus.with_journals(scheme_b.to_vec())?;
    let table_a = BaselineTable::compute(&corpus_a);
    let table_b = BaselineTable::compute(&corpus_b);

    let (report_a, scored_a) =
        indicators::evaluate_group(&corpus_a, &table_a, group, weighting, top_x)?;
    let (report_b, scored_b) =
        indicators::evaluate_group(&corpus_b, &table_b, group, weighting, top_x)?;

    let mut papers = Vec::with_capacity(scored_a.len());
    for (a, b) in scored_a.iter().zip(&scored_b) {
        let fractional_delta = match (a.fractional, b.fractional) {
            (Some(fa), Some(fb)) => {
                if fa.to_bits() != fb.to_bits() {
                    return Err(DiagnosticsError::FractionalNotInvariant(a.paper_id.clone()));
                }
                Some(fb - fa)
            }
            _ => None,
        };
        papers.push(PaperSensitivity {
            paper_id: a.paper_id.clone(),
            ncs_a: a.ncs,
            ncs_b: b.ncs,
            delta: a.ncs.zip(b.ncs).map(|(x, y)| y - x),
            percentile_a: a.percentile,
            percentile_b: b.percentile,
            fractional_delta,
        });
    }

    let deltas = GroupDeltas {
        cpp_fcsm: report_b.cpp_fcsm - report_a.cpp_fcsm,
        mncs: report_b.mncs - report_a.mncs,
        mdncs: report_b.mdncs - report_a.mdncs,
        pp_top1: report_b.pp_top1 - report_a.pp_top1,
        mean_fractional: report_a
            .mean_fractional
            .zip(report_b.mean_fractional)
            .map(|(a, b)| b - a),
    };
    Ok(SensitivityReport {
        group: group.name.clone(),
        weighting,
        papers,
        report_a,
        report_b,
        deltas,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSumResult {
    /// Mann-Whitney U of the first sample.
    pub u: f64,
    pub z: f64,
    pub p_two_sided: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Midranks (1-based) of `values`, ties sharing the average of their ranks.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Mann-Whitney rank-sum test with tie-corrected normal approximation.
///
/// No continuity correction is applied. The approximation is adequate from
/// about 8 values per sample.
pub fn rank_sum_test(scores_a: &[f64], scores_b: &[f64]) -> Result<RankSumResult> {
    let (n_a, n_b) = (scores_a.len(), scores_b.len());
    if n_a == 0 || n_b == 0 || n_a + n_b < 3 {
        return Err(DiagnosticsError::InsufficientSample);
    }
    if scores_a.iter().chain(scores_b).any(|v| !v.is_finite()) {
        return Err(DiagnosticsError::NonFinite);
    }
    let joined: Vec<f64> = scores_a.iter().chain(scores_b).copied().collect();
    let ranks = midranks(&joined);
    let rank_sum_a: f64 = ranks[..n_a].iter().sum();
    let (na, nb) = (n_a as f64, n_b as f64);
    let n = na + nb;
    let u = rank_sum_a - na * (na + 1.0) / 2.0;

    let mut sorted = joined.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return Err(DiagnosticsError::DegenerateVariance);
    }
    let z = (u - na * nb / 2.0) / variance.sqrt();
    let p = erfc(z.abs() / std::f64::consts::SQRT_2).clamp(f64::MIN_POSITIVE, 1.0);
    Ok(RankSumResult {
        u,
        z,
        p_two_sided: p,
        n_a,
        n_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CitationWindow, Paper};

    #[test]
    fn shipped_instance_values() {
        let ce = shipped_counterexample();
        assert!(ce.is_flip());
        assert_eq!(ce.before_a, 1.0);
        assert_eq!(ce.before_b, 0.9);
        assert_eq!(ce.after_a, 1.0 / 11.0);
        assert_eq!(ce.after_b, 0.45);

        let m = Counterexample::evaluate(CrownIndicator::Mncs, &[(1, 1)], &[(9, 10)], (0, 10));
        assert!(!m.is_flip());
        assert_eq!(m.after_a, 0.5);
        assert_eq!(m.after_b, 0.45);
    }

    // Independent oracle: brute force over every equal-size pair of ordered
    // groups with plain f64 arithmetic and a margin.
    fn brute_force_flip_exists(indicator: CrownIndicator, max_size: usize, v: u64) -> bool {
        let domain: Vec<(u64, u64)> = (0..=v).flat_map(|c| (1..=v).map(move |e| (c, e))).collect();
        let value = |g: &[(u64, u64)]| -> f64 {
            match indicator {
                CrownIndicator::CppFcsm => {
                    g.iter().map(|p| p.0 as f64).sum::<f64>() / g.iter().map(|p| p.1 as f64).sum::<f64>()
                }
                CrownIndicator::Mncs => {
                    g.iter().map(|p| p.0 as f64 / p.1 as f64).sum::<f64>() / g.len() as f64
                }
            }
        };
        let mut groups: Vec<Vec<(u64, u64)>> = domain.iter().map(|&p| vec![p]).collect();
        if max_size >= 2 {
            for &p in &domain {
                for &q in &domain {
                    groups.push(vec![p, q]);
                }
            }
        }
        for a in &groups {
            for b in groups.iter().filter(|b| b.len() == a.len()) {
                if value(a) <= value(b) + 1e-12 {
                    continue;
                }
                for &x in &domain {
                    let mut a2 = a.clone();
                    a2.push(x);
                    let mut b2 = b.clone();
                    b2.push(x);
                    if value(&a2) + 1e-12 < value(&b2) {
                        return true;
                    }
                }
            }
        }
        false
    }

    #[test]
    fn search_finds_ratio_of_sums_flip_only() {
        let bounds = SearchBounds::default();
        let found = consistency_counterexample(CrownIndicator::CppFcsm, bounds).unwrap();
        assert!(found.is_flip());
        assert!(found.before_a > found.before_b);
        assert!(found.after_a < found.after_b);
        assert_eq!(found.group_a.len(), found.group_b.len());
        assert!(brute_force_flip_exists(CrownIndicator::CppFcsm, 2, 4));

        assert!(consistency_counterexample(CrownIndicator::Mncs, bounds).is_none());
        assert!(!brute_force_flip_exists(CrownIndicator::Mncs, 2, 4));
    }

    #[test]
    fn search_is_deterministic() {
        let b = SearchBounds {
            max_group_size: 1,
            max_value: 3,
        };
        let first = consistency_counterexample(CrownIndicator::CppFcsm, b).unwrap();
        assert_eq!(first, consistency_counterexample(CrownIndicator::CppFcsm, b).unwrap());
        // lexicographically smallest flip with singleton groups
        assert_eq!(first.group_a, vec![(1, 1)]);
    }

    #[test]
    fn multiset_enumeration_counts() {
        let domain: Vec<IntPair> = (0..4).map(|i| (i, 1)).collect();
        assert_eq!(multisets(&domain, 1).len(), 4);
        assert_eq!(multisets(&domain, 2).len(), 10);
        assert_eq!(multisets(&domain, 3).len(), 20);
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[1.0, 2.0, 2.0, 4.0, 5.0]), vec![1.0, 2.5, 2.5, 4.0, 5.0]);
        assert_eq!(midranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn rank_sum_examples() {
        let r = rank_sum_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.z, 0.0);
        assert_eq!(r.p_two_sided, 1.0);
        assert_eq!(r.u, 4.5);

        let r = rank_sum_test(&[1.0, 2.0, 3.0], &[10.0, 11.0, 12.0]).unwrap();
        assert_eq!(r.u, 0.0);
        assert!(r.z < 0.0);

        let r = rank_sum_test(&[1.0, 2.0], &[3.0, 4.0, 5.0]).unwrap();
        assert_eq!(r.u, 0.0);
        // z = -3 / sqrt(3)
        assert!((r.z + 3.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rank_sum_reference_value() {
        // x = 1..5, y = 6..10: U = 0, z = -12.5 / sqrt(22.9166...) = -2.6112,
        // two-sided normal p = 0.009023
        let x: Vec<f64> = (1..=5).map(f64::from).collect();
        let y: Vec<f64> = (6..=10).map(f64::from).collect();
        let r = rank_sum_test(&x, &y).unwrap();
        assert!((r.z + 2.611_164_839).abs() < 1e-8);
        assert!((r.p_two_sided - 0.009_023_438).abs() < 1e-8);

        // tied values; reference from scipy's asymptotic test without continuity correction
        let r = rank_sum_test(&[1.0, 2.0, 2.0, 3.0], &[2.0, 4.0, 5.0, 5.0, 6.0]).unwrap();
        assert_eq!(r.u, 2.0);
        assert!((r.z + 2.001_738_374_947_917_6).abs() < 1e-12);
        // erfc from statrs is accurate to ~1e-11 relative
        assert!((r.p_two_sided / 0.045_312_876_841_338_515 - 1.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn rank_sum_errors() {
        assert!(matches!(
            rank_sum_test(&[2.0, 2.0], &[2.0, 2.0]),
            Err(DiagnosticsError::DegenerateVariance)
        ));
        assert!(matches!(
            rank_sum_test(&[1.0], &[2.0]),
            Err(DiagnosticsError::InsufficientSample)
        ));
        assert!(matches!(
            rank_sum_test(&[], &[2.0, 3.0, 4.0]),
            Err(DiagnosticsError::InsufficientSample)
        ));
        assert!(matches!(
            rank_sum_test(&[f64::NAN, 1.0], &[2.0]),
            Err(DiagnosticsError::NonFinite)
        ));
    }

    proptest::proptest! {
        #[test]
        fn rank_sum_antisymmetric(
            a in proptest::collection::vec(0u32..20, 1..15),
            b in proptest::collection::vec(0u32..20, 2..15),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            match (rank_sum_test(&a, &b), rank_sum_test(&b, &a)) {
                (Ok(ab), Ok(ba)) => {
                    proptest::prop_assert_eq!(ab.z, -ba.z);
                    proptest::prop_assert_eq!(ab.p_two_sided, ba.p_two_sided);
                    proptest::prop_assert!(ab.u <= (a.len() * b.len()) as f64);
                    proptest::prop_assert_eq!(ab.u + ba.u, (a.len() * b.len()) as f64);
                    proptest::prop_assert!(ab.p_two_sided > 0.0 && ab.p_two_sided <= 1.0);
                }
                (Err(DiagnosticsError::DegenerateVariance), Err(DiagnosticsError::DegenerateVariance)) => {}
                other => proptest::prop_assert!(false, "asymmetric outcome {:?}", other),
            }
        }
    }

    fn cardiology_corpus() -> (Corpus, Vec<Journal>) {
        let journals = vec![
            Journal {
                id: "jvr".into(),
                title: "Journal of Vascular Research".into(),
                categories: vec!["peripheral vascular disease".into(), "physiology".into()],
            },
            Journal {
                id: "circ".into(),
                title: "Circulation".into(),
                categories: vec![
                    "cardiac and cardiovascular systems".into(),
                    "hematology".into(),
                    "peripheral vascular diseases".into(),
                ],
            },
            Journal {
                id: "ajc".into(),
                title: "American Journal of Cardiology".into(),
                categories: vec!["cardiac and cardiovascular systems".into()],
            },
            Journal {
                id: "blood".into(),
                title: "Blood".into(),
                categories: vec!["hematology".into()],
            },
        ];
        let mut papers = Vec::new();
        let mut add = |id: &str, journal: &str, year: i32, refs: Vec<String>| {
            papers.push(Paper {
                id: id.into(),
                year,
                journal_id: journal.into(),
                references: refs,
                raw_citation_count: None,
            });
        };
        let cited = [("c1", "circ"), ("c2", "circ"), ("a1", "ajc"), ("a2", "ajc"), ("b1", "blood"), ("v1", "jvr")];
        for (id, j) in cited {
            add(id, j, 2000, vec![]);
        }
        let targets = [
            vec!["c1", "a1", "b1"],
            vec!["c1", "c2"],
            vec!["a1", "a2", "b1", "ext:1"],
            vec!["b1"],
            vec!["c1", "v1"],
            vec!["a2"],
        ];
        for (k, refs) in targets.iter().enumerate() {
            add(
                &format!("q{k}"),
                ["ajc", "blood", "circ", "jvr", "ajc", "blood"][k],
                2001,
                refs.iter().map(|s| s.to_string()).collect(),
            );
        }
        let corpus = Corpus::build(papers, journals.clone(), CitationWindow::All).unwrap();
        (corpus, journals)
    }

    #[test]
    fn primary_only_changes_circulation_scores() {
        let (corpus, scheme_a) = cardiology_corpus();
        let scheme_b = primary_only_scheme(&scheme_a);
        assert_eq!(scheme_b[1].categories, ["cardiac and cardiovascular systems"]);
        let group = GroupSelection::new("circ", vec!["c1".into(), "c2".into()]);
        let rep = indexer_sensitivity(&corpus, &group, &scheme_a, &scheme_b, Weighting::Harmonic, 1.0)
            .unwrap();
        assert!(rep.papers.iter().any(|p| p.delta.unwrap() != 0.0));
        assert!(rep.papers.iter().all(|p| p.fractional_delta == Some(0.0)));
        assert_eq!(rep.deltas.mean_fractional, Some(0.0));
    }

    #[test]
    fn identical_schemes_are_a_fixed_point() {
        let (corpus, scheme) = cardiology_corpus();
        let group = GroupSelection::whole_corpus("all", &corpus);
        let rep =
            indexer_sensitivity(&corpus, &group, &scheme, &scheme, Weighting::Arithmetic, 1.0).unwrap();
        for p in &rep.papers {
            assert_eq!(p.delta.unwrap_or(0.0), 0.0);
            assert_eq!(p.percentile_a, p.percentile_b);
            assert_eq!(p.fractional_delta, Some(0.0));
        }
        assert_eq!(rep.deltas.mncs, 0.0);
        assert_eq!(rep.deltas.cpp_fcsm, 0.0);
        assert_eq!(rep.deltas.mdncs, 0.0);
        assert_eq!(rep.deltas.pp_top1, 0.0);
        let mut tsv = Vec::new();
        rep.write_tsv(&mut tsv).unwrap();
        assert!(String::from_utf8(tsv)
            .unwrap()
            .starts_with("paper_id\tncs_a\tncs_b\tdelta\tpercentile_a\tpercentile_b\tfractional_delta\n"));
    }

    #[test]
    fn scheme_missing_journal() {
        let (corpus, scheme) = cardiology_corpus();
        let partial: Vec<Journal> = scheme.into_iter().filter(|j| j.id != "blood").collect();
        let group = GroupSelection::new("g", vec!["c1".into()]);
        assert!(matches!(
            indexer_sensitivity(&corpus, &group, &partial, &partial, Weighting::Harmonic, 1.0),
            Err(DiagnosticsError::SchemeMissingJournal(j)) if j == "blood"
        ));
    }
}
