//! Per-category term ranking by scaled F-score.
//!
//! For a focal category, each term gets a one-vs-rest precision
//! `P(category | term)` and recall `P(term | category)`. Both vectors are
//! pushed through the standard normal CDF after standardization, and the
//! scaled F-score is the beta-weighted harmonic mean of the transformed
//! values. Counts come from original posts only.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ingest::TweetType;

#[derive(Debug, Error)]
pub enum SalienceError {
    #[error("no original posts with counted terms")]
    EmptyCorpus,
    #[error("unknown category `{category}`")]
    UnknownCategory { category: String },
    #[error("document lacks a {axis} label required by the grouping")]
    MissingLabel { axis: &'static str },
    #[error("beta must be a positive finite number, got {beta}")]
    BadBeta { beta: f64 },
    #[error("{docs} documents but {labels} labels")]
    LengthMismatch { docs: usize, labels: usize },
    #[error("count matrix shape is inconsistent: {0}")]
    BadShape(String),
}

/// A segmented document carrying its grouping labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorizedDoc {
    pub terms: Vec<String>,
    pub spatial: Option<String>,
    pub temporal: Option<String>,
    pub tweet_type: TweetType,
}

/// Which axis to marginalize out when labeling documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalAxis {
    /// Keep both axes: labels are `spatial/temporal`.
    None,
    /// Drop the spatial axis: labels are the temporal component.
    Spatial,
    /// Drop the temporal axis: labels are the spatial component.
    Temporal,
}

/// Computes one category label per document for the chosen grouping.
pub fn doc_labels(
    docs: &[CategorizedDoc],
    axis: MarginalAxis,
) -> Result<Vec<String>, SalienceError> {
    docs.iter()
        .map(|doc| {
            let spatial = || {
                doc.spatial
                    .as_deref()
                    .ok_or(SalienceError::MissingLabel { axis: "spatial" })
            };
            let temporal = || {
                doc.temporal
                    .as_deref()
                    .ok_or(SalienceError::MissingLabel { axis: "temporal" })
            };
            match axis {
                MarginalAxis::None => Ok(format!("{}/{}", spatial()?, temporal()?)),
                MarginalAxis::Spatial => Ok(temporal()?.to_string()),
                MarginalAxis::Temporal => Ok(spatial()?.to_string()),
            }
        })
        .collect()
}

/// How often a term must be counted in each document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    /// Every occurrence counts.
    #[default]
    Tokens,
    /// At most one count per document.
    Documents,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountOptions {
    /// Terms below this count in every category are dropped.
    pub min_count: u64,
    pub mode: CountMode,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            min_count: 5,
            mode: CountMode::Tokens,
        }
    }
}

/// Term-by-category count matrix. Category totals are the column sums
/// over the retained vocabulary; categories with no counted occurrence
/// are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermCategoryCounts {
    vocabulary: Vec<String>,
    categories: Vec<String>,
    counts: Vec<Vec<u64>>,
    category_totals: Vec<u64>,
}

impl TermCategoryCounts {
    /// Validates and wraps a raw `vocabulary × categories` matrix,
    /// dropping all-zero columns and recomputing totals.
    pub fn from_matrix(
        vocabulary: Vec<String>,
        categories: Vec<String>,
        counts: Vec<Vec<u64>>,
    ) -> Result<Self, SalienceError> {
        if counts.len() != vocabulary.len() {
            return Err(SalienceError::BadShape(format!(
                "{} rows for {} terms",
                counts.len(),
                vocabulary.len()
            )));
        }
        if counts.iter().any(|row| row.len() != categories.len()) {
            return Err(SalienceError::BadShape(format!(
                "rows must have {} columns",
                categories.len()
            )));
        }
        let mut totals = vec![0u64; categories.len()];
        for row in &counts {
            for (t, &c) in totals.iter_mut().zip(row) {
                *t += c;
            }
        }
        let keep: Vec<usize> = (0..categories.len()).filter(|&c| totals[c] > 0).collect();
        if keep.is_empty() || vocabulary.is_empty() {
            return Err(SalienceError::EmptyCorpus);
        }
        let categories: Vec<String> = keep.iter().map(|&c| categories[c].clone()).collect();
        let counts: Vec<Vec<u64>> = counts
            .iter()
            .map(|row| keep.iter().map(|&c| row[c]).collect())
            .collect();
        let category_totals: Vec<u64> = keep.iter().map(|&c| totals[c]).collect();
        Ok(TermCategoryCounts {
            vocabulary,
            categories,
            counts,
            category_totals,
        })
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn category_totals(&self) -> &[u64] {
        &self.category_totals
    }

    pub fn category_index(&self, category: &str) -> Result<usize, SalienceError> {
        self.categories
            .iter()
            .position(|c| c == category)
            .ok_or_else(|| SalienceError::UnknownCategory {
                category: category.to_string(),
            })
    }
}

/// Tallies term counts per category from original posts. Retweets are
/// skipped. Terms whose count stays below `min_count` in every category
/// are dropped, and category totals reflect the retained vocabulary.
pub fn build_counts(
    docs: &[CategorizedDoc],
    labels: &[String],
    options: CountOptions,
) -> Result<TermCategoryCounts, SalienceError> {
    if docs.len() != labels.len() {
        return Err(SalienceError::LengthMismatch {
            docs: docs.len(),
            labels: labels.len(),
        });
    }
    let mut tally: BTreeMap<&str, BTreeMap<&str, u64>> = BTreeMap::new();
    let mut originals = 0usize;
    for (doc, label) in docs.iter().zip(labels) {
        if doc.tweet_type == TweetType::Retweet {
            continue;
        }
        originals += 1;
        match options.mode {
            CountMode::Tokens => {
                for term in &doc.terms {
                    *tally
                        .entry(term.as_str())
                        .or_default()
                        .entry(label.as_str())
                        .or_insert(0) += 1;
                }
            }
            CountMode::Documents => {
                let distinct: BTreeSet<&str> = doc.terms.iter().map(String::as_str).collect();
                for term in distinct {
                    *tally
                        .entry(term)
                        .or_default()
                        .entry(label.as_str())
                        .or_insert(0) += 1;
                }
            }
        }
    }
    if originals == 0 {
        return Err(SalienceError::EmptyCorpus);
    }

    tally.retain(|_, per_category| per_category.values().any(|&c| c >= options.min_count));
    if tally.is_empty() {
        return Err(SalienceError::EmptyCorpus);
    }

    let categories: BTreeSet<&str> = tally
        .values()
        .flat_map(|per_category| per_category.keys().copied())
        .collect();
    let categories: Vec<String> = categories.into_iter().map(str::to_string).collect();
    let vocabulary: Vec<String> = tally.keys().map(|t| t.to_string()).collect();
    let counts: Vec<Vec<u64>> = tally
        .values()
        .map(|per_category| {
            categories
                .iter()
                .map(|c| per_category.get(c.as_str()).copied().unwrap_or(0))
                .collect()
        })
        .collect();
    TermCategoryCounts::from_matrix(vocabulary, categories, counts)
}

/// One-vs-rest precision and recall per vocabulary term, in vocabulary
/// order. Precision is the share of the term's occurrences that fall in
/// the focal category; recall is the term's share of the focal
/// category's occurrences.
pub fn precision_recall(
    counts: &TermCategoryCounts,
    focal: &str,
) -> Result<Vec<(f64, f64)>, SalienceError> {
    let focal_idx = counts.category_index(focal)?;
    let focal_total = counts.category_totals[focal_idx] as f64;
    Ok(counts
        .counts
        .iter()
        .map(|row| {
            let in_focal = row[focal_idx] as f64;
            let everywhere: u64 = row.iter().sum();
            let precision = if everywhere == 0 {
                0.0
            } else {
                in_focal / everywhere as f64
            };
            (precision, in_focal / focal_total)
        })
        .collect())
}

// Rational minimax approximations for erfc over three ranges (Cody's
// segmentation: |x| <= 0.46875, <= 4, beyond). Good to about one ulp,
// which the score-equivalence tolerances downstream rely on. The
// coefficients keep their published digits verbatim.
#[allow(clippy::excessive_precision)]
const ERF_A: [f64; 5] = [
    3.161_123_743_870_565_6e0,
    1.138_641_541_510_501_56e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_47e3,
    1.857_777_061_846_031_53e-1,
];
#[allow(clippy::excessive_precision)]
const ERF_B: [f64; 4] = [
    2.360_129_095_234_412_09e1,
    2.440_246_379_344_441_73e2,
    1.282_616_526_077_372_28e3,
    2.844_236_833_439_170_62e3,
];
#[allow(clippy::excessive_precision)]
const ERFC_C: [f64; 9] = [
    5.641_884_969_886_700_9e-1,
    8.883_149_794_388_375_94e0,
    6.611_919_063_714_162_95e1,
    2.986_351_381_974_001_31e2,
    8.819_522_212_417_690_9e2,
    1.712_047_612_634_070_58e3,
    2.051_078_377_826_071_47e3,
    1.230_339_354_797_997_25e3,
    2.153_115_354_744_038_46e-8,
];
#[allow(clippy::excessive_precision)]
const ERFC_D: [f64; 8] = [
    1.574_492_611_070_983_47e1,
    1.176_939_508_913_124_99e2,
    5.371_811_018_620_098_58e2,
    1.621_389_574_566_690_19e3,
    3.290_799_235_733_459_63e3,
    4.362_619_090_143_247_16e3,
    3.439_367_674_143_721_64e3,
    1.230_339_354_803_749_42e3,
];
#[allow(clippy::excessive_precision)]
const ERFC_P: [f64; 6] = [
    3.053_266_349_612_323_44e-1,
    3.603_448_999_498_044_39e-1,
    1.257_817_261_112_292_46e-1,
    1.608_378_514_874_227_66e-2,
    6.587_491_615_298_378_03e-4,
    1.631_538_713_730_209_78e-2,
];
#[allow(clippy::excessive_precision)]
const ERFC_Q: [f64; 5] = [
    2.568_520_192_289_822_42e0,
    1.872_952_849_923_460_47e0,
    5.279_051_029_514_284_12e-1,
    6.051_834_131_244_131_91e-2,
    2.335_204_976_268_691_85e-3,
];
#[allow(clippy::excessive_precision)]
const TWO_OVER_SQRT_PI: f64 = 5.641_895_835_477_562_9e-1;

/// Splits `exp(-y*y)` so the squared argument keeps full precision:
/// y is rounded to 1/16ths and the cross term handled separately.
fn erfc_scale(y: f64, result: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * result
}

fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        let ysq = y * y;
        let mut num = ERF_A[4] * ysq;
        let mut den = ysq;
        for i in 0..3 {
            num = (num + ERF_A[i]) * ysq;
            den = (den + ERF_B[i]) * ysq;
        }
        return 1.0 - x * (num + ERF_A[3]) / (den + ERF_B[3]);
    }
    let result = if y <= 4.0 {
        let mut num = ERFC_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERFC_C[i]) * y;
            den = (den + ERFC_D[i]) * y;
        }
        erfc_scale(y, (num + ERFC_C[7]) / (den + ERFC_D[7]))
    } else if y >= 26.543 {
        // erfc underflows; only the sign side matters.
        0.0
    } else {
        let ysq = 1.0 / (y * y);
        let mut num = ERFC_P[5] * ysq;
        let mut den = ysq;
        for i in 0..4 {
            num = (num + ERFC_P[i]) * ysq;
            den = (den + ERFC_Q[i]) * ysq;
        }
        let tail = ysq * (num + ERFC_P[4]) / (den + ERFC_Q[4]);
        erfc_scale(y, (TWO_OVER_SQRT_PI - tail) / y)
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

fn standard_normal_cdf(z: f64) -> f64 {
    let phi = 0.5 * erfc(-z / std::f64::consts::SQRT_2);
    // Keep the open-interval invariant even for extreme z.
    phi.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON)
}

/// Standardizes the scores with the sample standard deviation and maps
/// them through the standard normal CDF. Zero-variance input (including
/// a single score) maps everything to 0.5.
pub fn normal_cdf_transform(scores: &[f64]) -> Vec<f64> {
    let n = scores.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = scores.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return vec![0.5];
    }
    let variance = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64;
    let sd = variance.sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return vec![0.5; n];
    }
    scores
        .iter()
        .map(|s| standard_normal_cdf((s - mean) / sd))
        .collect()
}

/// One ranked term.
#[derive(Debug, Clone, PartialEq)]
pub struct SalienceEntry {
    pub term: String,
    pub precision: f64,
    pub recall: f64,
    pub precision_cdf: f64,
    pub recall_cdf: f64,
    pub sfs: f64,
}

/// Ranks every vocabulary term for the focal category by scaled F-score,
/// descending, ties broken by term order.
pub fn scaled_f_score(
    counts: &TermCategoryCounts,
    focal: &str,
    beta: f64,
) -> Result<Vec<SalienceEntry>, SalienceError> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(SalienceError::BadBeta { beta });
    }
    let pr = precision_recall(counts, focal)?;
    let precisions: Vec<f64> = pr.iter().map(|&(p, _)| p).collect();
    let recalls: Vec<f64> = pr.iter().map(|&(_, r)| r).collect();
    let p_cdf = normal_cdf_transform(&precisions);
    let r_cdf = normal_cdf_transform(&recalls);

    let beta2 = beta * beta;
    let mut entries: Vec<SalienceEntry> = counts
        .vocabulary
        .iter()
        .enumerate()
        .map(|(i, term)| SalienceEntry {
            term: term.clone(),
            precision: precisions[i],
            recall: recalls[i],
            precision_cdf: p_cdf[i],
            recall_cdf: r_cdf[i],
            sfs: (1.0 + beta2) * p_cdf[i] * r_cdf[i] / (beta2 * p_cdf[i] + r_cdf[i]),
        })
        .collect();
    entries.sort_by(|a, b| {
        b.sfs
            .partial_cmp(&a.sfs)
            .expect("scores are finite")
            .then_with(|| a.term.cmp(&b.term))
    });
    Ok(entries)
}

/// The top `k` terms of a ranking.
pub fn top_terms(entries: &[SalienceEntry], k: usize) -> Vec<String> {
    entries.iter().take(k).map(|e| e.term.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn doc(terms: &[&str], spatial: &str, temporal: &str, tweet_type: TweetType) -> CategorizedDoc {
        CategorizedDoc {
            terms: terms.iter().map(|t| t.to_string()).collect(),
            spatial: Some(spatial.into()),
            temporal: Some(temporal.into()),
            tweet_type,
        }
    }

    fn matrix(vocab: &[&str], cats: &[&str], rows: &[&[u64]]) -> TermCategoryCounts {
        TermCategoryCounts::from_matrix(
            vocab.iter().map(|s| s.to_string()).collect(),
            cats.iter().map(|s| s.to_string()).collect(),
            rows.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn doc_labels_cover_all_axes() {
        let docs = vec![doc(&["a"], "Epicentre", "Pre", TweetType::Original)];
        assert_eq!(
            doc_labels(&docs, MarginalAxis::None).unwrap(),
            ["Epicentre/Pre"]
        );
        assert_eq!(doc_labels(&docs, MarginalAxis::Spatial).unwrap(), ["Pre"]);
        assert_eq!(
            doc_labels(&docs, MarginalAxis::Temporal).unwrap(),
            ["Epicentre"]
        );
    }

    #[test]
    fn doc_labels_require_the_retained_axis() {
        let docs = vec![CategorizedDoc {
            terms: vec!["a".into()],
            spatial: None,
            temporal: Some("Pre".into()),
            tweet_type: TweetType::Original,
        }];
        assert!(doc_labels(&docs, MarginalAxis::None).is_err());
        assert!(doc_labels(&docs, MarginalAxis::Temporal).is_err());
        assert!(doc_labels(&docs, MarginalAxis::Spatial).is_ok());
    }

    #[test]
    fn build_counts_skips_retweets_and_applies_min_count() {
        let docs = vec![
            doc(&["a", "a", "b"], "X", "t", TweetType::Original),
            doc(&["a", "b"], "Y", "t", TweetType::Original),
            doc(&["c", "c", "c"], "X", "t", TweetType::Retweet),
        ];
        let labels = doc_labels(&docs, MarginalAxis::Temporal).unwrap();
        let counts = build_counts(
            &docs,
            &labels,
            CountOptions {
                min_count: 2,
                mode: CountMode::Tokens,
            },
        )
        .unwrap();
        // "b" never reaches 2 in one category; "c" only occurs retweeted.
        assert_eq!(counts.vocabulary(), ["a"]);
        assert_eq!(counts.categories(), ["X", "Y"]);
        assert_eq!(counts.counts(), [[2, 1]]);
        assert_eq!(counts.category_totals(), [2, 1]);
    }

    #[test]
    fn document_mode_counts_each_doc_once() {
        let docs = vec![
            doc(&["a", "a", "a"], "X", "t", TweetType::Original),
            doc(&["a"], "X", "t", TweetType::Original),
        ];
        let labels = doc_labels(&docs, MarginalAxis::Temporal).unwrap();
        let counts = build_counts(
            &docs,
            &labels,
            CountOptions {
                min_count: 1,
                mode: CountMode::Documents,
            },
        )
        .unwrap();
        assert_eq!(counts.counts(), [[2]]);
    }

    #[test]
    fn all_retweets_is_an_empty_corpus() {
        let docs = vec![doc(&["a"], "X", "t", TweetType::Retweet)];
        let labels = doc_labels(&docs, MarginalAxis::Temporal).unwrap();
        assert!(matches!(
            build_counts(&docs, &labels, CountOptions::default()),
            Err(SalienceError::EmptyCorpus)
        ));
    }

    #[test]
    fn precision_recall_matches_hand_computation() {
        // Term "t": 3 occurrences in the focal category, 1 elsewhere;
        // focal column sums to 10.
        let counts = matrix(&["t", "u"], &["focal", "rest"], &[&[3, 1], &[7, 5]]);
        let pr = precision_recall(&counts, "focal").unwrap();
        assert_eq!(pr[0], (0.75, 0.3));
        assert_eq!(pr[1], (7.0 / 12.0, 0.7));
    }

    #[test]
    fn unknown_category_is_rejected() {
        let counts = matrix(&["t"], &["a"], &[&[1]]);
        assert!(matches!(
            precision_recall(&counts, "b"),
            Err(SalienceError::UnknownCategory { .. })
        ));
    }

    #[test]
    fn erfc_matches_published_double_precision_values() {
        let cases = [
            (0.0, 1.0),
            (0.25, 0.723_673_609_831_763_1),
            (0.5, 0.479_500_122_186_953_5),
            (1.0, 0.157_299_207_050_285_13),
            (2.0, 0.004_677_734_981_047_265),
            (5.0, 1.537_459_794_428_035_1e-12),
            (-1.0, 1.842_700_792_949_715),
            (-3.0, 1.999_977_909_503_001_5),
        ];
        for (x, want) in cases {
            let got = erfc(x);
            assert!(
                (got - want).abs() <= 4.0 * f64::EPSILON * want.abs().max(1.0),
                "erfc({x}) = {got:e}, want {want:e}"
            );
        }
        assert_eq!(erfc(30.0), 0.0);
        assert!((erfc(-30.0) - 2.0).abs() < f64::EPSILON);
    }

    #[test]
    fn cdf_transform_standardizes_with_sample_sd() {
        // [0, 1, 2]: mean 1, sample sd 1, so z = [-1, 0, 1].
        let cdf = normal_cdf_transform(&[0.0, 1.0, 2.0]);
        assert!((cdf[1] - 0.5).abs() < 1e-15);
        assert!((cdf[2] - 0.841_344_746_068_542_9).abs() < 1e-12);
        assert!((cdf[0] - (1.0 - 0.841_344_746_068_542_9)).abs() < 1e-12);
    }

    #[test]
    fn cdf_transform_of_constant_scores_is_half() {
        assert_eq!(normal_cdf_transform(&[3.0, 3.0, 3.0]), [0.5, 0.5, 0.5]);
        assert_eq!(normal_cdf_transform(&[7.0]), [0.5]);
        assert!(normal_cdf_transform(&[]).is_empty());
    }

    #[test]
    fn cdf_stays_inside_open_unit_interval() {
        let mut scores = vec![0.0; 40];
        scores.push(1e9);
        for value in normal_cdf_transform(&scores) {
            assert!(value > 0.0 && value < 1.0);
        }
    }

    #[test]
    fn sfs_ranks_exclusive_frequent_terms_first() {
        // "a" is focal-exclusive and frequent, "b" split, "c" absent
        // from focal.
        let counts = matrix(
            &["a", "b", "c"],
            &["focal", "rest"],
            &[&[8, 0], &[4, 4], &[0, 8]],
        );
        let entries = scaled_f_score(&counts, "focal", 1.0).unwrap();
        assert_eq!(entries[0].term, "a");
        assert_eq!(entries[1].term, "b");
        assert_eq!(entries[2].term, "c");
        for e in &entries {
            assert!(e.sfs > 0.0 && e.sfs < 1.0);
        }
        // The harmonic mean cannot exceed either component.
        for e in &entries {
            assert!(e.sfs <= e.precision_cdf.max(e.recall_cdf) + 1e-15);
        }
    }

    #[test]
    fn sfs_ties_break_by_term_order() {
        let counts = matrix(&["z", "y"], &["focal", "rest"], &[&[2, 2], &[2, 2]]);
        let entries = scaled_f_score(&counts, "focal", 1.0).unwrap();
        assert_eq!(entries[0].term, "y");
        assert_eq!(entries[1].term, "z");
        assert_eq!(entries[0].sfs, entries[1].sfs);
    }

    #[test]
    fn bad_beta_is_rejected() {
        let counts = matrix(&["t"], &["a", "b"], &[&[1, 1]]);
        for beta in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                scaled_f_score(&counts, "a", beta),
                Err(SalienceError::BadBeta { .. })
            ));
        }
    }

    #[test]
    fn sfs_is_invariant_under_count_scaling() {
        let base = matrix(&["a", "b", "c"], &["x", "y"], &[&[6, 1], &[2, 3], &[1, 5]]);
        let scaled = matrix(
            &["a", "b", "c"],
            &["x", "y"],
            &[&[600, 100], &[200, 300], &[100, 500]],
        );
        let lhs = scaled_f_score(&base, "x", 1.0).unwrap();
        let rhs = scaled_f_score(&scaled, "x", 1.0).unwrap();
        for (a, b) in lhs.iter().zip(&rhs) {
            // Ratios of exactly scaled integers are bit-identical.
            assert_eq!(a.precision, b.precision);
            assert_eq!(a.recall, b.recall);
            assert_eq!(a.sfs, b.sfs);
        }
    }

    #[test]
    fn top_terms_takes_a_prefix() {
        let counts = matrix(&["a", "b", "c"], &["x", "y"], &[&[6, 1], &[2, 3], &[1, 5]]);
        let entries = scaled_f_score(&counts, "x", 1.0).unwrap();
        let top = top_terms(&entries, 2);
        assert_eq!(top.len(), 2);
        assert_eq!(top[0], entries[0].term);
        assert_eq!(top_terms(&entries, 10).len(), 3);
    }

    proptest! {
        #[test]
        fn recall_sums_to_one_per_category(
            rows in proptest::collection::vec(
                proptest::collection::vec(0u64..30, 3), 2..12
            )
        ) {
            let vocab: Vec<String> = (0..rows.len()).map(|i| format!("t{i:02}")).collect();
            let cats = vec!["a".to_string(), "b".to_string(), "c".to_string()];
            prop_assume!(rows.iter().any(|r| r.iter().any(|&c| c > 0)));
            let counts = TermCategoryCounts::from_matrix(vocab, cats, rows).unwrap();
            for category in counts.categories() {
                let pr = precision_recall(&counts, category).unwrap();
                let recall_sum: f64 = pr.iter().map(|&(_, r)| r).sum();
                prop_assert!((recall_sum - 1.0).abs() <= 1e-12);
                for &(p, r) in &pr {
                    prop_assert!((0.0..=1.0).contains(&p));
                    prop_assert!((0.0..=1.0).contains(&r));
                }
            }
        }

        #[test]
        fn sfs_output_is_sorted_and_bounded(
            rows in proptest::collection::vec(
                proptest::collection::vec(0u64..20, 2), 2..10
            ),
            beta in 0.25f64..4.0
        ) {
            let vocab: Vec<String> = (0..rows.len()).map(|i| format!("t{i:02}")).collect();
            let cats = vec!["x".to_string(), "y".to_string()];
            prop_assume!(rows.iter().map(|r| r[0]).sum::<u64>() > 0);
            prop_assume!(rows.iter().map(|r| r[1]).sum::<u64>() > 0);
            let counts = TermCategoryCounts::from_matrix(vocab, cats, rows).unwrap();
            let entries = scaled_f_score(&counts, "x", beta).unwrap();
            for pair in entries.windows(2) {
                prop_assert!(pair[0].sfs >= pair[1].sfs);
            }
            for e in &entries {
                prop_assert!(e.sfs > 0.0 && e.sfs < 1.0);
            }
        }
    }
}
