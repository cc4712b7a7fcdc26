//! PMI collocation scoring, cumulative-mass cutoffs, vocabulary
//! selection, and greedy segmentation.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::TextError;

/// Unigram and n-gram (order 2 and 3) counts for one calendar month.
/// N-grams never cross document boundaries.
#[derive(Debug, Clone, Default)]
pub struct MonthCounts {
    pub month: String,
    pub unigrams: BTreeMap<String, u64>,
    pub ngrams: BTreeMap<Vec<String>, u64>,
}

/// A scored collocation candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramCandidate {
    pub tokens: Vec<String>,
    pub month: String,
    pub frequency: u64,
    pub pmi: f64,
}

/// Whether cutoffs are computed per n-gram order or over a joint pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolMode {
    #[default]
    PerOrder,
    Joint,
}

/// Tallies unigram, bigram, and trigram counts per month from tokenized
/// documents tagged with their `YYYY-MM` month.
pub fn count_ngrams<'a, I>(docs: I) -> Vec<MonthCounts>
where
    I: IntoIterator<Item = (&'a str, &'a [String])>,
{
    let mut months: BTreeMap<String, MonthCounts> = BTreeMap::new();
    for (month, tokens) in docs {
        let entry = months
            .entry(month.to_string())
            .or_insert_with(|| MonthCounts {
                month: month.to_string(),
                ..MonthCounts::default()
            });
        for token in tokens {
            *entry.unigrams.entry(token.clone()).or_insert(0) += 1;
        }
        for order in 2..=3usize {
            if tokens.len() < order {
                continue;
            }
            for window in tokens.windows(order) {
                *entry.ngrams.entry(window.to_vec()).or_insert(0) += 1;
            }
        }
    }
    months.into_values().collect()
}

/// Scores every n-gram of one month by pointwise mutual information,
/// `ln(p(gram) / prod p(token))`, with `p(gram)` relative to the month's
/// total count of that order and `p(token)` relative to the month's
/// unigram total. Candidates come back in token order.
pub fn compute_pmi(counts: &MonthCounts) -> Result<Vec<NGramCandidate>, TextError> {
    let unigram_total: u64 = counts.unigrams.values().sum();
    let mut order_totals: BTreeMap<usize, u64> = BTreeMap::new();
    for (tokens, freq) in &counts.ngrams {
        *order_totals.entry(tokens.len()).or_insert(0) += freq;
    }

    let mut candidates = Vec::with_capacity(counts.ngrams.len());
    for (tokens, &frequency) in &counts.ngrams {
        let order_total = order_totals[&tokens.len()] as f64;
        let p_gram = frequency as f64 / order_total;
        let mut p_independent = 1.0;
        for token in tokens {
            let count = counts.unigrams.get(token).copied().unwrap_or(0);
            if count == 0 || unigram_total == 0 {
                return Err(TextError::ZeroCount {
                    month: counts.month.clone(),
                    token: token.clone(),
                });
            }
            p_independent *= count as f64 / unigram_total as f64;
        }
        candidates.push(NGramCandidate {
            tokens: tokens.clone(),
            month: counts.month.clone(),
            frequency,
            pmi: (p_gram / p_independent).ln(),
        });
    }
    Ok(candidates)
}

/// Returns the score at the first rank (descending) where the cumulative
/// normalized mass reaches `mass`. With `shift_to_zero` the mass is
/// computed on `score - min(scores)`, which keeps negative scores from
/// corrupting the distribution; the returned cutoff is still in original
/// units. When every score is equal the minimum is returned, so nothing
/// is excluded.
pub fn mass_threshold_cutoff(
    scores: &[f64],
    mass: f64,
    shift_to_zero: bool,
) -> Result<f64, TextError> {
    if scores.is_empty() {
        return Err(TextError::EmptyScores);
    }
    debug_assert!(mass > 0.0 && mass <= 1.0, "mass must lie in (0, 1]");
    debug_assert!(scores.iter().all(|s| s.is_finite()));

    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("scores are finite"));
    let min = *sorted.last().expect("nonempty");
    let offset = if shift_to_zero { min } else { 0.0 };
    let total: f64 = sorted.iter().map(|s| s - offset).sum();
    if total <= 0.0 {
        return Ok(min);
    }
    let mut cumulative = 0.0;
    for &score in &sorted {
        cumulative += (score - offset) / total;
        if cumulative >= mass {
            return Ok(score);
        }
    }
    // Rounding can leave the final cumulative mass a hair under 1.0.
    Ok(min)
}

/// Admitted collocations: n-gram tokens mapped to the months that admitted
/// them. Iteration order is lexicographic in the token sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermVocabulary {
    entries: BTreeMap<Vec<String>, BTreeSet<String>>,
}

impl TermVocabulary {
    pub fn insert(&mut self, tokens: Vec<String>, month: &str) {
        self.entries
            .entry(tokens)
            .or_default()
            .insert(month.to_string());
    }

    pub fn contains(&self, tokens: &[String]) -> bool {
        self.entries.contains_key(tokens)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<String>, &BTreeSet<String>)> {
        self.entries.iter()
    }

    /// Writes `tokens<TAB>months` lines (tokens space-joined, months
    /// comma-joined) after a `# `-prefixed header comment.
    pub fn write_tsv(&self, path: &Path, header: &str) -> Result<(), TextError> {
        let display = path.display().to_string();
        let io_err = |e: std::io::Error| TextError::Io {
            path: display.clone(),
            source: e,
        };
        let mut file = File::create(path).map_err(io_err)?;
        writeln!(file, "# {header}").map_err(io_err)?;
        for (tokens, months) in &self.entries {
            let months: Vec<&str> = months.iter().map(String::as_str).collect();
            writeln!(file, "{}\t{}", tokens.join(" "), months.join(",")).map_err(io_err)?;
        }
        Ok(())
    }

    pub fn read_tsv(path: &Path) -> Result<Self, TextError> {
        let display = path.display().to_string();
        let file = File::open(path).map_err(|e| TextError::Io {
            path: display.clone(),
            source: e,
        })?;
        let mut vocab = TermVocabulary::default();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| TextError::Io {
                path: display.clone(),
                source: e,
            })?;
            if line.is_empty() || line.starts_with("# ") {
                continue;
            }
            let (tokens, months) = line.split_once('\t').ok_or_else(|| TextError::Parse {
                path: display.clone(),
                line: idx + 1,
                reason: "expected tokens<TAB>months".into(),
            })?;
            let tokens: Vec<String> = tokens.split(' ').map(str::to_string).collect();
            for month in months.split(',').filter(|m| !m.is_empty()) {
                vocab.insert(tokens.clone(), month);
            }
        }
        Ok(vocab)
    }
}

/// Admits candidates whose PMI and frequency both reach their pool's
/// cumulative-mass cutoffs (PMI shifted to zero, frequency not). Pools are
/// per month, and within a month per order or joint per [`PoolMode`].
/// Ties at a cutoff are retained.
pub fn select_vocabulary(
    candidates: &[NGramCandidate],
    pmi_mass: f64,
    freq_mass: f64,
    pool: PoolMode,
) -> Result<TermVocabulary, TextError> {
    let mut pools: BTreeMap<(String, usize), Vec<&NGramCandidate>> = BTreeMap::new();
    for candidate in candidates {
        let order = match pool {
            PoolMode::PerOrder => candidate.tokens.len(),
            PoolMode::Joint => 0,
        };
        pools
            .entry((candidate.month.clone(), order))
            .or_default()
            .push(candidate);
    }

    let mut vocab = TermVocabulary::default();
    for ((month, _), members) in &pools {
        let pmis: Vec<f64> = members.iter().map(|c| c.pmi).collect();
        let freqs: Vec<f64> = members.iter().map(|c| c.frequency as f64).collect();
        let pmi_cutoff = mass_threshold_cutoff(&pmis, pmi_mass, true)?;
        let freq_cutoff = mass_threshold_cutoff(&freqs, freq_mass, false)?;
        for candidate in members {
            if candidate.pmi >= pmi_cutoff && candidate.frequency as f64 >= freq_cutoff {
                vocab.insert(candidate.tokens.clone(), month);
            }
        }
    }
    Ok(vocab)
}

/// Greedy longest-match segmentation: at each position try the trigram,
/// then the bigram, then emit the unigram. Matched collocations join
/// their tokens with `_`, which tokenization never emits, so joined terms
/// cannot collide with single tokens.
pub fn segment_terms(tokens: &[String], vocab: &TermVocabulary) -> Vec<String> {
    let mut terms = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        if i + 3 <= tokens.len() && vocab.contains(&tokens[i..i + 3]) {
            terms.push(tokens[i..i + 3].join("_"));
            i += 3;
        } else if i + 2 <= tokens.len() && vocab.contains(&tokens[i..i + 2]) {
            terms.push(tokens[i..i + 2].join("_"));
            i += 2;
        } else {
            terms.push(tokens[i].clone());
            i += 1;
        }
    }
    terms
}
