//! Text cleaning, tokenization, collocation selection, and segmentation.
//!
//! Cleaning strips boilerplate, mentions, and URLs and rewrites aliases;
//! tokenization lowercases and splits on punctuation while keeping
//! token-initial `#` and intra-word apostrophes. Bigram and trigram
//! collocations are scored by pointwise mutual information per calendar
//! month, admitted by cumulative-mass cutoffs on PMI and frequency, and
//! applied to token streams by greedy longest-match segmentation.

mod clean;
mod ngrams;

pub use clean::{clean_text, tokenize, BoilerplatePattern, CleaningRules, PatternKind};
pub use ngrams::{
    compute_pmi, count_ngrams, mass_threshold_cutoff, segment_terms, select_vocabulary,
    NGramCandidate, PoolMode, TermVocabulary,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("cutoff over empty score list")]
    EmptyScores,
    #[error("month {month}: zero or missing unigram count for `{token}`")]
    ZeroCount { month: String, token: String },
    #[error("cleaning rules: {0}")]
    BadRules(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} line {line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
}
