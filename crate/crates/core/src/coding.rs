//! Hand-coded term categories and category ratio tables.
//!
//! A codebook maps terms to one of ten fixed categories; terms absent
//! from it are `Uncoded`. Ratio tables summarise coded term lists per
//! scope under one of two denominator conventions, keeping the exact
//! integer counts alongside the ratio so rounding stays a display
//! concern.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

/// The ten coding categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermCategory {
    Italy,
    External,
    Event,
    Solidarity,
    Spread,
    Policy,
    Person,
    News,
    Football,
    Uncoded,
}

impl TermCategory {
    pub const ALL: [TermCategory; 10] = [
        TermCategory::Italy,
        TermCategory::External,
        TermCategory::Event,
        TermCategory::Solidarity,
        TermCategory::Spread,
        TermCategory::Policy,
        TermCategory::Person,
        TermCategory::News,
        TermCategory::Football,
        TermCategory::Uncoded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TermCategory::Italy => "Italy",
            TermCategory::External => "External",
            TermCategory::Event => "Event",
            TermCategory::Solidarity => "Solidarity",
            TermCategory::Spread => "Spread",
            TermCategory::Policy => "Policy",
            TermCategory::Person => "Person",
            TermCategory::News => "News",
            TermCategory::Football => "Football",
            TermCategory::Uncoded => "Uncoded",
        }
    }
}

impl std::fmt::Display for TermCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TermCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TermCategory::ALL
            .iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| format!("unknown term category `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum CodingError {
    #[error("{path} line {line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scope `{scope}`: {reason}")]
    EmptyInput { scope: String, reason: String },
}

/// Term-to-category dictionary. Lookup folds terms to lowercase.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Codebook {
    map: BTreeMap<String, TermCategory>,
}

impl Codebook {
    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (String, TermCategory)>,
    {
        Codebook {
            map: entries
                .into_iter()
                .map(|(term, category)| (term.to_lowercase(), category))
                .collect(),
        }
    }

    /// Reads `term<TAB>category` lines; `# `-prefixed lines are comments.
    /// A term listed twice with different categories is an error.
    pub fn load(path: &Path) -> Result<Self, CodingError> {
        let display = path.display().to_string();
        let file = File::open(path).map_err(|e| CodingError::Io {
            path: display.clone(),
            source: e,
        })?;
        let mut map = BTreeMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| CodingError::Io {
                path: display.clone(),
                source: e,
            })?;
            if line.trim().is_empty() || line.starts_with("# ") {
                continue;
            }
            let (term, category) = line.split_once('\t').ok_or_else(|| CodingError::Parse {
                path: display.clone(),
                line: idx + 1,
                reason: "expected term<TAB>category".into(),
            })?;
            let category: TermCategory =
                category
                    .trim()
                    .parse()
                    .map_err(|reason| CodingError::Parse {
                        path: display.clone(),
                        line: idx + 1,
                        reason,
                    })?;
            let term = term.trim().to_lowercase();
            if let Some(existing) = map.insert(term.clone(), category) {
                if existing != category {
                    return Err(CodingError::Parse {
                        path: display,
                        line: idx + 1,
                        reason: format!("`{term}` coded both {existing} and {category}"),
                    });
                }
            }
        }
        Ok(Codebook { map })
    }

    /// Category of a term; terms not in the codebook are `Uncoded`.
    /// Segmented collocations (`zona_rossa`) also match their
    /// space-joined codebook form.
    pub fn category_of(&self, term: &str) -> TermCategory {
        let folded = term.to_lowercase();
        if let Some(category) = self.map.get(&folded) {
            return *category;
        }
        self.map
            .get(&folded.replace('_', " "))
            .copied()
            .unwrap_or(TermCategory::Uncoded)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Codes every term of a ranked list, preserving order.
pub fn apply_codebook(terms: &[String], codebook: &Codebook) -> Vec<(String, TermCategory)> {
    terms
        .iter()
        .map(|t| (t.clone(), codebook.category_of(t)))
        .collect()
}

/// What the ratio denominator counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorConvention {
    /// Ratios are `count / total terms`; uncoded terms dilute the shares
    /// but get no row of their own.
    IncludeUncoded,
    /// Ratios are `count / coded terms`; uncoded terms are ignored
    /// entirely.
    ExcludeUncoded,
}

/// One category's share within a scope.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioEntry {
    pub category: TermCategory,
    pub count: usize,
    pub ratio: f64,
}

/// Category shares for one scope. `entries` holds the non-`Uncoded`
/// categories with nonzero count, ratio descending, ties by category
/// name.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioTable {
    pub scope: String,
    pub convention: DenominatorConvention,
    pub total_terms: usize,
    pub uncoded: usize,
    pub denominator: usize,
    pub entries: Vec<RatioEntry>,
}

/// Pools the coded lists of one scope and computes category ratios under
/// the given convention.
pub fn category_ratios(
    scope: &str,
    lists: &[&[(String, TermCategory)]],
    convention: DenominatorConvention,
) -> Result<RatioTable, CodingError> {
    let total_terms: usize = lists.iter().map(|l| l.len()).sum();
    if total_terms == 0 {
        return Err(CodingError::EmptyInput {
            scope: scope.to_string(),
            reason: "no coded terms".into(),
        });
    }
    let mut counts: BTreeMap<TermCategory, usize> = BTreeMap::new();
    for list in lists {
        for (_, category) in *list {
            *counts.entry(*category).or_insert(0) += 1;
        }
    }
    let uncoded = counts.remove(&TermCategory::Uncoded).unwrap_or(0);
    let denominator = match convention {
        DenominatorConvention::IncludeUncoded => total_terms,
        DenominatorConvention::ExcludeUncoded => total_terms - uncoded,
    };
    if denominator == 0 {
        return Err(CodingError::EmptyInput {
            scope: scope.to_string(),
            reason: "every term is uncoded".into(),
        });
    }
    let mut entries: Vec<RatioEntry> = counts
        .into_iter()
        .map(|(category, count)| RatioEntry {
            category,
            count,
            ratio: count as f64 / denominator as f64,
        })
        .collect();
    entries.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| a.category.as_str().cmp(b.category.as_str()))
    });
    Ok(RatioTable {
        scope: scope.to_string(),
        convention,
        total_terms,
        uncoded,
        denominator,
        entries,
    })
}

/// Rounds to two decimals, halves away from zero on the hundredths
/// scale.
pub fn round_half_up_2(x: f64) -> f64 {
    ((x * 100.0) + 0.5).floor() / 100.0
}

/// Two-decimal display form of a ratio.
pub fn format_ratio(x: f64) -> String {
    format!("{:.2}", round_half_up_2(x))
}
