//! Run configuration: a TOML file naming inputs, resource files, and
//! stage parameters.
//!
//! Loading parses the file, applies overrides, computes the config hash
//! (SHA-256 of the canonical re-serialization, with paths as written),
//! resolves relative paths against the config file's directory, and
//! eagerly loads and validates every referenced resource.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coding::{Codebook, CodingError, DenominatorConvention};
use crate::geonorm::{GeoError, RegionHierarchy};
use crate::ingest::FieldMap;
use crate::salience::CountMode;
use crate::temporal::{PeriodConfig, TemporalError};
use crate::textproc::{CleaningRules, PoolMode, TextError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Parse { path: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Temporal(#[from] TemporalError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputConfig {
    /// Files or `*` patterns (wildcards in the final component only).
    pub paths: Vec<String>,
    /// Keep only records whose language field takes one of these values.
    #[serde(default)]
    pub languages: Option<Vec<String>>,
    #[serde(default)]
    pub fields: FieldMap,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResourceConfig {
    pub cleaning_rules: PathBuf,
    pub gazetteer: PathBuf,
    pub fine_to_supra: PathBuf,
    pub codebook: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct NgramConfig {
    pub pmi_mass: f64,
    pub freq_mass: f64,
    pub pool: PoolMode,
}

impl Default for NgramConfig {
    fn default() -> Self {
        NgramConfig {
            pmi_mass: 0.75,
            freq_mass: 0.15,
            pool: PoolMode::PerOrder,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SalienceConfig {
    pub min_count: u64,
    pub beta: f64,
    pub count_mode: CountMode,
    /// Terms shown per summary-table cell.
    pub top_k: usize,
}

impl Default for SalienceConfig {
    fn default() -> Self {
        SalienceConfig {
            min_count: 5,
            beta: 1.0,
            count_mode: CountMode::Tokens,
            top_k: 10,
        }
    }
}

/// Which per-group series feeds the clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterInput {
    #[default]
    Normalized,
    Residual,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusterConfig {
    pub k_min: usize,
    pub k_max: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub input: ClusterInput,
    /// Trailing rolling-mean window applied to the clustering input.
    pub smoothing_window: usize,
    /// Display names per canonical cluster label; labels beyond the list
    /// fall back to `cluster<label>`.
    pub cluster_names: Vec<String>,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            k_min: 2,
            k_max: 8,
            seed: 42,
            restarts: 20,
            max_iter: 300,
            tol: 1e-6,
            input: ClusterInput::Normalized,
            smoothing_window: 1,
            cluster_names: Vec::new(),
        }
    }
}

impl ClusterConfig {
    pub fn name_for(&self, label: usize) -> String {
        self.cluster_names
            .get(label)
            .cloned()
            .unwrap_or_else(|| format!("cluster{label}"))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CodingConfig {
    /// Convention for per-period ratio rows.
    pub row_convention: DenominatorConvention,
    /// Convention for per-cluster ratio columns.
    pub column_convention: DenominatorConvention,
}

impl Default for CodingConfig {
    fn default() -> Self {
        CodingConfig {
            row_convention: DenominatorConvention::IncludeUncoded,
            column_convention: DenominatorConvention::ExcludeUncoded,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    #[serde(default)]
    pub emit_plotdata: bool,
    pub input: InputConfig,
    pub resources: ResourceConfig,
    #[serde(default)]
    pub periods: PeriodConfig,
    #[serde(default)]
    pub ngram: NgramConfig,
    #[serde(default)]
    pub salience: SalienceConfig,
    #[serde(default)]
    pub clustering: ClusterConfig,
    #[serde(default)]
    pub coding: CodingConfig,
}

/// A parsed, validated configuration with its resources loaded and its
/// hash fixed.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: PipelineConfig,
    pub rules: CleaningRules,
    pub hierarchy: RegionHierarchy,
    pub codebook: Codebook,
    pub config_hash: String,
}

impl LoadedConfig {
    /// Header line content stamped into every artifact.
    pub fn header(&self) -> String {
        format!(
            "config={} seed={}",
            self.config_hash, self.config.clustering.seed
        )
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            reason: e.to_string(),
        })
    }

    /// SHA-256 over the canonical TOML re-serialization, so semantically
    /// identical files (comments, ordering) hash alike and any effective
    /// change, including overrides, changes the hash.
    pub fn canonical_hash(&self) -> Result<String, ConfigError> {
        let canonical = toml::to_string(self)
            .map_err(|e| ConfigError::Invalid(format!("unserializable config: {e}")))?;
        let digest = Sha256::digest(canonical.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |reason: String| Err(ConfigError::Invalid(reason));
        if self.input.paths.is_empty() {
            return bad("input.paths is empty".into());
        }
        for (name, mass) in [
            ("ngram.pmi_mass", self.ngram.pmi_mass),
            ("ngram.freq_mass", self.ngram.freq_mass),
        ] {
            if !(mass > 0.0 && mass <= 1.0) {
                return bad(format!("{name} must lie in (0, 1], got {mass}"));
            }
        }
        if !(self.salience.beta.is_finite() && self.salience.beta > 0.0) {
            return bad(format!(
                "salience.beta must be positive, got {}",
                self.salience.beta
            ));
        }
        if self.salience.top_k == 0 {
            return bad("salience.top_k must be at least 1".into());
        }
        let c = &self.clustering;
        if c.k_min < 2 || c.k_min > c.k_max {
            return bad(format!(
                "clustering k range [{}, {}] is invalid",
                c.k_min, c.k_max
            ));
        }
        if c.restarts == 0 || c.max_iter == 0 {
            return bad("clustering restarts and max_iter must be at least 1".into());
        }
        if !(c.tol.is_finite() && c.tol >= 0.0) {
            return bad(format!(
                "clustering.tol must be non-negative, got {}",
                c.tol
            ));
        }
        let mut names = c.cluster_names.clone();
        names.sort();
        names.dedup();
        if names.len() != c.cluster_names.len() {
            return bad("clustering.cluster_names contains duplicates".into());
        }
        self.periods.validate()?;
        Ok(())
    }

    fn resolve_paths(&mut self, base: &Path) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(p.as_path());
            }
        };
        resolve(&mut self.output_dir);
        resolve(&mut self.resources.cleaning_rules);
        resolve(&mut self.resources.gazetteer);
        resolve(&mut self.resources.fine_to_supra);
        resolve(&mut self.resources.codebook);
        for input in &mut self.input.paths {
            if Path::new(input).is_relative() {
                *input = base.join(input.as_str()).display().to_string();
            }
        }
    }

    /// Expands the input entries. A `*` in the final path component
    /// matches within one directory; other components are literal.
    /// Every entry must match at least one file.
    pub fn expand_inputs(&self) -> Result<Vec<PathBuf>, ConfigError> {
        let mut out = Vec::new();
        for entry in &self.input.paths {
            let path = Path::new(entry);
            let name = path
                .file_name()
                .and_then(|n| n.to_str())
                .ok_or_else(|| ConfigError::Invalid(format!("bad input path `{entry}`")))?;
            if !name.contains('*') {
                out.push(path.to_path_buf());
                continue;
            }
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let mut matches: Vec<PathBuf> = std::fs::read_dir(&dir)
                .map_err(|e| ConfigError::Io {
                    path: dir.display().to_string(),
                    source: e,
                })?
                .filter_map(|e| e.ok())
                .filter(|e| {
                    e.file_name()
                        .to_str()
                        .is_some_and(|n| wildcard_match(n, name))
                })
                .map(|e| e.path())
                .collect();
            if matches.is_empty() {
                return Err(ConfigError::Invalid(format!(
                    "input pattern `{entry}` matched no files"
                )));
            }
            matches.sort();
            out.extend(matches);
        }
        out.dedup();
        Ok(out)
    }
}

/// Matches `*`-wildcards against a file name (no directory separators).
fn wildcard_match(name: &str, pattern: &str) -> bool {
    let pieces: Vec<&str> = pattern.split('*').collect();
    if pieces.len() == 1 {
        return name == pattern;
    }
    let first = pieces[0];
    let last = pieces[pieces.len() - 1];
    let Some(mut rest) = name.strip_prefix(first) else {
        return false;
    };
    for piece in &pieces[1..pieces.len() - 1] {
        if piece.is_empty() {
            continue;
        }
        match rest.find(piece) {
            Some(i) => rest = &rest[i + piece.len()..],
            None => return false,
        }
    }
    rest.ends_with(last)
}

/// Loads a configuration file, applying the optional seed and output
/// directory overrides before hashing.
pub fn load_config(
    path: &Path,
    seed_override: Option<u64>,
    output_override: Option<PathBuf>,
) -> Result<LoadedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut config = PipelineConfig::from_toml_str(&text, &path.display().to_string())?;
    if let Some(seed) = seed_override {
        config.clustering.seed = seed;
    }
    if let Some(out) = output_override {
        config.output_dir = out;
    }
    config.validate()?;
    let config_hash = config.canonical_hash()?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    config.resolve_paths(base);

    let rules = CleaningRules::load(&config.resources.cleaning_rules)?;
    let hierarchy =
        RegionHierarchy::load(&config.resources.gazetteer, &config.resources.fine_to_supra)?;
    let codebook = Codebook::load(&config.resources.codebook)?;
    Ok(LoadedConfig {
        config,
        rules,
        hierarchy,
        codebook,
        config_hash,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
output_dir = "out"

[input]
paths = ["records.jsonl"]

[resources]
cleaning_rules = "cleaning_rules.toml"
gazetteer = "gazetteer.tsv"
fine_to_supra = "fine_to_supra.tsv"
codebook = "codebook.tsv"
"#;

    #[test]
    fn minimal_config_gets_documented_defaults() {
        let config = PipelineConfig::from_toml_str(MINIMAL, "test").unwrap();
        config.validate().unwrap();
        assert_eq!(config.ngram.pmi_mass, 0.75);
        assert_eq!(config.ngram.freq_mass, 0.15);
        assert_eq!(config.salience.min_count, 5);
        assert_eq!(config.salience.beta, 1.0);
        assert_eq!(config.salience.top_k, 10);
        assert_eq!(config.clustering.k_min, 2);
        assert_eq!(config.clustering.k_max, 8);
        assert_eq!(config.clustering.seed, 42);
        assert_eq!(config.clustering.restarts, 20);
        assert_eq!(config.clustering.max_iter, 300);
        assert_eq!(config.clustering.tol, 1e-6);
        assert_eq!(config.clustering.smoothing_window, 1);
        assert!(!config.emit_plotdata);
        assert_eq!(config.periods.periods.len(), 6);
        assert_eq!(
            config.coding.row_convention,
            DenominatorConvention::IncludeUncoded
        );
        assert_eq!(
            config.coding.column_convention,
            DenominatorConvention::ExcludeUncoded
        );
    }

    #[test]
    fn hash_is_stable_and_sensitive_to_overrides() {
        let a = PipelineConfig::from_toml_str(MINIMAL, "test").unwrap();
        let b = PipelineConfig::from_toml_str(MINIMAL, "test").unwrap();
        assert_eq!(a.canonical_hash().unwrap(), b.canonical_hash().unwrap());

        let mut c = PipelineConfig::from_toml_str(MINIMAL, "test").unwrap();
        c.clustering.seed = 43;
        assert_ne!(a.canonical_hash().unwrap(), c.canonical_hash().unwrap());
    }

    #[test]
    fn comments_do_not_change_the_hash() {
        let commented = format!("# a comment\n{MINIMAL}");
        let a = PipelineConfig::from_toml_str(MINIMAL, "test").unwrap();
        let b = PipelineConfig::from_toml_str(&commented, "test").unwrap();
        assert_eq!(a.canonical_hash().unwrap(), b.canonical_hash().unwrap());
    }

    type Tweak = Box<dyn Fn(&mut PipelineConfig)>;

    #[test]
    fn bad_parameters_are_rejected() {
        let cases: Vec<Tweak> = vec![
            Box::new(|c| c.ngram.pmi_mass = 0.0),
            Box::new(|c| c.ngram.freq_mass = 1.5),
            Box::new(|c| c.salience.beta = -1.0),
            Box::new(|c| c.salience.top_k = 0),
            Box::new(|c| c.clustering.k_min = 1),
            Box::new(|c| c.clustering.k_max = 1),
            Box::new(|c| c.clustering.restarts = 0),
            Box::new(|c| c.clustering.tol = f64::NAN),
            Box::new(|c| c.input.paths.clear()),
            Box::new(|c| {
                c.clustering.cluster_names = vec!["a".into(), "a".into()];
            }),
            Box::new(|c| c.periods.periods.clear()),
        ];
        for mutate in cases {
            let mut config = PipelineConfig::from_toml_str(MINIMAL, "test").unwrap();
            mutate(&mut config);
            assert!(config.validate().is_err());
        }
    }

    #[test]
    fn cluster_names_fall_back_to_labels() {
        let mut config = PipelineConfig::from_toml_str(MINIMAL, "test").unwrap();
        config.clustering.cluster_names = vec!["Periphery".into(), "Epicentre".into()];
        assert_eq!(config.clustering.name_for(0), "Periphery");
        assert_eq!(config.clustering.name_for(1), "Epicentre");
        assert_eq!(config.clustering.name_for(2), "cluster2");
    }

    #[test]
    fn wildcards_match_within_one_component() {
        assert!(wildcard_match("a.jsonl", "*.jsonl"));
        assert!(wildcard_match("part-03.jsonl", "part-*.jsonl"));
        assert!(wildcard_match("x", "*"));
        assert!(wildcard_match("a-b-c", "a*b*c"));
        assert!(!wildcard_match("a.json", "*.jsonl"));
        assert!(!wildcard_match("b-a", "a*"));
        assert!(!wildcard_match("ab", "a*b*c"));
        assert!(wildcard_match("literal.txt", "literal.txt"));
        assert!(!wildcard_match("x", "y"));
    }

    #[test]
    fn expand_inputs_sorts_matches_and_requires_hits() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["b.jsonl", "a.jsonl", "skip.txt"] {
            std::fs::write(dir.path().join(name), "").unwrap();
        }
        let mut config = PipelineConfig::from_toml_str(MINIMAL, "test").unwrap();
        config.input.paths = vec![dir.path().join("*.jsonl").display().to_string()];
        let files = config.expand_inputs().unwrap();
        let names: Vec<String> = files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, ["a.jsonl", "b.jsonl"]);

        config.input.paths = vec![dir.path().join("*.csv").display().to_string()];
        assert!(matches!(
            config.expand_inputs(),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn load_config_loads_resources_and_applies_overrides() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("cleaning_rules.toml"),
            "strip_urls = true\n",
        )
        .unwrap();
        std::fs::write(dir.path().join("gazetteer.tsv"), "roma\tLazio\n").unwrap();
        std::fs::write(dir.path().join("fine_to_supra.tsv"), "Lazio\tCentre\n").unwrap();
        std::fs::write(dir.path().join("codebook.tsv"), "pasqua\tEvent\n").unwrap();
        std::fs::write(dir.path().join("records.jsonl"), "").unwrap();
        let config_path = dir.path().join("pipeline.toml");
        std::fs::write(&config_path, MINIMAL).unwrap();

        let loaded = load_config(&config_path, Some(7), None).unwrap();
        assert_eq!(loaded.config.clustering.seed, 7);
        assert!(
            loaded.config.output_dir.is_absolute()
                || loaded.config.output_dir.starts_with(dir.path())
        );
        assert_eq!(loaded.codebook.len(), 1);
        assert!(loaded.header().starts_with("config="));
        assert!(loaded.header().ends_with("seed=7"));

        // Hash covers the seed override.
        let other = load_config(&config_path, Some(8), None).unwrap();
        assert_ne!(loaded.config_hash, other.config_hash);

        // A missing resource fails at load time.
        std::fs::remove_file(dir.path().join("codebook.tsv")).unwrap();
        assert!(load_config(&config_path, None, None).is_err());
    }
}
