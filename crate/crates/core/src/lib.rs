//! Spatio-temporal analysis of geolocated short-text corpora.
//!
//! The pipeline ingests line-delimited JSON posts, normalizes free-text
//! user locations against a gazetteer, selects collocations by pointwise
//! mutual information, clusters regional posting-volume series, ranks
//! terms per category by scaled F-score, and summarises hand-coded term
//! categories as ratio tables. Every stage is deterministic for a fixed
//! configuration and seed.
//!
//! Modules follow the stage order:
//!
//! * [`ingest`]: parsing, deduplication, time-window filtering
//! * [`textproc`]: cleaning, tokenization, PMI collocations, segmentation
//! * [`geonorm`]: location normalization and regional aggregation
//! * [`temporal`]: policy periods, daily panels, k-means clustering
//! * [`salience`]: per-category term ranking by scaled F-score
//! * [`coding`]: codebook application and category ratio tables
//! * [`report`]: end-to-end run, artifact emission, manifest
//!
//! [`synthetic`] generates seeded corpora with known structure for
//! end-to-end checks, and [`config`] holds the TOML-backed run
//! configuration.

pub mod coding;
pub mod config;
pub mod geonorm;
pub mod ingest;
pub mod report;
pub mod salience;
pub mod synthetic;
pub mod temporal;
pub mod textproc;

pub use coding::{Codebook, DenominatorConvention, RatioTable, TermCategory};
pub use config::{LoadedConfig, PipelineConfig};
pub use geonorm::{NormalizedLocation, RegionHierarchy, SupraRegion};
pub use ingest::{FieldMap, TweetRecord, TweetType};
pub use report::{run_pipeline, Manifest};
pub use salience::{SalienceEntry, TermCategoryCounts};
pub use temporal::{ClusterResult, PeriodConfig, TimeSeriesPanel};
pub use textproc::{CleaningRules, TermVocabulary};
