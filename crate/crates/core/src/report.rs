//! Pipeline orchestration and artifact emission.
//!
//! One run reads the corpus named by the config, drives every analysis
//! stage in order, and writes the output directory: records.jsonl,
//! vocabulary.tsv, series.csv, clusters.csv, salience.csv, ratios.csv,
//! table1.md, optional plot-data CSVs, and manifest.txt with a SHA-256
//! digest per artifact. Every file opens with a comment line carrying
//! the config hash and seed, so reruns are checkable byte for byte.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use log::{info, warn};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coding::{
    apply_codebook, category_ratios, format_ratio, CodingError, RatioTable, TermCategory,
};
use crate::config::{ClusterInput, ConfigError, LoadedConfig};
use crate::geonorm::{GeoError, NormalizedLocation};
use crate::ingest::{self, IngestError, TweetType};
use crate::salience::{
    build_counts, doc_labels, scaled_f_score, top_terms, CategorizedDoc, CountOptions,
    MarginalAxis, SalienceEntry, SalienceError, TermCategoryCounts,
};
use crate::temporal::{
    build_series, combined_normalized, combined_residual, month_key, normalize_series,
    remove_mean_trend, rolling_mean, select_k, ClusterResult, KMeansParams, SeriesEvent,
    TemporalError, TimeSeriesPanel,
};
use crate::textproc::{
    clean_text, compute_pmi, count_ngrams, segment_terms, select_vocabulary, tokenize, TextError,
};

/// Pipeline failure, prefixed with the stage that raised it.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("ingest: {0}")]
    Ingest(#[from] IngestError),
    #[error("textproc: {0}")]
    Text(#[from] TextError),
    #[error("geonorm: {0}")]
    Geo(#[from] GeoError),
    #[error("temporal: {0}")]
    Temporal(#[from] TemporalError),
    #[error("salience: {0}")]
    Salience(#[from] SalienceError),
    #[error("coding: {0}")]
    Coding(#[from] CodingError),
    #[error("report: {0}")]
    Csv(#[from] csv::Error),
    #[error("report: {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("report: {0}")]
    Invalid(String),
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Record attrition per stage, for logs and the CLI summary.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StageCounts {
    pub parsed: usize,
    pub language_filtered: usize,
    pub duplicates: usize,
    pub outside_window: usize,
    pub unmapped: usize,
    /// Records that reached the analyses: in window and region-mapped.
    pub analyzed: usize,
}

/// Names and SHA-256 digests of every artifact one run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub config_hash: String,
    pub seed: u64,
    /// `(file name, hex digest)`, sorted by file name.
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn render(&self) -> String {
        let mut out = format!("# config={} seed={}\n", self.config_hash, self.seed);
        for (name, digest) in &self.entries {
            let _ = writeln!(out, "{name}\t{digest}");
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), PipelineError> {
        fs::write(path, self.render()).map_err(io_err(path))
    }
}

/// SHA-256 of a file's bytes as lowercase hex.
pub fn hash_file(path: &Path) -> Result<String, PipelineError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// What `run_pipeline` hands back besides the files on disk.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub manifest: Manifest,
    pub counts: StageCounts,
    pub clusters: ClusterResult,
}

/// One analyzable post: cleaned tokens plus its panel coordinates.
struct Doc {
    tokens: Vec<String>,
    month: String,
    period: String,
    fine: String,
    supra: String,
    tweet_type: TweetType,
    date: NaiveDate,
}

fn emit_artifact(
    out_dir: &Path,
    name: &str,
    content: &str,
    artifacts: &mut Vec<String>,
) -> Result<(), PipelineError> {
    let path = out_dir.join(name);
    fs::write(&path, content).map_err(io_err(&path))?;
    artifacts.push(name.to_string());
    Ok(())
}

fn csv_block(
    header: &str,
    columns: &[&str],
    rows: Vec<Vec<String>>,
) -> Result<String, PipelineError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(columns)?;
    for row in rows {
        wtr.write_record(&row)?;
    }
    let body = wtr
        .into_inner()
        .map_err(|e| PipelineError::Invalid(format!("csv buffer: {e}")))?;
    let body = String::from_utf8(body).map_err(|e| PipelineError::Invalid(format!("csv: {e}")))?;
    Ok(format!("# {header}\n{body}"))
}

/// Everything the summary table renders. Keys are display names; cells
/// hold coded top terms in rank order.
#[derive(Debug, Clone, Default)]
pub struct Table1Data {
    pub periods: Vec<String>,
    pub clusters: Vec<String>,
    /// `(cluster, period)` → coded top terms of that cell.
    pub cells: BTreeMap<(String, String), Vec<(String, TermCategory)>>,
    /// period → coded top terms pooled across clusters.
    pub period_marginals: BTreeMap<String, Vec<(String, TermCategory)>>,
    /// cluster → coded top terms pooled across periods.
    pub cluster_marginals: BTreeMap<String, Vec<(String, TermCategory)>>,
    /// Corpus-wide most frequent terms (the bottom-right cell).
    pub overall: Vec<(String, TermCategory)>,
    /// period → category shares over that row's cells.
    pub row_ratios: BTreeMap<String, RatioTable>,
    /// cluster → category shares down that column's cells.
    pub column_ratios: BTreeMap<String, RatioTable>,
}

fn term_cell(terms: &[(String, TermCategory)]) -> String {
    if terms.is_empty() {
        warn!("summary table cell has no terms");
        return "—".into();
    }
    terms
        .iter()
        .map(|(term, category)| format!("{} ({category})", term.replace('_', " ")))
        .collect::<Vec<_>>()
        .join(", ")
}

fn ratio_cell(table: Option<&RatioTable>) -> String {
    let Some(table) = table else {
        return "—".into();
    };
    if table.entries.is_empty() {
        return "—".into();
    }
    table
        .entries
        .iter()
        .map(|e| format!("{}:{}", e.category, format_ratio(e.ratio)))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Renders the summary grid: one row per period plus a Marginal row
/// (per-cluster terms pooled over periods) and a Ratios row; one column
/// per cluster plus Marginal and Ratios columns. The bottom-right term
/// cell holds the corpus-wide most frequent terms.
pub fn emit_table1(data: &Table1Data, header: &str) -> String {
    let mut out = format!("<!-- {header} -->\n\n# Salient terms by cluster and period\n\n");
    let empty: Vec<(String, TermCategory)> = Vec::new();
    let cell = |cluster: &str, period: &str| {
        data.cells
            .get(&(cluster.to_string(), period.to_string()))
            .unwrap_or(&empty)
    };

    let mut head = String::from("| Period |");
    let mut rule = String::from("| --- |");
    for cluster in &data.clusters {
        let _ = write!(head, " {cluster} |");
        rule.push_str(" --- |");
    }
    head.push_str(" Marginal | Ratios |");
    rule.push_str(" --- | --- |");
    let _ = writeln!(out, "{head}");
    let _ = writeln!(out, "{rule}");

    for period in &data.periods {
        let mut row = format!("| {period} |");
        for cluster in &data.clusters {
            let _ = write!(row, " {} |", term_cell(cell(cluster, period)));
        }
        let marginal = data
            .period_marginals
            .get(period)
            .map(Vec::as_slice)
            .unwrap_or(&[]);
        let _ = write!(row, " {} |", term_cell(marginal));
        let _ = write!(row, " {} |", ratio_cell(data.row_ratios.get(period)));
        let _ = writeln!(out, "{row}");
    }

    let mut row = String::from("| Marginal |");
    for cluster in &data.clusters {
        let marginal = data
            .cluster_marginals
            .get(cluster)
            .map(Vec::as_slice)
            .unwrap_or(&[]);
        let _ = write!(row, " {} |", term_cell(marginal));
    }
    let _ = write!(row, " {} |", term_cell(&data.overall));
    row.push_str(" — |");
    let _ = writeln!(out, "{row}");

    let mut row = String::from("| Ratios |");
    for cluster in &data.clusters {
        let _ = write!(row, " {} |", ratio_cell(data.column_ratios.get(cluster)));
    }
    row.push_str(" — | — |");
    let _ = writeln!(out, "{row}");
    out
}

/// Plot-ready CSV bodies for the three volume figures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotData {
    /// date, supra, normalized: combined-type volume share per supra-region.
    pub fig1a: String,
    /// date, supra, tweet_type, residual: detrended share per supra-region.
    pub fig1b: String,
    /// date, group, cluster, value: clustering input per fine region.
    pub fig1c: String,
}

/// Builds the three plot-data files from the supra-region panel and the
/// fine-region clustering input.
pub fn emit_series_plotdata(
    supra_panel: &TimeSeriesPanel,
    fine_ids: &[String],
    fine_rows: &[Vec<f64>],
    clusters: &ClusterResult,
    header: &str,
) -> Result<PlotData, PipelineError> {
    let dates = &supra_panel.dates;

    let (supra_ids, supra_rows) = combined_normalized(supra_panel);
    let mut rows_a = Vec::new();
    for (id, series) in supra_ids.iter().zip(&supra_rows) {
        for (date, value) in dates.iter().zip(series) {
            rows_a.push(vec![date.to_string(), id.clone(), value.to_string()]);
        }
    }
    let fig1a = csv_block(header, &["date", "supra", "normalized"], rows_a)?;

    let mut rows_b = Vec::new();
    for row in &supra_panel.rows {
        for (date, value) in dates.iter().zip(&row.residual) {
            rows_b.push(vec![
                date.to_string(),
                row.group.clone(),
                row.tweet_type.as_str().to_string(),
                value.to_string(),
            ]);
        }
    }
    let fig1b = csv_block(header, &["date", "supra", "tweet_type", "residual"], rows_b)?;

    let mut rows_c = Vec::new();
    for (id, series) in fine_ids.iter().zip(fine_rows) {
        let label = clusters
            .assignment
            .get(id)
            .copied()
            .ok_or_else(|| PipelineError::Invalid(format!("group `{id}` has no cluster")))?;
        for (date, value) in dates.iter().zip(series) {
            rows_c.push(vec![
                date.to_string(),
                id.clone(),
                label.to_string(),
                value.to_string(),
            ]);
        }
    }
    let fig1c = csv_block(header, &["date", "group", "cluster", "value"], rows_c)?;

    Ok(PlotData {
        fig1a,
        fig1b,
        fig1c,
    })
}

fn rank_all(
    counts: &TermCategoryCounts,
    beta: f64,
) -> Result<BTreeMap<String, Vec<SalienceEntry>>, SalienceError> {
    counts
        .categories()
        .iter()
        .map(|c| scaled_f_score(counts, c, beta).map(|entries| (c.clone(), entries)))
        .collect()
}

/// Corpus-wide top terms by raw count, descending, ties by term order.
fn overall_frequency_top(counts: &TermCategoryCounts, k: usize) -> Vec<String> {
    let mut totals: Vec<(u64, &String)> = counts
        .counts()
        .iter()
        .zip(counts.vocabulary())
        .map(|(row, term)| (row.iter().sum(), term))
        .collect();
    totals.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    totals.into_iter().take(k).map(|(_, t)| t.clone()).collect()
}

/// Runs every stage and writes all artifacts plus manifest.txt into the
/// configured output directory.
pub fn run_pipeline(loaded: &LoadedConfig) -> Result<RunSummary, PipelineError> {
    let config = &loaded.config;
    let header = loaded.header();
    let out_dir = &config.output_dir;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut artifacts: Vec<String> = Vec::new();

    // Ingest: parse, dedupe, clip to the configured window.
    let files = config.expand_inputs()?;
    let languages: Option<HashSet<String>> = config
        .input
        .languages
        .as_ref()
        .map(|list| list.iter().cloned().collect());
    let (records, stats) = ingest::ingest_files(&files, &config.input.fields, languages.as_ref())?;
    let (records, duplicates) = ingest::dedupe(records);
    let (window_start, window_end) = config.periods.window();
    let (records, outside_window) = ingest::filter_window(records, window_start, window_end)?;
    let mut counts = StageCounts {
        parsed: stats.parsed,
        language_filtered: stats.language_filtered,
        duplicates,
        outside_window,
        ..StageCounts::default()
    };
    info!(
        "ingest: {} parsed, {} language-filtered, {} duplicates, {} outside window, {} kept",
        counts.parsed,
        counts.language_filtered,
        counts.duplicates,
        counts.outside_window,
        records.len()
    );
    ingest::write_records(&out_dir.join("records.jsonl"), &records, &header)?;
    artifacts.push("records.jsonl".into());

    // Geonorm: records without a mappable location drop out here.
    let mut docs: Vec<Doc> = Vec::new();
    for record in &records {
        let (fine, supra) = match loaded.hierarchy.normalize_location(&record.user_location) {
            NormalizedLocation::Mapped { fine, supra } => (fine, supra),
            NormalizedLocation::Unmapped => {
                counts.unmapped += 1;
                continue;
            }
        };
        let cleaned = clean_text(&record.text, &loaded.rules);
        docs.push(Doc {
            tokens: tokenize(&cleaned),
            month: month_key(record.created_at),
            period: config.periods.assign_period(record.created_at)?.to_string(),
            fine,
            supra: supra.as_str().to_string(),
            tweet_type: record.tweet_type,
            date: record.created_at.date_naive(),
        });
    }
    counts.analyzed = docs.len();
    if docs.is_empty() {
        return Err(PipelineError::Invalid(
            "no records with a mappable location".into(),
        ));
    }
    info!(
        "geonorm: {} mapped, {} unmapped",
        counts.analyzed, counts.unmapped
    );

    // Textproc: monthly n-gram stats, vocabulary admission.
    let month_docs: Vec<(&str, &[String])> = docs
        .iter()
        .map(|d| (d.month.as_str(), d.tokens.as_slice()))
        .collect();
    let month_counts = count_ngrams(month_docs);
    let mut candidates = Vec::new();
    for mc in &month_counts {
        candidates.extend(compute_pmi(mc)?);
    }
    let vocab = select_vocabulary(
        &candidates,
        config.ngram.pmi_mass,
        config.ngram.freq_mass,
        config.ngram.pool,
    )?;
    info!("textproc: {} collocations admitted", vocab.len());
    vocab.write_tsv(&out_dir.join("vocabulary.tsv"), &header)?;
    artifacts.push("vocabulary.tsv".into());

    // Temporal: fine-region panel, clustering input, k selection.
    let events: Vec<SeriesEvent> = docs
        .iter()
        .map(|d| SeriesEvent {
            group: d.fine.clone(),
            tweet_type: d.tweet_type,
            date: d.date,
        })
        .collect();
    let grid_start = window_start.date_naive();
    let grid_end = window_end.date_naive();
    let mut panel = build_series(&events, grid_start, grid_end)?;
    normalize_series(&mut panel);
    remove_mean_trend(&mut panel);

    let mut series_rows = Vec::new();
    for row in &panel.rows {
        for (day, date) in panel.dates.iter().enumerate() {
            series_rows.push(vec![
                row.group.clone(),
                row.tweet_type.as_str().to_string(),
                date.to_string(),
                row.counts[day].to_string(),
                row.normalized[day].to_string(),
                row.residual[day].to_string(),
            ]);
        }
    }
    let series_csv = csv_block(
        &header,
        &[
            "group",
            "tweet_type",
            "date",
            "count",
            "normalized",
            "residual",
        ],
        series_rows,
    )?;
    emit_artifact(out_dir, "series.csv", &series_csv, &mut artifacts)?;

    let (group_ids, base_rows) = match config.clustering.input {
        ClusterInput::Normalized => combined_normalized(&panel),
        ClusterInput::Residual => combined_residual(&panel),
    };
    let input_rows: Vec<Vec<f64>> = base_rows
        .iter()
        .map(|row| rolling_mean(row, config.clustering.smoothing_window))
        .collect();
    let n_groups = group_ids.len();
    let k_max = config.clustering.k_max.min(n_groups.saturating_sub(1));
    if k_max < config.clustering.k_min {
        return Err(PipelineError::Invalid(format!(
            "temporal: {n_groups} groups cannot support k in [{}, {}]",
            config.clustering.k_min, config.clustering.k_max
        )));
    }
    if k_max < config.clustering.k_max {
        warn!("k_max clamped to {k_max}: only {n_groups} groups in the corpus");
    }
    let params = KMeansParams {
        restarts: config.clustering.restarts,
        max_iter: config.clustering.max_iter,
        tol: config.clustering.tol,
    };
    let clusters = select_k(
        &input_rows,
        &group_ids,
        config.clustering.k_min,
        k_max,
        config.clustering.seed,
        &params,
    )?;
    info!(
        "temporal: k={} silhouette={:.4} over {} groups",
        clusters.k, clusters.silhouette, n_groups
    );

    let cluster_rows = clusters
        .assignment
        .iter()
        .map(|(group, &label)| {
            vec![
                group.clone(),
                label.to_string(),
                clusters.k.to_string(),
                clusters.silhouette.to_string(),
                clusters.seed.to_string(),
            ]
        })
        .collect();
    let clusters_csv = csv_block(
        &header,
        &["group", "cluster", "k", "silhouette", "seed"],
        cluster_rows,
    )?;
    emit_artifact(out_dir, "clusters.csv", &clusters_csv, &mut artifacts)?;

    // Salience: segment docs against the vocabulary, label them with
    // (cluster, period), rank terms per cell and per marginal.
    let cluster_names: Vec<String> = (0..clusters.k)
        .map(|label| config.clustering.name_for(label))
        .collect();
    let name_of: BTreeMap<&str, &str> = clusters
        .assignment
        .iter()
        .map(|(group, &label)| (group.as_str(), cluster_names[label].as_str()))
        .collect();
    let cat_docs: Vec<CategorizedDoc> = docs
        .iter()
        .map(|d| CategorizedDoc {
            terms: segment_terms(&d.tokens, &vocab),
            spatial: Some(name_of[d.fine.as_str()].to_string()),
            temporal: Some(d.period.clone()),
            tweet_type: d.tweet_type,
        })
        .collect();
    let options = CountOptions {
        min_count: config.salience.min_count,
        mode: config.salience.count_mode,
    };
    let labels_cross = doc_labels(&cat_docs, MarginalAxis::None)?;
    let labels_period = doc_labels(&cat_docs, MarginalAxis::Spatial)?;
    let labels_cluster = doc_labels(&cat_docs, MarginalAxis::Temporal)?;
    let counts_cross = build_counts(&cat_docs, &labels_cross, options)?;
    let counts_period = build_counts(&cat_docs, &labels_period, options)?;
    let counts_cluster = build_counts(&cat_docs, &labels_cluster, options)?;
    let beta = config.salience.beta;
    let rank_cross = rank_all(&counts_cross, beta)?;
    let rank_period = rank_all(&counts_period, beta)?;
    let rank_cluster = rank_all(&counts_cluster, beta)?;

    let mut salience_rows = Vec::new();
    for rankings in [&rank_cross, &rank_period, &rank_cluster] {
        for (category, entries) in rankings.iter() {
            for (i, e) in entries.iter().enumerate() {
                salience_rows.push(vec![
                    category.clone(),
                    (i + 1).to_string(),
                    e.term.clone(),
                    e.precision.to_string(),
                    e.recall.to_string(),
                    e.precision_cdf.to_string(),
                    e.recall_cdf.to_string(),
                    e.sfs.to_string(),
                ]);
            }
        }
    }
    let salience_csv = csv_block(
        &header,
        &[
            "category",
            "rank",
            "term",
            "precision",
            "recall",
            "precision_cdf",
            "recall_cdf",
            "sfs",
        ],
        salience_rows,
    )?;
    emit_artifact(out_dir, "salience.csv", &salience_csv, &mut artifacts)?;

    // Coding: code each cell's top terms, pool rows and columns.
    let top_k = config.salience.top_k;
    let period_names: Vec<String> = config.periods.names().map(str::to_string).collect();
    let coded = |entries: Option<&Vec<SalienceEntry>>| -> Vec<(String, TermCategory)> {
        let terms = entries.map(|e| top_terms(e, top_k)).unwrap_or_default();
        apply_codebook(&terms, &loaded.codebook)
    };
    let mut table = Table1Data {
        periods: period_names.clone(),
        clusters: cluster_names.clone(),
        overall: apply_codebook(
            &overall_frequency_top(&counts_cross, top_k),
            &loaded.codebook,
        ),
        ..Table1Data::default()
    };
    for cluster in &cluster_names {
        for period in &period_names {
            let cell = coded(rank_cross.get(&format!("{cluster}/{period}")));
            table.cells.insert((cluster.clone(), period.clone()), cell);
        }
        table
            .cluster_marginals
            .insert(cluster.clone(), coded(rank_cluster.get(cluster)));
    }
    for period in &period_names {
        table
            .period_marginals
            .insert(period.clone(), coded(rank_period.get(period)));
    }
    for period in &period_names {
        let lists: Vec<&[(String, TermCategory)]> = cluster_names
            .iter()
            .map(|c| table.cells[&(c.clone(), period.clone())].as_slice())
            .collect();
        if lists.iter().all(|l| l.is_empty()) {
            warn!("period `{period}` has no coded terms; ratio row skipped");
            continue;
        }
        let ratio = category_ratios(
            &format!("period:{period}"),
            &lists,
            config.coding.row_convention,
        )?;
        table.row_ratios.insert(period.clone(), ratio);
    }
    for cluster in &cluster_names {
        let lists: Vec<&[(String, TermCategory)]> = period_names
            .iter()
            .map(|p| table.cells[&(cluster.clone(), p.clone())].as_slice())
            .collect();
        if lists.iter().all(|l| l.is_empty()) {
            warn!("cluster `{cluster}` has no coded terms; ratio column skipped");
            continue;
        }
        let ratio = category_ratios(
            &format!("cluster:{cluster}"),
            &lists,
            config.coding.column_convention,
        )?;
        table.column_ratios.insert(cluster.clone(), ratio);
    }

    let mut ratio_rows = Vec::new();
    let push_ratios = |table: &RatioTable, rows: &mut Vec<Vec<String>>| {
        for entry in &table.entries {
            rows.push(vec![
                table.scope.clone(),
                entry.category.to_string(),
                entry.count.to_string(),
                table.denominator.to_string(),
                entry.ratio.to_string(),
            ]);
        }
    };
    for period in &period_names {
        if let Some(t) = table.row_ratios.get(period) {
            push_ratios(t, &mut ratio_rows);
        }
    }
    for cluster in &cluster_names {
        if let Some(t) = table.column_ratios.get(cluster) {
            push_ratios(t, &mut ratio_rows);
        }
    }
    let ratios_csv = csv_block(
        &header,
        &["scope", "category", "count", "denominator", "ratio"],
        ratio_rows,
    )?;
    emit_artifact(out_dir, "ratios.csv", &ratios_csv, &mut artifacts)?;

    let table1 = emit_table1(&table, &header);
    emit_artifact(out_dir, "table1.md", &table1, &mut artifacts)?;

    if config.emit_plotdata {
        let supra_events: Vec<SeriesEvent> = docs
            .iter()
            .map(|d| SeriesEvent {
                group: d.supra.clone(),
                tweet_type: d.tweet_type,
                date: d.date,
            })
            .collect();
        let mut supra_panel = build_series(&supra_events, grid_start, grid_end)?;
        normalize_series(&mut supra_panel);
        remove_mean_trend(&mut supra_panel);
        let plots =
            emit_series_plotdata(&supra_panel, &group_ids, &input_rows, &clusters, &header)?;
        emit_artifact(out_dir, "fig1a.csv", &plots.fig1a, &mut artifacts)?;
        emit_artifact(out_dir, "fig1b.csv", &plots.fig1b, &mut artifacts)?;
        emit_artifact(out_dir, "fig1c.csv", &plots.fig1c, &mut artifacts)?;
    }

    artifacts.sort();
    let entries = artifacts
        .iter()
        .map(|name| Ok((name.clone(), hash_file(&out_dir.join(name))?)))
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let manifest = Manifest {
        config_hash: loaded.config_hash.clone(),
        seed: config.clustering.seed,
        entries,
    };
    manifest.write(&out_dir.join("manifest.txt"))?;
    info!(
        "report: {} artifacts in {}",
        manifest.entries.len(),
        out_dir.display()
    );

    Ok(RunSummary {
        manifest,
        counts,
        clusters,
    })
}
