//! Command-line front end for the analysis pipeline.

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use stcorpus::config::{load_config, ClusterInput, LoadedConfig};
use stcorpus::geonorm::{NormalizedLocation, RegionHierarchy};
use stcorpus::ingest::{self, TweetRecord};
use stcorpus::report::run_pipeline;
use stcorpus::synthetic::{generate, SyntheticSpec};
use stcorpus::temporal::{
    build_series, combined_normalized, combined_residual, normalize_series, remove_mean_trend,
    rolling_mean, select_k, KMeansParams, SeriesEvent,
};

#[derive(Parser)]
#[command(name = "stcorpus", version, about = "Spatio-temporal corpus analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage and write all artifacts plus a manifest.
    Run(RunArgs),
    /// Parse, dedupe, and window-filter records; write them normalized.
    Ingest(IngestArgs),
    /// Map user locations to regions; list the top unmapped strings.
    Geonorm(GeonormArgs),
    /// Cluster regional posting-volume series and print the assignment.
    Cluster(ClusterArgs),
    /// Generate a synthetic corpus with planted structure.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the configured output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Override the configured clustering seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    config: PathBuf,
    /// Input path or glob; overrides the configured inputs.
    #[arg(long)]
    input: Option<String>,
    /// Where the normalized records go.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GeonormArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the configured gazetteer file.
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    /// How many unmapped strings to list.
    #[arg(long, default_value_t = 20)]
    report_unmapped: usize,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 100_000)]
    records: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Corpus JSONL destination.
    #[arg(long)]
    out: PathBuf,
    /// Optional codebook TSV covering the planted terms.
    #[arg(long)]
    codebook: Option<PathBuf>,
}

/// Ingest, dedupe, and window-filter per the loaded config.
fn front(loaded: &LoadedConfig) -> anyhow::Result<Vec<TweetRecord>> {
    let config = &loaded.config;
    let files = config.expand_inputs()?;
    let languages: Option<HashSet<String>> = config
        .input
        .languages
        .as_ref()
        .map(|list| list.iter().cloned().collect());
    let (records, stats) = ingest::ingest_files(&files, &config.input.fields, languages.as_ref())?;
    let (records, duplicates) = ingest::dedupe(records);
    let (start, end) = config.periods.window();
    let (records, outside) = ingest::filter_window(records, start, end)?;
    eprintln!(
        "{} parsed, {} language-filtered, {} duplicates, {} outside window, {} kept",
        stats.parsed,
        stats.language_filtered,
        duplicates,
        outside,
        records.len()
    );
    Ok(records)
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    let loaded = load_config(&args.config, args.seed, args.out_dir)?;
    let summary = run_pipeline(&loaded)?;
    eprintln!(
        "{} records analyzed ({} unmapped), k={} silhouette={:.4}",
        summary.counts.analyzed,
        summary.counts.unmapped,
        summary.clusters.k,
        summary.clusters.silhouette
    );
    for (name, digest) in &summary.manifest.entries {
        println!("{name}\t{digest}");
    }
    Ok(())
}

fn cmd_ingest(args: IngestArgs) -> anyhow::Result<()> {
    let mut loaded = load_config(&args.config, None, None)?;
    if let Some(input) = args.input {
        loaded.config.input.paths = vec![input];
    }
    let records = front(&loaded)?;
    ingest::write_records(&args.out, &records, &loaded.header())?;
    println!("{} records -> {}", records.len(), args.out.display());
    Ok(())
}

fn cmd_geonorm(args: GeonormArgs) -> anyhow::Result<()> {
    let loaded = load_config(&args.config, None, None)?;
    let hierarchy = match &args.gazetteer {
        Some(path) => RegionHierarchy::load(path, &loaded.config.resources.fine_to_supra)?,
        None => loaded.hierarchy.clone(),
    };
    let records = front(&loaded)?;
    let mut mapped: BTreeMap<String, usize> = BTreeMap::new();
    let mut unmapped: BTreeMap<String, usize> = BTreeMap::new();
    for record in &records {
        match hierarchy.normalize_location(&record.user_location) {
            NormalizedLocation::Mapped { supra, .. } => {
                *mapped.entry(supra.as_str().to_string()).or_insert(0) += 1;
            }
            NormalizedLocation::Unmapped => {
                *unmapped
                    .entry(record.user_location.trim().to_string())
                    .or_insert(0) += 1;
            }
        }
    }
    let total_unmapped: usize = unmapped.values().sum();
    println!(
        "mapped {} / unmapped {}",
        records.len() - total_unmapped,
        total_unmapped
    );
    for (supra, count) in &mapped {
        println!("{supra}\t{count}");
    }
    if args.report_unmapped > 0 && !unmapped.is_empty() {
        println!("top unmapped location strings:");
        let mut rows: Vec<(&String, &usize)> = unmapped.iter().collect();
        rows.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
        for (text, count) in rows.into_iter().take(args.report_unmapped) {
            println!("{count}\t{text}");
        }
    }
    Ok(())
}

fn cmd_cluster(args: ClusterArgs) -> anyhow::Result<()> {
    let loaded = load_config(&args.config, args.seed, None)?;
    let config = &loaded.config;
    let records = front(&loaded)?;
    let mut events = Vec::new();
    for record in &records {
        if let NormalizedLocation::Mapped { fine, .. } =
            loaded.hierarchy.normalize_location(&record.user_location)
        {
            events.push(SeriesEvent {
                group: fine,
                tweet_type: record.tweet_type,
                date: record.created_at.date_naive(),
            });
        }
    }
    let (start, end) = config.periods.window();
    let mut panel = build_series(&events, start.date_naive(), end.date_naive())?;
    normalize_series(&mut panel);
    remove_mean_trend(&mut panel);
    let (ids, rows) = match config.clustering.input {
        ClusterInput::Normalized => combined_normalized(&panel),
        ClusterInput::Residual => combined_residual(&panel),
    };
    let rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| rolling_mean(r, config.clustering.smoothing_window))
        .collect();
    let k_min = args.k_min.unwrap_or(config.clustering.k_min);
    let k_max = args.k_max.unwrap_or(config.clustering.k_max);
    let params = KMeansParams {
        restarts: config.clustering.restarts,
        max_iter: config.clustering.max_iter,
        tol: config.clustering.tol,
    };
    let result = select_k(&rows, &ids, k_min, k_max, config.clustering.seed, &params)?;
    eprintln!(
        "k={} silhouette={:.4} inertia={:.6} seed={}",
        result.k, result.silhouette, result.inertia, result.seed
    );
    for (group, label) in &result.assignment {
        println!("{group}\t{label}");
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> anyhow::Result<()> {
    let spec = SyntheticSpec {
        records: args.records,
        seed: args.seed,
        ..SyntheticSpec::default()
    };
    let corpus = generate(&spec);
    corpus
        .write_corpus(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("{} records -> {}", corpus.lines.len(), args.out.display());
    if let Some(path) = args.codebook {
        corpus
            .write_codebook(&path)
            .with_context(|| format!("writing {}", path.display()))?;
        println!(
            "{} codebook rows -> {}",
            corpus.codebook.len(),
            path.display()
        );
    }
    for (supra, count) in &corpus.supra_counts {
        println!("{supra}\t{count}");
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Ingest(args) => cmd_ingest(args),
        Command::Geonorm(args) => cmd_geonorm(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Synth(args) => cmd_synth(args),
    }
}
