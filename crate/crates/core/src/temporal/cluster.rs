//! Seeded k-means over daily series, silhouette scoring, and k selection.
//!
//! Lloyd iterations with k-means++ initialization, a fixed number of
//! restarts seeded `seed + restart_index`, and the lowest-inertia run
//! kept (ties to the earlier restart). Labels are canonical: cluster 0
//! contains the lexicographically smallest group id, and so on upward.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::TemporalError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansParams {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams {
            restarts: 20,
            max_iter: 300,
            tol: 1e-6,
        }
    }
}

/// Result of one clustering run with canonical labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub k: usize,
    pub assignment: BTreeMap<String, usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub silhouette: f64,
    pub seed: u64,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn validate_input(
    rows: &[Vec<f64>],
    ids: &[String],
    k: usize,
    params: &KMeansParams,
) -> Result<(), TemporalError> {
    if rows.is_empty() || k == 0 || k > rows.len() {
        return Err(TemporalError::BadK { k, n: rows.len() });
    }
    if ids.len() != rows.len() {
        return Err(TemporalError::BadInput(format!(
            "{} ids for {} series",
            ids.len(),
            rows.len()
        )));
    }
    let dim = rows[0].len();
    if dim == 0 || rows.iter().any(|r| r.len() != dim) {
        return Err(TemporalError::BadInput(
            "inconsistent series lengths".into(),
        ));
    }
    if params.restarts == 0 || params.max_iter == 0 {
        return Err(TemporalError::BadInput(
            "restarts and max_iter must be at least 1".into(),
        ));
    }
    Ok(())
}

fn plus_plus_init(rows: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut chosen: Vec<usize> = vec![rng.random_range(0..n)];
    while chosen.len() < k {
        let d2: Vec<f64> = rows
            .iter()
            .map(|p| {
                chosen
                    .iter()
                    .map(|&c| dist2(p, &rows[c]))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            // Every remaining point coincides with a centroid; take the
            // first index not yet used to keep the run deterministic.
            let next = (0..n).find(|i| !chosen.contains(i)).unwrap_or(0);
            chosen.push(next);
            continue;
        }
        let target = rng.random::<f64>() * total;
        let mut cumulative = 0.0;
        let mut pick = n - 1;
        for (i, &d) in d2.iter().enumerate() {
            cumulative += d;
            if cumulative > target {
                pick = i;
                break;
            }
        }
        chosen.push(pick);
    }
    chosen.into_iter().map(|i| rows[i].clone()).collect()
}

struct LloydRun {
    labels: Vec<usize>,
    centroids: Vec<Vec<f64>>,
    inertia: f64,
    trace: Vec<f64>,
}

fn lloyd(rows: &[Vec<f64>], k: usize, params: &KMeansParams, rng: &mut ChaCha8Rng) -> LloydRun {
    let n = rows.len();
    let mut centroids = plus_plus_init(rows, k, rng);
    let mut labels = vec![0usize; n];
    let mut inertia = f64::INFINITY;
    let mut trace = Vec::new();

    for iter in 0..params.max_iter {
        for (i, row) in rows.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = dist2(row, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            labels[i] = best;
        }

        // Reseed empty clusters to the point farthest from its centroid;
        // the move strictly removes that point's contribution, so the
        // inertia sequence stays non-increasing.
        loop {
            let mut sizes = vec![0usize; k];
            for &l in &labels {
                sizes[l] += 1;
            }
            let Some(empty) = sizes.iter().position(|&s| s == 0) else {
                break;
            };
            let far = (0..n)
                .max_by(|&a, &b| {
                    let da = dist2(&rows[a], &centroids[labels[a]]);
                    let db = dist2(&rows[b], &centroids[labels[b]]);
                    da.partial_cmp(&db)
                        .expect("distances are finite")
                        .then(b.cmp(&a))
                })
                .expect("nonempty rows");
            centroids[empty] = rows[far].clone();
            labels[far] = empty;
        }

        let current: f64 = rows
            .iter()
            .zip(&labels)
            .map(|(row, &l)| dist2(row, &centroids[l]))
            .sum();
        trace.push(current);
        let converged = (inertia - current).abs() <= params.tol;
        inertia = current;
        if converged || iter + 1 == params.max_iter {
            break;
        }

        let dim = rows[0].len();
        let mut sums = vec![vec![0.0; dim]; k];
        let mut sizes = vec![0usize; k];
        for (row, &l) in rows.iter().zip(&labels) {
            sizes[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(row) {
                *s += v;
            }
        }
        for (c, sum) in sums.iter_mut().enumerate() {
            for v in sum.iter_mut() {
                *v /= sizes[c] as f64;
            }
        }
        centroids = std::mem::take(&mut sums);
    }

    LloydRun {
        labels,
        centroids,
        inertia,
        trace,
    }
}

/// Relabels clusters so that ordering clusters by their smallest member
/// id (lexicographic) gives labels 0, 1, ... and reorders centroids to
/// match.
fn canonicalize(labels: &mut [usize], centroids: &mut Vec<Vec<f64>>, ids: &[String], k: usize) {
    let mut min_id: Vec<Option<&String>> = vec![None; k];
    for (i, &l) in labels.iter().enumerate() {
        if min_id[l].is_none_or(|current| ids[i] < *current) {
            min_id[l] = Some(&ids[i]);
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&c| min_id[c].expect("no cluster is empty"));
    let mut relabel = vec![0usize; k];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    for l in labels.iter_mut() {
        *l = relabel[*l];
    }
    *centroids = order.iter().map(|&old| centroids[old].clone()).collect();
}

/// Mean silhouette over all points with Euclidean distances. Singleton
/// clusters contribute 0, as do points with zero spread.
pub fn silhouette_score(rows: &[Vec<f64>], labels: &[usize]) -> Result<f64, TemporalError> {
    if rows.is_empty() || labels.len() != rows.len() {
        return Err(TemporalError::BadInput(
            "labels must match series one to one".into(),
        ));
    }
    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        clusters.entry(l).or_default().push(i);
    }
    if clusters.len() < 2 {
        return Err(TemporalError::BadInput(
            "silhouette needs at least two clusters".into(),
        ));
    }

    let dist = |a: usize, b: usize| dist2(&rows[a], &rows[b]).sqrt();
    let mut total = 0.0;
    for (&label, members) in &clusters {
        for &i in members {
            if members.len() == 1 {
                continue; // s_i = 0
            }
            let a: f64 = members
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| dist(i, j))
                .sum::<f64>()
                / (members.len() - 1) as f64;
            let b = clusters
                .iter()
                .filter(|(&other, _)| other != label)
                .map(|(_, other_members)| {
                    other_members.iter().map(|&j| dist(i, j)).sum::<f64>()
                        / other_members.len() as f64
                })
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom > 0.0 {
                total += (b - a) / denom;
            }
        }
    }
    Ok(total / rows.len() as f64)
}

/// Clusters `rows` (one series per group id) into `k` clusters and also
/// returns the winning restart's per-iteration inertia trace.
pub fn kmeans_with_trace(
    rows: &[Vec<f64>],
    ids: &[String],
    k: usize,
    seed: u64,
    params: &KMeansParams,
) -> Result<(ClusterResult, Vec<f64>), TemporalError> {
    validate_input(rows, ids, k, params)?;
    let n = rows.len();

    if rows.windows(2).all(|w| w[0] == w[1]) {
        // Identical series carry no structure; split deterministically so
        // the caller still gets k non-empty clusters.
        log::warn!("all {n} series are identical; applying a deterministic split");
        let mut labels: Vec<usize> = (0..n).map(|i| i.min(k - 1)).collect();
        let mut centroids = vec![rows[0].clone(); k];
        canonicalize(&mut labels, &mut centroids, ids, k);
        let assignment = ids.iter().cloned().zip(labels.iter().copied()).collect();
        let result = ClusterResult {
            k,
            assignment,
            centroids,
            inertia: 0.0,
            silhouette: 0.0,
            seed,
        };
        return Ok((result, vec![0.0]));
    }

    let mut best: Option<(LloydRun, usize)> = None;
    for restart in 0..params.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart as u64));
        let run = lloyd(rows, k, params, &mut rng);
        let better = match &best {
            None => true,
            Some((current, _)) => run.inertia < current.inertia,
        };
        if better {
            best = Some((run, restart));
        }
    }
    let (mut run, _) = best.expect("at least one restart");

    canonicalize(&mut run.labels, &mut run.centroids, ids, k);
    let silhouette = if k >= 2 {
        silhouette_score(rows, &run.labels)?
    } else {
        0.0
    };
    let assignment = ids
        .iter()
        .cloned()
        .zip(run.labels.iter().copied())
        .collect();
    Ok((
        ClusterResult {
            k,
            assignment,
            centroids: run.centroids,
            inertia: run.inertia,
            silhouette,
            seed,
        },
        run.trace,
    ))
}

pub fn kmeans(
    rows: &[Vec<f64>],
    ids: &[String],
    k: usize,
    seed: u64,
    params: &KMeansParams,
) -> Result<ClusterResult, TemporalError> {
    kmeans_with_trace(rows, ids, k, seed, params).map(|(result, _)| result)
}

/// Runs k-means for each k in `[k_min, k_max]` and keeps the result with
/// the highest silhouette, ties to the smallest k. Requires
/// `2 <= k_min <= k_max <= n - 1`.
pub fn select_k(
    rows: &[Vec<f64>],
    ids: &[String],
    k_min: usize,
    k_max: usize,
    seed: u64,
    params: &KMeansParams,
) -> Result<ClusterResult, TemporalError> {
    let n = rows.len();
    if k_min < 2 || k_min > k_max || k_max + 1 > n {
        return Err(TemporalError::BadK { k: k_max, n });
    }
    let mut best: Option<ClusterResult> = None;
    for k in k_min..=k_max {
        let result = kmeans(rows, ids, k, seed, params)?;
        let better = match &best {
            None => true,
            Some(current) => result.silhouette > current.silhouette,
        };
        if better {
            best = Some(result);
        }
    }
    Ok(best.expect("k range is nonempty"))
}
