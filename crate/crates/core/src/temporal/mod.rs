//! Policy periods, daily posting-volume panels, and series clustering.
//!
//! Periods are half-open `[start_i, start_{i+1})` intervals that
//! partition the analysis window. Panels hold one daily series per
//! `(group, tweet type)` pair over the full window grid, zero-filled,
//! with unit-sum normalization and cross-group mean-trend removal.

mod cluster;

pub use cluster::{
    kmeans, kmeans_with_trace, select_k, silhouette_score, ClusterResult, KMeansParams,
};

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::TweetType;

#[derive(Debug, Error)]
pub enum TemporalError {
    #[error("timestamp {at} is outside the configured periods")]
    OutOfRange { at: DateTime<Utc> },
    #[error("bad period configuration: {0}")]
    BadPeriods(String),
    #[error("no events fall inside the window")]
    EmptyWindow,
    #[error("k = {k} is not usable with {n} series")]
    BadK { k: usize, n: usize },
    #[error("bad clustering input: {0}")]
    BadInput(String),
}

/// One named period starting at midnight UTC of `start`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub name: String,
    pub start: NaiveDate,
}

/// Ordered period starts plus the exclusive end of the last period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodConfig {
    pub end: NaiveDate,
    pub periods: Vec<Period>,
}

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid literal date")
}

impl Default for PeriodConfig {
    /// The six phases of the Italian 2020 outbreak response.
    fn default() -> Self {
        PeriodConfig {
            periods: vec![
                Period {
                    name: "Pre".into(),
                    start: date(2020, 1, 27),
                },
                Period {
                    name: "Initial".into(),
                    start: date(2020, 2, 19),
                },
                Period {
                    name: "Northern".into(),
                    start: date(2020, 2, 23),
                },
                Period {
                    name: "National".into(),
                    start: date(2020, 3, 10),
                },
                Period {
                    name: "Prolongation".into(),
                    start: date(2020, 4, 11),
                },
                Period {
                    name: "Relaxing".into(),
                    start: date(2020, 5, 5),
                },
            ],
            end: date(2020, 6, 1),
        }
    }
}

impl PeriodConfig {
    pub fn validate(&self) -> Result<(), TemporalError> {
        if self.periods.is_empty() {
            return Err(TemporalError::BadPeriods("no periods defined".into()));
        }
        for pair in self.periods.windows(2) {
            if pair[0].start >= pair[1].start {
                return Err(TemporalError::BadPeriods(format!(
                    "`{}` does not start before `{}`",
                    pair[0].name, pair[1].name
                )));
            }
        }
        let last = self.periods.last().expect("nonempty");
        if last.start >= self.end {
            return Err(TemporalError::BadPeriods(format!(
                "end {} is not after the last period start {}",
                self.end, last.start
            )));
        }
        let names: BTreeSet<&str> = self.periods.iter().map(|p| p.name.as_str()).collect();
        if names.len() != self.periods.len() {
            return Err(TemporalError::BadPeriods("duplicate period name".into()));
        }
        Ok(())
    }

    /// Analysis window as UTC instants: `[first start, end)`.
    pub fn window(&self) -> (DateTime<Utc>, DateTime<Utc>) {
        let start = self.periods[0].start;
        (day_start(start), day_start(self.end))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.periods.iter().map(|p| p.name.as_str())
    }

    /// Period containing the instant. Starts are inclusive, the next
    /// start (or the window end) exclusive.
    pub fn assign_period(&self, at: DateTime<Utc>) -> Result<&str, TemporalError> {
        let (start, end) = self.window();
        if at < start || at >= end {
            return Err(TemporalError::OutOfRange { at });
        }
        let idx = self.periods.partition_point(|p| day_start(p.start) <= at);
        Ok(&self.periods[idx - 1].name)
    }
}

fn day_start(d: NaiveDate) -> DateTime<Utc> {
    d.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc()
}

/// Calendar month key (`YYYY-MM`) of an instant, used to pool collocation
/// candidates.
pub fn month_key(at: DateTime<Utc>) -> String {
    at.format("%Y-%m").to_string()
}

/// One countable occurrence: a post by `group` of `tweet_type` on `date`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesEvent {
    pub group: String,
    pub tweet_type: TweetType,
    pub date: NaiveDate,
}

/// One daily series of the panel.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub group: String,
    pub tweet_type: TweetType,
    pub counts: Vec<u64>,
    /// Counts scaled to unit sum; all zeros for an all-zero series.
    pub normalized: Vec<f64>,
    /// Normalized values minus the same-type cross-group daily mean.
    pub residual: Vec<f64>,
}

/// Daily panel over the full `[start, end)` grid. Rows cover the cross
/// product of observed groups and both tweet types, zero-filled.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPanel {
    pub dates: Vec<NaiveDate>,
    pub rows: Vec<SeriesRow>,
}

/// Builds the zero-filled counts panel. Events outside the grid are
/// ignored with a warning; a window containing no event at all is an
/// error.
pub fn build_series(
    events: &[SeriesEvent],
    start: NaiveDate,
    end: NaiveDate,
) -> Result<TimeSeriesPanel, TemporalError> {
    if start >= end {
        return Err(TemporalError::EmptyWindow);
    }
    let dates: Vec<NaiveDate> = start.iter_days().take_while(|d| *d < end).collect();
    let index_of: BTreeMap<NaiveDate, usize> =
        dates.iter().enumerate().map(|(i, d)| (*d, i)).collect();

    let groups: BTreeSet<&str> = events.iter().map(|e| e.group.as_str()).collect();
    let mut rows: Vec<SeriesRow> = Vec::with_capacity(groups.len() * 2);
    let mut row_index: BTreeMap<(&str, TweetType), usize> = BTreeMap::new();
    for &group in &groups {
        for tweet_type in [TweetType::Original, TweetType::Retweet] {
            row_index.insert((group, tweet_type), rows.len());
            rows.push(SeriesRow {
                group: group.to_string(),
                tweet_type,
                counts: vec![0; dates.len()],
                normalized: Vec::new(),
                residual: Vec::new(),
            });
        }
    }

    let mut counted = 0usize;
    for event in events {
        match index_of.get(&event.date) {
            Some(&day) => {
                let row = row_index[&(event.group.as_str(), event.tweet_type)];
                rows[row].counts[day] += 1;
                counted += 1;
            }
            None => log::warn!("event on {} is outside the panel grid", event.date),
        }
    }
    if counted == 0 {
        return Err(TemporalError::EmptyWindow);
    }
    Ok(TimeSeriesPanel { dates, rows })
}

/// Scales each series to unit sum. All-zero series stay all zero.
pub fn normalize_series(panel: &mut TimeSeriesPanel) {
    for row in &mut panel.rows {
        let total: u64 = row.counts.iter().sum();
        row.normalized = if total == 0 {
            vec![0.0; row.counts.len()]
        } else {
            row.counts
                .iter()
                .map(|&c| c as f64 / total as f64)
                .collect()
        };
    }
}

/// Subtracts, per tweet type and day, the cross-group mean of the
/// normalized series. Residuals of one type sum to zero across groups on
/// every day. Normalizes first if needed.
pub fn remove_mean_trend(panel: &mut TimeSeriesPanel) {
    if panel.rows.iter().any(|r| r.normalized.is_empty()) {
        normalize_series(panel);
    }
    let days = panel.dates.len();
    for tweet_type in [TweetType::Original, TweetType::Retweet] {
        let members: Vec<usize> = panel
            .rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.tweet_type == tweet_type)
            .map(|(i, _)| i)
            .collect();
        if members.is_empty() {
            continue;
        }
        let mut mean = vec![0.0; days];
        for &i in &members {
            for (day, v) in panel.rows[i].normalized.iter().enumerate() {
                mean[day] += v;
            }
        }
        for m in &mut mean {
            *m /= members.len() as f64;
        }
        for &i in &members {
            panel.rows[i].residual = panel.rows[i]
                .normalized
                .iter()
                .zip(&mean)
                .map(|(v, m)| v - m)
                .collect();
        }
    }
}

/// Per-group series combining both tweet types: counts summed, then
/// normalized to unit sum. Returns `(group ids, series)` in group order.
pub fn combined_normalized(panel: &TimeSeriesPanel) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut by_group: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
    for row in &panel.rows {
        let sum = by_group
            .entry(row.group.as_str())
            .or_insert_with(|| vec![0; panel.dates.len()]);
        for (day, &c) in row.counts.iter().enumerate() {
            sum[day] += c;
        }
    }
    let mut ids = Vec::with_capacity(by_group.len());
    let mut series = Vec::with_capacity(by_group.len());
    for (group, counts) in by_group {
        let total: u64 = counts.iter().sum();
        let normalized: Vec<f64> = if total == 0 {
            vec![0.0; counts.len()]
        } else {
            counts.iter().map(|&c| c as f64 / total as f64).collect()
        };
        ids.push(group.to_string());
        series.push(normalized);
    }
    (ids, series)
}

/// Per-group residual series combining both tweet types: the mean of the
/// two per-type residual rows. Requires residuals to be present.
pub fn combined_residual(panel: &TimeSeriesPanel) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut by_group: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut members: BTreeMap<&str, usize> = BTreeMap::new();
    for row in &panel.rows {
        debug_assert_eq!(row.residual.len(), panel.dates.len());
        let sum = by_group
            .entry(row.group.as_str())
            .or_insert_with(|| vec![0.0; panel.dates.len()]);
        for (day, &v) in row.residual.iter().enumerate() {
            sum[day] += v;
        }
        *members.entry(row.group.as_str()).or_insert(0) += 1;
    }
    let mut ids = Vec::with_capacity(by_group.len());
    let mut series = Vec::with_capacity(by_group.len());
    for (group, mut sum) in by_group {
        let n = members[group] as f64;
        for v in &mut sum {
            *v /= n;
        }
        ids.push(group.to_string());
        series.push(sum);
    }
    (ids, series)
}

/// Trailing rolling mean. Windows of 0 or 1 return the input unchanged;
/// early positions average the shorter available prefix.
pub fn rolling_mean(series: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 {
        return series.to_vec();
    }
    series
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let lo = (i + 1).saturating_sub(window);
            let slice = &series[lo..=i];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(s: &str) -> DateTime<Utc> {
        DateTime::parse_from_rfc3339(s).unwrap().with_timezone(&Utc)
    }

    #[test]
    fn default_periods_partition_the_window() {
        let config = PeriodConfig::default();
        config.validate().unwrap();
        assert_eq!(
            config.names().collect::<Vec<_>>(),
            [
                "Pre",
                "Initial",
                "Northern",
                "National",
                "Prolongation",
                "Relaxing"
            ]
        );
        let (start, end) = config.window();
        assert_eq!(start, ts("2020-01-27T00:00:00Z"));
        assert_eq!(end, ts("2020-06-01T00:00:00Z"));
    }

    #[test]
    fn period_assignment_uses_half_open_intervals() {
        let config = PeriodConfig::default();
        let cases = [
            ("2020-01-27T00:00:00Z", "Pre"),
            ("2020-02-18T23:59:59Z", "Pre"),
            ("2020-02-19T00:00:00Z", "Initial"),
            ("2020-02-23T00:00:00Z", "Northern"),
            ("2020-03-10T00:00:00Z", "National"),
            ("2020-04-10T12:00:00Z", "National"),
            ("2020-04-11T00:00:00Z", "Prolongation"),
            ("2020-05-05T00:00:00Z", "Relaxing"),
            ("2020-05-31T23:59:59Z", "Relaxing"),
        ];
        for (at, expected) in cases {
            assert_eq!(config.assign_period(ts(at)).unwrap(), expected, "at {at}");
        }
        for at in ["2020-01-26T23:59:59Z", "2020-06-01T00:00:00Z"] {
            assert!(matches!(
                config.assign_period(ts(at)),
                Err(TemporalError::OutOfRange { .. })
            ));
        }
    }

    #[test]
    fn bad_period_configs_are_rejected() {
        let mut config = PeriodConfig::default();
        config.periods[1].start = config.periods[0].start;
        assert!(config.validate().is_err());

        let mut config = PeriodConfig::default();
        config.end = config.periods.last().unwrap().start;
        assert!(config.validate().is_err());

        let mut config = PeriodConfig::default();
        config.periods[2].name = "Pre".into();
        assert!(config.validate().is_err());

        let config = PeriodConfig {
            periods: vec![],
            end: date(2020, 6, 1),
        };
        assert!(config.validate().is_err());
    }

    fn event(group: &str, tweet_type: TweetType, day: u32) -> SeriesEvent {
        SeriesEvent {
            group: group.into(),
            tweet_type,
            date: date(2020, 3, day),
        }
    }

    #[test]
    fn panel_is_a_zero_filled_cross_product() {
        let events = vec![
            event("a", TweetType::Original, 1),
            event("a", TweetType::Original, 1),
            event("b", TweetType::Retweet, 3),
        ];
        let panel = build_series(&events, date(2020, 3, 1), date(2020, 3, 5)).unwrap();
        assert_eq!(panel.dates.len(), 4);
        // 2 groups × 2 types, ordered by (group, type).
        assert_eq!(panel.rows.len(), 4);
        assert_eq!(panel.rows[0].counts, [2, 0, 0, 0]);
        assert_eq!(panel.rows[1].counts, [0, 0, 0, 0]);
        assert_eq!(panel.rows[3].counts, [0, 0, 1, 0]);
    }

    #[test]
    fn empty_window_is_an_error() {
        assert!(matches!(
            build_series(&[], date(2020, 3, 1), date(2020, 3, 5)),
            Err(TemporalError::EmptyWindow)
        ));
        let off_grid = vec![event("a", TweetType::Original, 1)];
        assert!(matches!(
            build_series(&off_grid, date(2020, 4, 1), date(2020, 4, 5)),
            Err(TemporalError::EmptyWindow)
        ));
    }

    #[test]
    fn normalization_matches_hand_computation() {
        let events = vec![
            event("a", TweetType::Original, 1),
            event("a", TweetType::Original, 2),
            event("a", TweetType::Original, 2),
            event("a", TweetType::Original, 3),
        ];
        let mut panel = build_series(&events, date(2020, 3, 1), date(2020, 3, 5)).unwrap();
        normalize_series(&mut panel);
        assert_eq!(panel.rows[0].normalized, [0.25, 0.5, 0.25, 0.0]);
        // The zero-filled retweet row stays zero.
        assert_eq!(panel.rows[1].normalized, [0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn residuals_match_hand_computation() {
        // Two original-series rows: [0.5, 0.5] and [0.3, 0.7]; daily means
        // are 0.4 and 0.6, so residuals are ±0.1.
        let mut events = Vec::new();
        for _ in 0..5 {
            events.push(event("a", TweetType::Original, 1));
            events.push(event("a", TweetType::Original, 2));
        }
        for _ in 0..3 {
            events.push(event("b", TweetType::Original, 1));
        }
        for _ in 0..7 {
            events.push(event("b", TweetType::Original, 2));
        }
        let mut panel = build_series(&events, date(2020, 3, 1), date(2020, 3, 3)).unwrap();
        remove_mean_trend(&mut panel);
        let row_a = &panel.rows[0];
        let row_b = &panel.rows[2];
        assert!((row_a.residual[0] - 0.1).abs() < 1e-15);
        assert!((row_a.residual[1] + 0.1).abs() < 1e-15);
        assert!((row_b.residual[0] + 0.1).abs() < 1e-15);
        assert!((row_b.residual[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn combined_series_sum_types_before_normalizing() {
        let events = vec![
            event("a", TweetType::Original, 1),
            event("a", TweetType::Retweet, 2),
            event("a", TweetType::Retweet, 2),
            event("a", TweetType::Original, 3),
        ];
        let panel = build_series(&events, date(2020, 3, 1), date(2020, 3, 4)).unwrap();
        let (ids, series) = combined_normalized(&panel);
        assert_eq!(ids, ["a"]);
        assert_eq!(series[0], [0.25, 0.5, 0.25]);
    }

    #[test]
    fn rolling_mean_smooths_with_trailing_window() {
        let series = [1.0, 3.0, 5.0, 7.0];
        assert_eq!(rolling_mean(&series, 1), series.to_vec());
        assert_eq!(rolling_mean(&series, 2), vec![1.0, 2.0, 4.0, 6.0]);
        assert_eq!(rolling_mean(&[], 3), Vec::<f64>::new());
    }

    #[test]
    fn month_key_formats_year_month() {
        assert_eq!(month_key(ts("2020-03-10T08:00:00Z")), "2020-03");
    }

    proptest! {
        #[test]
        fn normalized_rows_sum_to_one(
            raw in proptest::collection::vec((0u32..3, 0u32..2, 0u32..10), 1..60)
        ) {
            let events: Vec<SeriesEvent> = raw
                .iter()
                .map(|&(g, t, d)| SeriesEvent {
                    group: format!("g{g}"),
                    tweet_type: if t == 0 { TweetType::Original } else { TweetType::Retweet },
                    date: date(2020, 3, 1 + d),
                })
                .collect();
            let mut panel = build_series(&events, date(2020, 3, 1), date(2020, 3, 11)).unwrap();
            remove_mean_trend(&mut panel);
            for row in &panel.rows {
                let total: u64 = row.counts.iter().sum();
                let sum: f64 = row.normalized.iter().sum();
                if total == 0 {
                    prop_assert_eq!(sum, 0.0);
                } else {
                    prop_assert!((sum - 1.0).abs() <= 1e-12);
                }
            }
            // Residuals of each type sum to zero across groups each day.
            for tweet_type in [TweetType::Original, TweetType::Retweet] {
                for day in 0..panel.dates.len() {
                    let sum: f64 = panel
                        .rows
                        .iter()
                        .filter(|r| r.tweet_type == tweet_type)
                        .map(|r| r.residual[day])
                        .sum();
                    prop_assert!(sum.abs() <= 1e-9);
                }
            }
        }
    }
}
