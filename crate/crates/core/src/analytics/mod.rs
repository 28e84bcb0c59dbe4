//! Corpus studies over thread labelings: thread length by era and who
//! starts threads relative to how much they speak.

mod metadata;
mod plot;

pub use metadata::{ingest_metadata, Gender, TitleMetadata};
pub use plot::{read_era_csv, read_floor_csv, write_era_csv, write_floor_csv, ERA_HEADER, FLOOR_HEADER};

use std::collections::{BTreeMap, HashSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::ThreadPartition;
use crate::metrics::{bootstrap_ci, MetricsError};
use crate::screenplay::Scene;
use crate::threading::thread_stats;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("title {title} has no metadata year")]
    MissingYear { title: String },
    #[error("title {title}: character {character} listed twice")]
    DuplicateCharacter { title: String, character: String },
    #[error("row {row}: bad gender code {value:?}")]
    BadGenderCode { row: usize, value: String },
    #[error("row {row}: bad release year {value:?}")]
    BadYear { row: usize, value: String },
    #[error("title {title} appears with different years")]
    InconsistentYear { title: String },
    #[error("column {0:?} not found")]
    ColumnMissing(String),
    #[error("title {title} has no threads")]
    NoThreads { title: String },
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Bootstrap(#[from] MetricsError),
}

/// Where the thread labels came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Provenance {
    Gold,
    Predicted { model: String },
}

/// One title's scenes with a thread labeling for each.
#[derive(Debug, Clone)]
pub struct TitleThreads {
    pub title_slug: String,
    pub scenes: Vec<(Scene, ThreadPartition)>,
}

/// Resampling settings shared by both analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapSettings {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for BootstrapSettings {
    fn default() -> Self {
        Self { resamples: crate::metrics::DEFAULT_RESAMPLES, seed: 0 }
    }
}

/// 95% interval of a statistic over titles; a single title gives a
/// degenerate interval at the point.
fn interval<U: Sync>(
    units: &[U],
    stat: impl Fn(&[&U]) -> f64 + Sync,
    bs: BootstrapSettings,
    salt: i64,
) -> Result<(f64, f64, f64), AnalyticsError> {
    if units.len() < 2 {
        let refs: Vec<&U> = units.iter().collect();
        let p = stat(&refs);
        return Ok((p, p, p));
    }
    let ci = bootstrap_ci(units, stat, bs.resamples, bs.seed.wrapping_add(salt as u64))?;
    Ok((ci.point, ci.lo, ci.hi))
}

fn sorted_titles(corpus: &[TitleThreads]) -> Vec<&TitleThreads> {
    let mut titles: Vec<&TitleThreads> = corpus.iter().collect();
    titles.sort_by(|a, b| a.title_slug.cmp(&b.title_slug));
    titles
}

fn year_of(meta: &IndexMap<String, TitleMetadata>, title: &str) -> Result<i32, AnalyticsError> {
    meta.get(title).map(|m| m.release_year).ok_or_else(|| AnalyticsError::MissingYear { title: title.to_string() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EraBucket {
    pub start_year: i32,
    pub mean_thread_length: f64,
    pub lo: f64,
    pub hi: f64,
    pub n_movies: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EraReport {
    pub provenance: Provenance,
    pub bucket_width: i32,
    pub buckets: Vec<EraBucket>,
    /// Mean utterances per thread of each title.
    pub title_means: BTreeMap<String, f64>,
}

/// Mean utterances per thread over all threads of a title.
pub fn title_mean_thread_length(title: &TitleThreads) -> Result<f64, AnalyticsError> {
    let (mut utterances, mut threads) = (0usize, 0usize);
    for (scene, partition) in &title.scenes {
        let st = thread_stats(partition, scene);
        utterances += st.utterance_count();
        threads += st.threads.len();
    }
    if threads == 0 {
        return Err(AnalyticsError::NoThreads { title: title.title_slug.clone() });
    }
    Ok(utterances as f64 / threads as f64)
}

/// Per bucket of `bucket_width` years, the mean of title means with a
/// bootstrap interval over the bucket's titles.
pub fn thread_length_by_era(
    corpus: &[TitleThreads],
    meta: &IndexMap<String, TitleMetadata>,
    bucket_width: i32,
    provenance: Provenance,
    bs: BootstrapSettings,
) -> Result<EraReport, AnalyticsError> {
    let mut groups: BTreeMap<i32, Vec<f64>> = BTreeMap::new();
    let mut title_means = BTreeMap::new();
    for t in sorted_titles(corpus) {
        let year = year_of(meta, &t.title_slug)?;
        let mean = title_mean_thread_length(t)?;
        title_means.insert(t.title_slug.clone(), mean);
        groups.entry(year - year.rem_euclid(bucket_width)).or_default().push(mean);
    }
    let mut buckets = Vec::new();
    for (start, means) in groups {
        let stat = |xs: &[&f64]| xs.iter().copied().sum::<f64>() / xs.len() as f64;
        let (point, lo, hi) = interval(&means, stat, bs, start as i64)?;
        buckets.push(EraBucket { start_year: start, mean_thread_length: point, lo, hi, n_movies: means.len() });
    }
    Ok(EraReport { provenance, bucket_width, buckets, title_means })
}

/// Thread starts and dialogue lines by speaker gender.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GenderCounts {
    pub threads_women: u64,
    pub threads_men: u64,
    pub threads_unknown: u64,
    pub lines_women: u64,
    pub lines_men: u64,
    pub lines_unknown: u64,
}

impl GenderCounts {
    fn add(&mut self, o: &GenderCounts) {
        self.threads_women += o.threads_women;
        self.threads_men += o.threads_men;
        self.threads_unknown += o.threads_unknown;
        self.lines_women += o.lines_women;
        self.lines_men += o.lines_men;
        self.lines_unknown += o.lines_unknown;
    }

    pub fn total_threads(&self) -> u64 {
        self.threads_women + self.threads_men + self.threads_unknown
    }

    /// Women's share of known-gender thread starts, in percent.
    pub fn pct_started(&self) -> Option<f64> {
        let d = self.threads_women + self.threads_men;
        (d > 0).then(|| 100.0 * self.threads_women as f64 / d as f64)
    }

    /// Women's share of known-gender dialogue lines, in percent.
    pub fn pct_lines(&self) -> Option<f64> {
        let d = self.lines_women + self.lines_men;
        (d > 0).then(|| 100.0 * self.lines_women as f64 / d as f64)
    }

    pub fn delta(&self) -> Option<f64> {
        Some(self.pct_started()? - self.pct_lines()?)
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a GenderCounts>) -> GenderCounts {
        let mut total = GenderCounts::default();
        for c in items {
            total.add(c);
        }
        total
    }
}

/// Counts for one title. A thread is started by the speaker of its earliest
/// utterance; a dialogue line counts once for its speaker.
pub fn title_gender_counts(title: &TitleThreads, meta: &TitleMetadata) -> GenderCounts {
    let mut c = GenderCounts::default();
    for (scene, partition) in &title.scenes {
        for t in thread_stats(partition, scene).threads {
            match meta.gender_of(&t.start_speaker) {
                Gender::Woman => c.threads_women += 1,
                Gender::Man => c.threads_men += 1,
                Gender::Unknown => c.threads_unknown += 1,
            }
        }
        let mut seen = HashSet::new();
        for u in scene.utterances() {
            if !seen.insert(u.line_id.as_str()) {
                continue;
            }
            match meta.gender_of(&u.speaker) {
                Gender::Woman => c.lines_women += 1,
                Gender::Man => c.lines_men += 1,
                Gender::Unknown => c.lines_unknown += 1,
            }
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorClaimRecord {
    pub year: i32,
    pub pct_threads_started_by_women: f64,
    pub pct_lines_by_women: f64,
    /// `pct_threads_started_by_women - pct_lines_by_women`.
    pub delta: f64,
    pub lo: f64,
    pub hi: f64,
    pub n_titles: usize,
    pub counts: GenderCounts,
}

/// All years pooled, with the delta interval given both in percentage points
/// and as a fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledFloorClaim {
    pub pct_threads_started_by_women: f64,
    pub pct_lines_by_women: f64,
    pub delta: f64,
    pub lo: f64,
    pub hi: f64,
    pub delta_fraction: f64,
    pub lo_fraction: f64,
    pub hi_fraction: f64,
    pub n_titles: usize,
    pub counts: GenderCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticsWarning {
    /// Titles exist for the year but none of their threads or lines has a
    /// known-gender speaker.
    EmptyYear { year: i32, titles: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorReport {
    pub provenance: Provenance,
    pub min_year: i32,
    pub records: Vec<FloorClaimRecord>,
    pub pooled: Option<PooledFloorClaim>,
    pub warnings: Vec<AnalyticsWarning>,
}

pub const DEFAULT_MIN_YEAR: i32 = 1980;

/// Pooled delta of a resample; resamples with no known-gender threads or
/// lines fall back to `fallback`.
fn pooled_delta(units: &[&GenderCounts], fallback: f64) -> f64 {
    GenderCounts::sum(units.iter().copied()).delta().unwrap_or(fallback)
}

/// Per release year from `min_year` on: women's share of thread starts, of
/// dialogue lines, and their difference with a bootstrap interval over the
/// year's titles. Also the same figures pooled over all kept titles.
pub fn floor_claiming(
    corpus: &[TitleThreads],
    meta: &IndexMap<String, TitleMetadata>,
    min_year: i32,
    provenance: Provenance,
    bs: BootstrapSettings,
) -> Result<FloorReport, AnalyticsError> {
    let mut by_year: BTreeMap<i32, Vec<GenderCounts>> = BTreeMap::new();
    for t in sorted_titles(corpus) {
        let year = year_of(meta, &t.title_slug)?;
        if year < min_year {
            continue;
        }
        by_year.entry(year).or_default().push(title_gender_counts(t, &meta[&t.title_slug]));
    }
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for (&year, titles) in &by_year {
        let total = GenderCounts::sum(titles);
        let (Some(pct_started), Some(pct_lines)) = (total.pct_started(), total.pct_lines()) else {
            warnings.push(AnalyticsWarning::EmptyYear { year, titles: titles.len() });
            continue;
        };
        let delta = pct_started - pct_lines;
        let (_, lo, hi) = interval(titles, |u| pooled_delta(u, delta), bs, year as i64)?;
        records.push(FloorClaimRecord {
            year,
            pct_threads_started_by_women: pct_started,
            pct_lines_by_women: pct_lines,
            delta,
            lo,
            hi,
            n_titles: titles.len(),
            counts: total,
        });
    }
    let all: Vec<GenderCounts> = by_year.into_values().flatten().collect();
    let total = GenderCounts::sum(&all);
    let pooled = match (total.pct_started(), total.pct_lines()) {
        (Some(s), Some(l)) => {
            let delta = s - l;
            let (_, lo, hi) = interval(&all, |u| pooled_delta(u, delta), bs, -1)?;
            Some(PooledFloorClaim {
                pct_threads_started_by_women: s,
                pct_lines_by_women: l,
                delta,
                lo,
                hi,
                delta_fraction: delta / 100.0,
                lo_fraction: lo / 100.0,
                hi_fraction: hi / 100.0,
                n_titles: all.len(),
                counts: total,
            })
        }
        _ => None,
    };
    Ok(FloorReport { provenance, min_year, records, pooled, warnings })
}
