//! Link and clustering metrics, corpus aggregation, agreement and bootstrap
//! confidence intervals.

mod assignment;
mod bootstrap;
mod cluster;
mod contingency;

pub use assignment::max_weight_assignment;
pub use bootstrap::{bootstrap_ci, percentile, ConfidenceInterval, DEFAULT_RESAMPLES, MIN_RESAMPLES};
pub use cluster::{
    ari, ari_from_table, exact_match_f1, exact_match_f1_from_table, link_accuracy, one_minus_vi,
    one_minus_vi_from_table, one_to_one, one_to_one_from_table, shen_f1, shen_f1_from_table, variation_of_information,
};
pub use contingency::ContingencyTable;

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{links_to_partition, AnnotationError, GoldLinks, ThreadPartition};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("scene {scene_id}: prediction and gold cover different utterances")]
    UtteranceSetMismatch { scene_id: String },
    #[error("bootstrap needs at least 2 scenes, got {0}")]
    TooFewUnits(usize),
    #[error("bootstrap needs at least 100 resamples, got {0}")]
    InvalidResamples(usize),
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
    #[error("writing report: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    LinkAccuracy,
    Ari,
    OneMinusVi,
    ShenF1,
    OneToOne,
    ExactMatchF1,
}

impl Metric {
    pub const ALL: [Metric; 6] =
        [Metric::LinkAccuracy, Metric::Ari, Metric::OneMinusVi, Metric::ShenF1, Metric::OneToOne, Metric::ExactMatchF1];

    pub fn name(self) -> &'static str {
        match self {
            Metric::LinkAccuracy => "link_accuracy",
            Metric::Ari => "ari",
            Metric::OneMinusVi => "one_minus_vi",
            Metric::ShenF1 => "shen_f1",
            Metric::OneToOne => "one_to_one",
            Metric::ExactMatchF1 => "exact_match_f1",
        }
    }

    fn index(self) -> usize {
        Metric::ALL.iter().position(|&m| m == self).unwrap()
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One scene's predicted and gold structure.
#[derive(Debug, Clone)]
pub struct EvalUnit {
    pub pred_links: GoldLinks,
    pub gold_links: GoldLinks,
    pub pred: ThreadPartition,
    pub gold: ThreadPartition,
}

impl EvalUnit {
    pub fn from_links(pred_links: GoldLinks, gold_links: GoldLinks) -> Result<Self, MetricsError> {
        let pred = links_to_partition(&pred_links)?;
        let gold = links_to_partition(&gold_links)?;
        Ok(Self { pred_links, gold_links, pred, gold })
    }

    /// The same scene with prediction and gold exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            pred_links: self.gold_links.clone(),
            gold_links: self.pred_links.clone(),
            pred: self.gold.clone(),
            gold: self.pred.clone(),
        }
    }
}

/// All six metric values for one scene, with its utterance count as weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneScores {
    pub n: usize,
    pub values: [f64; 6],
}

impl SceneScores {
    pub fn get(&self, m: Metric) -> f64 {
        self.values[m.index()]
    }
}

pub fn score_scene(unit: &EvalUnit) -> Result<SceneScores, MetricsError> {
    let table = ContingencyTable::new(&unit.pred, &unit.gold)?;
    let values = [
        link_accuracy(&unit.pred_links, &unit.gold_links)?,
        ari_from_table(&table),
        one_minus_vi_from_table(&table),
        shen_f1_from_table(&table),
        one_to_one_from_table(&table),
        exact_match_f1_from_table(&table),
    ];
    Ok(SceneScores { n: table.n as usize, values })
}

/// Utterance-weighted mean of per-scene values.
pub fn micro_average(scores: &[&SceneScores], metric: Metric) -> f64 {
    let total: usize = scores.iter().map(|s| s.n).sum();
    if total == 0 {
        return 100.0;
    }
    scores.iter().map(|s| s.n as f64 * s.get(metric)).sum::<f64>() / total as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub point: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub link_accuracy: MetricValue,
    pub ari: MetricValue,
    pub one_minus_vi: MetricValue,
    pub shen_f1: MetricValue,
    pub one_to_one: MetricValue,
    pub exact_match_f1: MetricValue,
    pub scenes: usize,
    pub utterances: usize,
}

impl MetricsReport {
    pub fn get(&self, m: Metric) -> MetricValue {
        match m {
            Metric::LinkAccuracy => self.link_accuracy,
            Metric::Ari => self.ari,
            Metric::OneMinusVi => self.one_minus_vi,
            Metric::ShenF1 => self.shen_f1,
            Metric::OneToOne => self.one_to_one,
            Metric::ExactMatchF1 => self.exact_match_f1,
        }
    }

    fn from_values(values: [MetricValue; 6], scenes: usize, utterances: usize) -> Self {
        let [link_accuracy, ari, one_minus_vi, shen_f1, one_to_one, exact_match_f1] = values;
        Self { link_accuracy, ari, one_minus_vi, shen_f1, one_to_one, exact_match_f1, scenes, utterances }
    }

    /// `metric,point,lo,hi` rows with two decimals; missing bounds stay empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), MetricsError> {
        writeln!(w, "metric,point,lo,hi")?;
        let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_default();
        for m in Metric::ALL {
            let v = self.get(m);
            writeln!(w, "{},{:.2},{},{}", m, v.point, fmt_opt(v.lo), fmt_opt(v.hi))?;
        }
        Ok(())
    }

    /// Aligned plain-text table for terminals.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<16}{:>8}{:>8}{:>8}\n", "metric", "point", "lo", "hi");
        let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
        for m in Metric::ALL {
            let v = self.get(m);
            out.push_str(&format!("{:<16}{:>8.2}{:>8}{:>8}\n", m.name(), v.point, fmt_opt(v.lo), fmt_opt(v.hi)));
        }
        out
    }
}

/// Corpus-level report: per-scene metrics micro-averaged by utterance count,
/// with bootstrap intervals over scenes when `resamples` is given.
pub fn evaluate(units: &[EvalUnit], resamples: Option<usize>, seed: u64) -> Result<MetricsReport, MetricsError> {
    let scores = units.iter().map(score_scene).collect::<Result<Vec<_>, _>>()?;
    report_from_scores(&scores, resamples, seed)
}

pub fn report_from_scores(
    scores: &[SceneScores],
    resamples: Option<usize>,
    seed: u64,
) -> Result<MetricsReport, MetricsError> {
    let refs: Vec<&SceneScores> = scores.iter().collect();
    let mut values = [MetricValue { point: 0.0, lo: None, hi: None }; 6];
    for m in Metric::ALL {
        values[m.index()] = match resamples {
            Some(r) => {
                let ci = bootstrap_ci(scores, |s| micro_average(s, m), r, seed)?;
                MetricValue { point: ci.point, lo: Some(ci.lo), hi: Some(ci.hi) }
            }
            None => MetricValue { point: micro_average(&refs, m), lo: None, hi: None },
        };
    }
    Ok(MetricsReport::from_values(values, scores.len(), scores.iter().map(|s| s.n).sum()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    /// Annotator A as reference, B as candidate.
    pub a_as_gold: MetricsReport,
    /// Annotator B as reference, A as candidate.
    pub b_as_gold: MetricsReport,
    /// Shen F1 averaged over both directions.
    pub shen_f1_mean: f64,
}

/// Agreement between two annotations of the same scenes, given as units with
/// A in the gold slot and B in the pred slot.
pub fn agreement(units: &[EvalUnit], resamples: Option<usize>, seed: u64) -> Result<AgreementReport, MetricsError> {
    let a_as_gold = evaluate(units, resamples, seed)?;
    let swapped: Vec<EvalUnit> = units.iter().map(EvalUnit::swapped).collect();
    let b_as_gold = evaluate(&swapped, resamples, seed)?;
    let shen_f1_mean = 0.5 * (a_as_gold.shen_f1.point + b_as_gold.shen_f1.point);
    Ok(AgreementReport { a_as_gold, b_as_gold, shen_f1_mean })
}
