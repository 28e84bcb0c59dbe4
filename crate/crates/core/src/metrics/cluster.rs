use super::assignment::max_weight_assignment;
use super::{ContingencyTable, MetricsError};
use crate::annotation::{GoldLinks, ThreadPartition};

/// Percentage of utterances whose predicted parent equals the gold parent.
pub fn link_accuracy(pred: &GoldLinks, gold: &GoldLinks) -> Result<f64, MetricsError> {
    if pred.parent.len() != gold.parent.len() {
        return Err(MetricsError::UtteranceSetMismatch { scene_id: gold.scene_id.clone() });
    }
    let mut correct = 0usize;
    for (utt, g) in &gold.parent {
        let p = pred
            .parent
            .get(utt)
            .ok_or_else(|| MetricsError::UtteranceSetMismatch { scene_id: gold.scene_id.clone() })?;
        if p == g {
            correct += 1;
        }
    }
    if gold.parent.is_empty() {
        return Ok(100.0);
    }
    Ok(100.0 * correct as f64 / gold.parent.len() as f64)
}

fn comb2(x: u64) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

fn identical(t: &ContingencyTable) -> bool {
    t.gold_sizes.len() == t.pred_sizes.len() && t.cells().all(|(i, j, c)| c == t.gold_sizes[i] && c == t.pred_sizes[j])
}

/// Adjusted Rand index, as a percentage. When the adjustment denominator is
/// zero (both partitions all singletons, or both a single cluster) the
/// result is 100 for equal partitions and 0 otherwise.
pub fn ari(pred: &ThreadPartition, gold: &ThreadPartition) -> Result<f64, MetricsError> {
    let t = ContingencyTable::new(pred, gold)?;
    Ok(ari_from_table(&t))
}

pub fn ari_from_table(t: &ContingencyTable) -> f64 {
    if t.n < 2 {
        return 100.0;
    }
    let index: u128 = t.cells().map(|(_, _, c)| comb2(c)).sum();
    let sum_a: u128 = t.gold_sizes.iter().map(|&a| comb2(a)).sum();
    let sum_b: u128 = t.pred_sizes.iter().map(|&b| comb2(b)).sum();
    let total = comb2(t.n);
    // (max - expected) * total, in integers, to detect the degenerate case exactly
    let denom_scaled = (sum_a + sum_b) * total - 2 * sum_a * sum_b;
    if denom_scaled == 0 {
        return if identical(t) { 100.0 } else { 0.0 };
    }
    let expected = sum_a as f64 * sum_b as f64 / total as f64;
    let max_index = 0.5 * (sum_a + sum_b) as f64;
    100.0 * (index as f64 - expected) / (max_index - expected)
}

/// Variation of information in nats: H(gold | pred) + H(pred | gold).
pub fn variation_of_information(t: &ContingencyTable) -> f64 {
    let n = t.n as f64;
    let mut vi = 0.0;
    for (i, j, c) in t.cells() {
        let c = c as f64;
        vi -= c / n * (c / t.pred_sizes[j] as f64).ln();
        vi -= c / n * (c / t.gold_sizes[i] as f64).ln();
    }
    vi
}

/// `100 * (1 - VI / ln n)`; 100 for a single utterance.
pub fn one_minus_vi(pred: &ThreadPartition, gold: &ThreadPartition) -> Result<f64, MetricsError> {
    let t = ContingencyTable::new(pred, gold)?;
    Ok(one_minus_vi_from_table(&t))
}

pub fn one_minus_vi_from_table(t: &ContingencyTable) -> f64 {
    if t.n < 2 {
        return 100.0;
    }
    100.0 * (1.0 - variation_of_information(t) / (t.n as f64).ln())
}

/// Size-weighted best F-score of each gold thread against any predicted
/// thread.
pub fn shen_f1(pred: &ThreadPartition, gold: &ThreadPartition) -> Result<f64, MetricsError> {
    let t = ContingencyTable::new(pred, gold)?;
    Ok(shen_f1_from_table(&t))
}

pub fn shen_f1_from_table(t: &ContingencyTable) -> f64 {
    if t.n == 0 {
        return 100.0;
    }
    let mut weighted = 0.0;
    for (i, row) in t.counts.iter().enumerate() {
        let a = t.gold_sizes[i] as f64;
        let best = row
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(j, &c)| {
                let c = c as f64;
                let precision = c / t.pred_sizes[j] as f64;
                let recall = c / a;
                2.0 * precision * recall / (precision + recall)
            })
            .fold(0.0, f64::max);
        weighted += a * best;
    }
    100.0 * weighted / t.n as f64
}

/// Share of utterances covered by the best one-to-one pairing of gold and
/// predicted threads.
pub fn one_to_one(pred: &ThreadPartition, gold: &ThreadPartition) -> Result<f64, MetricsError> {
    let t = ContingencyTable::new(pred, gold)?;
    Ok(one_to_one_from_table(&t))
}

pub fn one_to_one_from_table(t: &ContingencyTable) -> f64 {
    if t.n == 0 {
        return 100.0;
    }
    let weights: Vec<Vec<i64>> = t.counts.iter().map(|r| r.iter().map(|&c| c as i64).collect()).collect();
    let (matched, _) = max_weight_assignment(&weights);
    100.0 * matched as f64 / t.n as f64
}

/// F1 over threads reproduced exactly, singletons included.
pub fn exact_match_f1(pred: &ThreadPartition, gold: &ThreadPartition) -> Result<f64, MetricsError> {
    let t = ContingencyTable::new(pred, gold)?;
    Ok(exact_match_f1_from_table(&t))
}

pub fn exact_match_f1_from_table(t: &ContingencyTable) -> f64 {
    if t.n == 0 {
        return 100.0;
    }
    let matched = t.cells().filter(|&(i, j, c)| c == t.gold_sizes[i] && c == t.pred_sizes[j]).count() as f64;
    let precision = matched / t.pred_sizes.len() as f64;
    let recall = matched / t.gold_sizes.len() as f64;
    if precision + recall == 0.0 {
        return 0.0;
    }
    100.0 * 2.0 * precision * recall / (precision + recall)
}
