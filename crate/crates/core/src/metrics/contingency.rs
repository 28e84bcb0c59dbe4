use std::collections::HashMap;

use super::MetricsError;
use crate::annotation::ThreadPartition;

/// Co-membership counts between gold threads (rows) and predicted threads
/// (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<u64>>,
    /// Gold thread sizes (row sums).
    pub gold_sizes: Vec<u64>,
    /// Predicted thread sizes (column sums).
    pub pred_sizes: Vec<u64>,
    pub n: u64,
}

fn label_indices(p: &ThreadPartition) -> (HashMap<&str, usize>, usize) {
    let mut idx = HashMap::new();
    for label in p.assignment.values() {
        let next = idx.len();
        idx.entry(label.as_str()).or_insert(next);
    }
    let k = idx.len();
    (idx, k)
}

impl ContingencyTable {
    pub fn new(pred: &ThreadPartition, gold: &ThreadPartition) -> Result<Self, MetricsError> {
        if pred.assignment.len() != gold.assignment.len()
            || pred.assignment.keys().any(|k| !gold.assignment.contains_key(k))
        {
            return Err(MetricsError::UtteranceSetMismatch { scene_id: gold.scene_id.clone() });
        }
        let (gi, rows) = label_indices(gold);
        let (pi, cols) = label_indices(pred);
        let mut counts = vec![vec![0u64; cols]; rows];
        for (utt, g) in &gold.assignment {
            let p = &pred.assignment[utt];
            counts[gi[g.as_str()]][pi[p.as_str()]] += 1;
        }
        let gold_sizes: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let pred_sizes: Vec<u64> = (0..cols).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        let n = gold_sizes.iter().sum();
        Ok(Self { counts, gold_sizes, pred_sizes, n })
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().filter(|(_, &c)| c > 0).map(move |(j, &c)| (i, j, c)))
    }
}
