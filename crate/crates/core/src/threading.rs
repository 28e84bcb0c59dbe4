//! Thread-level utilities shared by evaluation and analytics.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::annotation::{GoldLinks, ThreadPartition};
use crate::screenplay::Scene;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "utt_id")]
pub enum Violation {
    /// A scene utterance with no parent entry.
    Orphan(String),
    /// A parent that comes after its child.
    ForwardReply(String),
    /// A parent id that is not an utterance of the scene.
    UnknownParent(String),
    /// A link entry for something that is not an utterance of the scene.
    Extraneous(String),
    /// Following parents from this utterance never reaches a self-link.
    Cycle(String),
}

/// Checks that the links form a forest over exactly the scene's utterances
/// with every parent at or before its child.
pub fn validate_links(links: &GoldLinks, scene: &Scene) -> Vec<Violation> {
    let position: HashMap<&str, usize> = scene.utterances().map(|u| (u.utt_id.as_str(), u.position)).collect();
    let mut out = Vec::new();
    for u in scene.utterances() {
        if !links.parent.contains_key(&u.utt_id) {
            out.push(Violation::Orphan(u.utt_id.clone()));
        }
    }
    for (child, parent) in &links.parent {
        let Some(&c) = position.get(child.as_str()) else {
            out.push(Violation::Extraneous(child.clone()));
            continue;
        };
        match position.get(parent.as_str()) {
            None => out.push(Violation::UnknownParent(child.clone())),
            Some(&p) if p > c => out.push(Violation::ForwardReply(child.clone())),
            Some(_) => {}
        }
    }
    // only reachable when forward links exist, since backward-only chains
    // strictly decrease in position
    for child in links.parent.keys() {
        let mut cur = child.as_str();
        let mut steps = 0;
        while let Some(p) = links.parent.get(cur) {
            if p == cur {
                break;
            }
            steps += 1;
            if steps > links.parent.len() {
                out.push(Violation::Cycle(child.clone()));
                break;
            }
            cur = p;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreadSummary {
    pub label: String,
    pub size: usize,
    pub start_utt_id: String,
    pub start_speaker: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreadStats {
    pub scene_id: String,
    pub threads: Vec<ThreadSummary>,
    pub mean_length: f64,
}

impl ThreadStats {
    pub fn utterance_count(&self) -> usize {
        self.threads.iter().map(|t| t.size).sum()
    }
}

/// Sizes and starting utterances of each thread. A thread starts at its
/// minimum-position member, also for crossing or resumed threads.
pub fn thread_stats(partition: &ThreadPartition, scene: &Scene) -> ThreadStats {
    let mut threads: Vec<ThreadSummary> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for u in scene.utterances() {
        let Some(label) = partition.assignment.get(&u.utt_id) else {
            continue;
        };
        match index.get(label.as_str()) {
            Some(&i) => threads[i].size += 1,
            None => {
                index.insert(label.as_str(), threads.len());
                threads.push(ThreadSummary {
                    label: label.clone(),
                    size: 1,
                    start_utt_id: u.utt_id.clone(),
                    start_speaker: u.speaker.clone(),
                });
            }
        }
    }
    let total: usize = threads.iter().map(|t| t.size).sum();
    let mean_length = if threads.is_empty() { 0.0 } else { total as f64 / threads.len() as f64 };
    ThreadStats { scene_id: scene.scene_id.clone(), threads, mean_length }
}
