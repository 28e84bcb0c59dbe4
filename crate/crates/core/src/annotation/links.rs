use std::collections::HashMap;
use std::io::{BufRead, Write};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::AnnotationError;

/// Reply-to links for one scene. Keys are in utterance position order; a
/// self-link marks a thread start.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLinks {
    pub scene_id: String,
    pub parent: IndexMap<String, String>,
}

/// Thread labels `T1`, `T2`, ... in order of each thread's first member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreadPartition {
    pub scene_id: String,
    pub assignment: IndexMap<String, String>,
}

impl GoldLinks {
    pub fn new(scene_id: impl Into<String>) -> Self {
        Self { scene_id: scene_id.into(), parent: IndexMap::new() }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn is_thread_start(&self, utt_id: &str) -> bool {
        self.parent.get(utt_id).map(|p| p == utt_id).unwrap_or(false)
    }
}

impl ThreadPartition {
    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn thread_count(&self) -> usize {
        let mut seen: Vec<&str> = self.assignment.values().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Threads as lists of utterance ids, ordered by first member.
    pub fn threads(&self) -> Vec<(String, Vec<String>)> {
        let mut out: IndexMap<&str, Vec<String>> = IndexMap::new();
        for (utt, label) in &self.assignment {
            out.entry(label.as_str()).or_default().push(utt.clone());
        }
        out.into_iter().map(|(l, m)| (l.to_string(), m)).collect()
    }

    /// Builds a partition from arbitrary cluster keys, relabeling them
    /// `T1..Tk` by first appearance.
    pub fn from_clusters<K: std::hash::Hash + Eq>(
        scene_id: impl Into<String>,
        items: impl IntoIterator<Item = (String, K)>,
    ) -> Self {
        let mut labels: HashMap<K, usize> = HashMap::new();
        let mut assignment = IndexMap::new();
        for (utt, key) in items {
            let next = labels.len() + 1;
            let n = *labels.entry(key).or_insert(next);
            assignment.insert(utt, format!("T{n}"));
        }
        Self { scene_id: scene_id.into(), assignment }
    }
}

/// Transitive closure of the links: utterances connected in the undirected
/// link graph share a thread.
pub fn links_to_partition(links: &GoldLinks) -> Result<ThreadPartition, AnnotationError> {
    let n = links.parent.len();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for start in 0..n {
        let mut path = Vec::new();
        let mut cur = start;
        let root = loop {
            if let Some(r) = root_of[cur] {
                break r;
            }
            let (utt, parent) = links.parent.get_index(cur).expect("index in range");
            let Some(p) = links.parent.get_index_of(parent.as_str()) else {
                return Err(AnnotationError::NotAForest { utt_id: utt.clone() });
            };
            if p == cur {
                break cur;
            }
            path.push(cur);
            if path.len() > n {
                return Err(AnnotationError::NotAForest { utt_id: utt.clone() });
            }
            cur = p;
        };
        for i in path {
            root_of[i] = Some(root);
        }
        root_of[start] = Some(root);
    }
    Ok(ThreadPartition::from_clusters(
        links.scene_id.clone(),
        links.parent.keys().cloned().zip(root_of.into_iter().map(|r| r.expect("resolved"))),
    ))
}

/// Links each utterance to the previous member of its thread; the first
/// member of each thread self-links.
pub fn partition_to_links_previousstyle(partition: &ThreadPartition) -> GoldLinks {
    let mut last: HashMap<&str, &str> = HashMap::new();
    let mut links = GoldLinks::new(partition.scene_id.clone());
    for (utt, label) in &partition.assignment {
        let parent = last.insert(label.as_str(), utt.as_str()).unwrap_or(utt.as_str());
        links.parent.insert(utt.clone(), parent.to_string());
    }
    links
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkRecord {
    pub scene_id: String,
    pub utt_id: String,
    pub parent_id: String,
    pub thread_label: String,
}

/// Writes `{scene_id, utt_id, parent_id, thread_label}` records, one line per
/// utterance.
pub fn write_links<W: Write>(mut w: W, scenes: &[GoldLinks]) -> Result<(), AnnotationError> {
    for links in scenes {
        let partition = links_to_partition(links)?;
        for (utt, parent) in &links.parent {
            let record = LinkRecord {
                scene_id: links.scene_id.clone(),
                utt_id: utt.clone(),
                parent_id: parent.clone(),
                thread_label: partition.assignment[utt].clone(),
            };
            serde_json::to_writer(&mut w, &record).map_err(|e| AnnotationError::Io(e.to_string()))?;
            w.write_all(b"\n").map_err(|e| AnnotationError::Io(e.to_string()))?;
        }
    }
    Ok(())
}

pub fn read_links<R: BufRead>(reader: R) -> Result<Vec<GoldLinks>, AnnotationError> {
    let mut out: Vec<GoldLinks> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| AnnotationError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: LinkRecord =
            serde_json::from_str(&line).map_err(|e| AnnotationError::Io(format!("links line {}: {e}", idx + 1)))?;
        if out.last().map(|l| l.scene_id != rec.scene_id).unwrap_or(true) {
            out.push(GoldLinks::new(rec.scene_id.clone()));
        }
        let links = out.last_mut().expect("pushed above");
        if links.parent.insert(rec.utt_id.clone(), rec.parent_id).is_some() {
            return Err(AnnotationError::Io(format!("duplicate utterance {} in links", rec.utt_id)));
        }
    }
    Ok(out)
}
