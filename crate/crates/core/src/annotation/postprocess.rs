use std::collections::HashMap;
use std::io::Write;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{
    links_to_partition, AnnotatedItem, AnnotationError, AnnotationTable, AnnotationTag, GoldLinks, LineReference,
    StartFlavor, ThreadPartition,
};
use crate::screenplay::{Element, Scene, Utterance};

/// A scene after post-processing: skipped sentences removed, ids renumbered,
/// and every surviving utterance linked to exactly one parent.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldScene {
    pub scene: Scene,
    pub links: GoldLinks,
    pub partition: ThreadPartition,
    /// Annotated start flavor per thread label, where the root carried one.
    pub start_flavor: IndexMap<String, StartFlavor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdMapping {
    pub scene_id: String,
    pub old_utt_id: String,
    pub new_utt_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnnotationWarning {
    /// An unadjudicated `X` tag, read as `-`.
    DiscussAsPrev { utt_id: String },
    /// `-` on the first surviving utterance of a scene, read as a thread start.
    PrevAtSceneStart { utt_id: String },
    /// The reply target was skipped; re-targeted to the nearest preceding survivor.
    RepairedReply { utt_id: String, target: String, repaired_to: String },
    /// A reply to a multi-sentence line resolved by the line-reference policy.
    LineReference { utt_id: String, target: String, resolved_to: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostProcessed {
    pub title: String,
    pub scenes: Vec<GoldScene>,
    pub id_map: Vec<IdMapping>,
    pub warnings: Vec<AnnotationWarning>,
}

fn numeric_line(line_id: &str) -> Option<usize> {
    line_id.strip_prefix('D').and_then(|n| n.parse().ok())
}

/// Assigns new dense dialogue-line ids (`D<base>`, `D<base+1>`, ...) to
/// every line with at least one surviving sentence. Returns old utterance
/// id -> (new line id, new utterance id) per scene.
fn renumber(table: &AnnotationTable) -> Vec<HashMap<String, (String, String)>> {
    let base = table.utterances().find_map(|u| numeric_line(&u.utterance.line_id)).unwrap_or(1);
    let mut next_line = base;
    let mut out = Vec::with_capacity(table.scenes.len());
    for scene in &table.scenes {
        let mut map = HashMap::new();
        let mut current: Option<(String, String, usize)> = None; // old line, new line, sentence counter
        for item in &scene.items {
            let AnnotatedItem::Utterance(u) = item else {
                current = None;
                continue;
            };
            if u.tag == AnnotationTag::Skip {
                continue;
            }
            let old_line = &u.utterance.line_id;
            match current.as_mut() {
                Some((old, _, k)) if old == old_line => *k += 1,
                _ => {
                    current = Some((old_line.clone(), format!("D{next_line}"), 1));
                    next_line += 1;
                }
            }
            let (_, new_line, k) = current.as_ref().expect("set above");
            map.insert(u.utterance.utt_id.clone(), (new_line.clone(), format!("{new_line}.{k}")));
        }
        out.push(map);
    }
    out
}

/// Turns tagged sentences into gold links and thread partitions.
pub fn postprocess(table: &AnnotationTable, line_reference: LineReference) -> Result<PostProcessed, AnnotationError> {
    let renumbered = renumber(table);
    let mut scenes = Vec::with_capacity(table.scenes.len());
    let mut id_map = Vec::new();
    let mut warnings = Vec::new();

    for (annotated, new_ids) in table.scenes.iter().zip(&renumbered) {
        let all: Vec<_> = annotated.utterances().collect();
        let index_of: HashMap<&str, usize> =
            all.iter().enumerate().map(|(i, u)| (u.utterance.utt_id.as_str(), i)).collect();
        let mut line_members: HashMap<&str, Vec<usize>> = HashMap::new();
        for (i, u) in all.iter().enumerate() {
            line_members.entry(u.utterance.line_id.as_str()).or_default().push(i);
        }
        // old index -> new position
        let mut new_pos: Vec<Option<usize>> = vec![None; all.len()];
        let mut survivors = Vec::new();
        for (i, u) in all.iter().enumerate() {
            if u.tag != AnnotationTag::Skip {
                new_pos[i] = Some(survivors.len());
                survivors.push(i);
            }
        }
        let new_id = |i: usize| new_ids[&all[i].utterance.utt_id].1.clone();

        let mut links = GoldLinks::new(annotated.scene_id.clone());
        let mut flavors: HashMap<String, StartFlavor> = HashMap::new();
        for (p, &i) in survivors.iter().enumerate() {
            let u = all[i];
            let me = new_id(i);
            let previous_or_self = |warnings: &mut Vec<AnnotationWarning>| {
                if p == 0 {
                    warnings.push(AnnotationWarning::PrevAtSceneStart { utt_id: me.clone() });
                    me.clone()
                } else {
                    new_id(survivors[p - 1])
                }
            };
            let parent = match &u.tag {
                AnnotationTag::ThreadStart(f) => {
                    flavors.insert(me.clone(), *f);
                    me.clone()
                }
                AnnotationTag::Prev => previous_or_self(&mut warnings),
                AnnotationTag::Discuss => {
                    warnings.push(AnnotationWarning::DiscussAsPrev { utt_id: me.clone() });
                    previous_or_self(&mut warnings)
                }
                AnnotationTag::ReplyTo(target) => {
                    let dangling = || AnnotationError::DanglingReply {
                        utt_id: u.utterance.utt_id.clone(),
                        target: target.clone(),
                    };
                    let resolved = match index_of.get(target.as_str()) {
                        Some(&t) => t,
                        None => {
                            let members = line_members.get(target.as_str()).ok_or_else(dangling)?;
                            let t = match line_reference {
                                LineReference::First => members[0],
                                LineReference::Last => *members.last().expect("non-empty"),
                            };
                            if members.len() > 1 {
                                warnings.push(AnnotationWarning::LineReference {
                                    utt_id: me.clone(),
                                    target: target.clone(),
                                    resolved_to: all[t].utterance.utt_id.clone(),
                                });
                            }
                            t
                        }
                    };
                    let survivor = match new_pos[resolved] {
                        Some(_) => resolved,
                        None => {
                            let repaired = (0..resolved).rev().find(|&j| new_pos[j].is_some()).ok_or_else(dangling)?;
                            warnings.push(AnnotationWarning::RepairedReply {
                                utt_id: me.clone(),
                                target: target.clone(),
                                repaired_to: new_id(repaired),
                            });
                            repaired
                        }
                    };
                    if new_pos[survivor].expect("survivor") >= p {
                        return Err(AnnotationError::ForwardReply {
                            utt_id: u.utterance.utt_id.clone(),
                            target: target.clone(),
                        });
                    }
                    new_id(survivor)
                }
                AnnotationTag::Skip => unreachable!("skipped sentences are not survivors"),
            };
            links.parent.insert(me, parent);
        }

        let mut scene = Scene::new(annotated.scene_id.clone(), "");
        for item in &annotated.items {
            match item {
                AnnotatedItem::Action(a) => scene.elements.push(Element::Action(a.clone())),
                AnnotatedItem::Utterance(u) => {
                    let i = index_of[u.utterance.utt_id.as_str()];
                    let Some(p) = new_pos[i] else { continue };
                    let (line_id, utt_id) = new_ids[&u.utterance.utt_id].clone();
                    id_map.push(IdMapping {
                        scene_id: annotated.scene_id.clone(),
                        old_utt_id: u.utterance.utt_id.clone(),
                        new_utt_id: utt_id.clone(),
                    });
                    scene.push_utterance(Utterance { utt_id, line_id, position: p, ..u.utterance.clone() });
                }
            }
        }

        let partition = links_to_partition(&links)?;
        let start_flavor = partition
            .assignment
            .iter()
            .filter_map(|(utt, label)| flavors.get(utt).map(|f| (label.clone(), *f)))
            .collect();
        scenes.push(GoldScene { scene, links, partition, start_flavor });
    }
    Ok(PostProcessed { title: table.title.clone(), scenes, id_map, warnings })
}

/// Re-expresses links as annotation tags: `T` (or the recorded flavor) for
/// thread starts, `-` for replies to the previous utterance, `D<id>` otherwise.
pub fn links_to_tags(gold: &GoldScene) -> Vec<(String, AnnotationTag)> {
    let mut out = Vec::with_capacity(gold.links.len());
    let mut previous: Option<&str> = None;
    for (utt, parent) in &gold.links.parent {
        let tag = if utt == parent {
            let label = &gold.partition.assignment[utt];
            AnnotationTag::ThreadStart(gold.start_flavor.get(label).copied().unwrap_or(StartFlavor::T))
        } else if Some(parent.as_str()) == previous {
            AnnotationTag::Prev
        } else {
            AnnotationTag::ReplyTo(parent.clone())
        };
        out.push((utt.clone(), tag));
        previous = Some(utt);
    }
    out
}

/// Writes gold scenes back out as a one-sentence-per-row TSV with a
/// `sentence` column, readable with `ColumnMap { sentence: Some("sentence") }`.
pub fn write_annotations<W: Write>(mut w: W, scenes: &[GoldScene]) -> std::io::Result<()> {
    writeln!(w, "scene_id\tturn_id\tline_id\tsentence\tspeaker\ttext\ttags")?;
    for gold in scenes {
        let tags: HashMap<String, AnnotationTag> = links_to_tags(gold).into_iter().collect();
        for element in &gold.scene.elements {
            match element {
                Element::Action(a) => writeln!(w, "{}\t\t{}\t\t\t{}\t", gold.scene.scene_id, a.action_id, a.text)?,
                Element::Dialogue(t) => {
                    for line in &t.lines {
                        for (k, u) in line.sentences.iter().enumerate() {
                            writeln!(
                                w,
                                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                                gold.scene.scene_id,
                                u.turn_id,
                                u.line_id,
                                k + 1,
                                u.speaker,
                                u.text,
                                tags[&u.utt_id]
                            )?;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}
