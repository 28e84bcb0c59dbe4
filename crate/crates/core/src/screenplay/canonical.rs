//! Canonical JSONL: one record per action line or dialogue utterance, in
//! document order.
//!
//! Scene headers, stage directions and cue extensions are not part of the
//! record schema; a read scene has an empty header.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Element, Scene, ScreenplayError, Utterance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Action,
    Dialogue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalRecord {
    pub title: String,
    pub scene_id: String,
    pub kind: RecordKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub turn_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub line_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub utt_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub speaker: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub position: Option<usize>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalDocument {
    pub title: String,
    pub scenes: Vec<Scene>,
}

pub fn canonical_records(scenes: &[Scene], title_slug: &str) -> Vec<CanonicalRecord> {
    let mut out = Vec::new();
    for scene in scenes {
        for element in &scene.elements {
            match element {
                Element::Action(a) => out.push(CanonicalRecord {
                    title: title_slug.to_string(),
                    scene_id: scene.scene_id.clone(),
                    kind: RecordKind::Action,
                    turn_id: None,
                    line_id: Some(a.action_id.clone()),
                    utt_id: None,
                    speaker: None,
                    position: None,
                    text: a.text.clone(),
                }),
                Element::Dialogue(t) => {
                    for u in t.lines.iter().flat_map(|l| l.sentences.iter()) {
                        out.push(CanonicalRecord {
                            title: title_slug.to_string(),
                            scene_id: scene.scene_id.clone(),
                            kind: RecordKind::Dialogue,
                            turn_id: Some(u.turn_id.clone()),
                            line_id: Some(u.line_id.clone()),
                            utt_id: Some(u.utt_id.clone()),
                            speaker: Some(u.speaker.clone()),
                            position: Some(u.position),
                            text: u.text.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn write_canonical<W: Write>(mut w: W, scenes: &[Scene], title_slug: &str) -> std::io::Result<()> {
    for record in canonical_records(scenes, title_slug) {
        serde_json::to_writer(&mut w, &record)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Serializes scenes to a canonical JSONL string (LF line endings).
pub fn emit_canonical(scenes: &[Scene], title_slug: &str) -> String {
    let mut buf = Vec::new();
    write_canonical(&mut buf, scenes, title_slug).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

fn bad(line: usize, message: impl Into<String>) -> ScreenplayError {
    ScreenplayError::BadCanonical { line, message: message.into() }
}

/// Reads a canonical JSONL stream back into documents, one per title, in
/// order of first appearance.
pub fn read_canonical<R: BufRead>(reader: R) -> Result<Vec<CanonicalDocument>, ScreenplayError> {
    let mut docs: Vec<CanonicalDocument> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| bad(line_no, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CanonicalRecord = serde_json::from_str(&line).map_err(|e| bad(line_no, e.to_string()))?;
        if docs.last().map(|d| d.title != rec.title).unwrap_or(true) {
            if docs.iter().any(|d| d.title == rec.title) {
                return Err(bad(line_no, format!("title {:?} is not contiguous", rec.title)));
            }
            docs.push(CanonicalDocument { title: rec.title.clone(), scenes: Vec::new() });
        }
        let doc = docs.last_mut().expect("pushed above");
        if doc.scenes.last().map(|s| s.scene_id != rec.scene_id).unwrap_or(true) {
            if doc.scenes.iter().any(|s| s.scene_id == rec.scene_id) {
                return Err(bad(line_no, format!("scene {:?} is not contiguous", rec.scene_id)));
            }
            doc.scenes.push(Scene::new(rec.scene_id.clone(), ""));
        }
        let scene = doc.scenes.last_mut().expect("pushed above");
        match rec.kind {
            RecordKind::Action => {
                let action_id = rec.line_id.ok_or_else(|| bad(line_no, "action record without line_id"))?;
                scene.push_action(action_id, rec.text);
            }
            RecordKind::Dialogue => push_utterance(scene, rec, line_no)?,
        }
    }
    Ok(docs)
}

fn push_utterance(scene: &mut Scene, rec: CanonicalRecord, line_no: usize) -> Result<(), ScreenplayError> {
    let missing = |f: &str| bad(line_no, format!("dialogue record without {f}"));
    let turn_id = rec.turn_id.ok_or_else(|| missing("turn_id"))?;
    let line_id = rec.line_id.ok_or_else(|| missing("line_id"))?;
    let utt_id = rec.utt_id.ok_or_else(|| missing("utt_id"))?;
    let speaker = rec.speaker.ok_or_else(|| missing("speaker"))?;
    let position = rec.position.ok_or_else(|| missing("position"))?;
    if position != scene.utterance_count() {
        return Err(bad(line_no, format!("position {position} out of sequence")));
    }
    scene.push_utterance(Utterance {
        utt_id,
        speaker,
        turn_id,
        line_id,
        scene_id: scene.scene_id.clone(),
        text: rec.text,
        position,
    });
    Ok(())
}
