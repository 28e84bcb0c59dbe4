use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{AnnotationError, AnnotationTag};
use crate::screenplay::{normalize_speaker, segment_sentences, ActionLine, Utterance};

/// Header names for each field of an annotation table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMap {
    pub scene_id: String,
    pub turn_id: String,
    pub line_id: String,
    pub speaker: String,
    pub text: String,
    pub tags: String,
    /// When set, every row holds one sentence and this column carries its
    /// 1-based index within the line.
    pub sentence: Option<String>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            scene_id: "scene_id".into(),
            turn_id: "turn_id".into(),
            line_id: "line_id".into(),
            speaker: "speaker".into(),
            text: "text".into(),
            tags: "tags".into(),
            sentence: None,
        }
    }
}

/// Which sentence a reply to a bare line id (`D45`) points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineReference {
    First,
    #[default]
    Last,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReaderConfig {
    pub columns: ColumnMap,
    pub delimiter: u8,
    pub tag_delimiter: String,
    pub line_reference: LineReference,
}

impl Default for ReaderConfig {
    fn default() -> Self {
        Self {
            columns: ColumnMap::default(),
            delimiter: b'\t',
            tag_delimiter: "|".into(),
            line_reference: LineReference::Last,
        }
    }
}

impl ReaderConfig {
    pub fn csv() -> Self {
        Self { delimiter: b',', ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedUtterance {
    pub utterance: Utterance,
    pub tag: AnnotationTag,
    /// 1-based data row the sentence came from.
    pub row: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnnotatedItem {
    Utterance(AnnotatedUtterance),
    Action(ActionLine),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedScene {
    pub scene_id: String,
    pub items: Vec<AnnotatedItem>,
}

impl AnnotatedScene {
    pub fn utterances(&self) -> impl Iterator<Item = &AnnotatedUtterance> {
        self.items.iter().filter_map(|i| match i {
            AnnotatedItem::Utterance(u) => Some(u),
            AnnotatedItem::Action(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationTable {
    pub title: String,
    pub scenes: Vec<AnnotatedScene>,
}

impl AnnotationTable {
    pub fn utterances(&self) -> impl Iterator<Item = &AnnotatedUtterance> {
        self.scenes.iter().flat_map(|s| s.utterances())
    }
}

pub(crate) fn is_action_line_id(line_id: &str) -> bool {
    match line_id.strip_prefix('A') {
        Some(rest) => rest.chars().all(|c| c.is_ascii_digit()),
        None => line_id.is_empty(),
    }
}

struct Columns {
    scene_id: usize,
    turn_id: usize,
    line_id: usize,
    speaker: usize,
    text: usize,
    tags: usize,
    sentence: Option<usize>,
}

fn locate(headers: &csv::StringRecord, map: &ColumnMap) -> Result<Columns, AnnotationError> {
    let find = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| AnnotationError::ColumnMissing(name.to_string()))
    };
    Ok(Columns {
        scene_id: find(&map.scene_id)?,
        turn_id: find(&map.turn_id)?,
        line_id: find(&map.line_id)?,
        speaker: find(&map.speaker)?,
        text: find(&map.text)?,
        tags: find(&map.tags)?,
        sentence: map.sentence.as_deref().map(find).transpose()?,
    })
}

/// Reads an annotation table into scenes of tagged sentences and action
/// lines. Rows whose line id is `A` (optionally followed by digits) are
/// action lines; dummy ids such as `La`/`Da` are kept as given.
pub fn read_annotations<R: Read>(
    reader: R,
    title: &str,
    cfg: &ReaderConfig,
) -> Result<AnnotationTable, AnnotationError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(cfg.delimiter)
        .quoting(cfg.delimiter != b'\t')
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| AnnotationError::Io(e.to_string()))?.clone();
    let cols = locate(&headers, &cfg.columns)?;

    let mut scenes: Vec<AnnotatedScene> = Vec::new();
    let mut position = 0usize;
    let mut action_counter = 0usize;

    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| AnnotationError::Io(format!("row {row}: {e}")))?;
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let scene_id = field(cols.scene_id);
        if scene_id.is_empty() {
            return Err(AnnotationError::BadRow { row, message: "empty scene id".into() });
        }
        if scenes.last().map(|s| s.scene_id != scene_id).unwrap_or(true) {
            scenes.push(AnnotatedScene { scene_id: scene_id.to_string(), items: Vec::new() });
            position = 0;
        }
        let scene = scenes.last_mut().expect("pushed above");
        let line_id = field(cols.line_id);
        let text = field(cols.text);

        if is_action_line_id(line_id) {
            action_counter += 1;
            let action_id = if line_id.len() > 1 { line_id.to_string() } else { format!("A{action_counter}") };
            scene.items.push(AnnotatedItem::Action(ActionLine { action_id, text: text.to_string() }));
            continue;
        }

        let tags: Vec<&str> = field(cols.tags).split(cfg.tag_delimiter.as_str()).map(str::trim).collect();
        let parsed: Vec<AnnotationTag> = tags
            .iter()
            .map(|t| AnnotationTag::parse(t).ok_or_else(|| AnnotationError::UnknownTag { row, tag: t.to_string() }))
            .collect::<Result<_, _>>()?;

        let (sentences, first_index): (Vec<String>, usize) = match cols.sentence {
            Some(c) => {
                if parsed.len() != 1 {
                    return Err(AnnotationError::SentenceCountMismatch { row, tags: parsed.len(), sentences: 1 });
                }
                let k = field(c).parse::<usize>().map_err(|_| AnnotationError::BadRow {
                    row,
                    message: format!("bad sentence index {:?}", field(c)),
                })?;
                (vec![text.to_string()], k)
            }
            None => (split_line(text, &cfg.tag_delimiter, parsed.len(), row)?, 1),
        };

        let speaker = normalize_speaker(field(cols.speaker)).name;
        let speaker = if speaker.is_empty() { "UNKNOWN".to_string() } else { speaker };
        let turn_id = field(cols.turn_id).to_string();
        for (k, (sentence, tag)) in sentences.into_iter().zip(parsed).enumerate() {
            scene.items.push(AnnotatedItem::Utterance(AnnotatedUtterance {
                utterance: Utterance {
                    utt_id: format!("{line_id}.{}", first_index + k),
                    speaker: speaker.clone(),
                    turn_id: turn_id.clone(),
                    line_id: line_id.to_string(),
                    scene_id: scene.scene_id.clone(),
                    text: sentence,
                    position,
                },
                tag,
                row,
            }));
            position += 1;
        }
    }
    Ok(AnnotationTable { title: title.to_string(), scenes })
}

/// Splits a line into as many sentences as it has tags, preferring the
/// table's own boundaries (text split on the tag delimiter) over the
/// rule-based segmenter.
fn split_line(text: &str, delimiter: &str, tags: usize, row: usize) -> Result<Vec<String>, AnnotationError> {
    if tags == 1 {
        return Ok(vec![text.to_string()]);
    }
    let explicit: Vec<String> = text.split(delimiter).map(|s| s.trim().to_string()).collect();
    if explicit.len() == tags {
        return Ok(explicit);
    }
    let segmented = segment_sentences(text);
    if segmented.len() == tags {
        return Ok(segmented);
    }
    Err(AnnotationError::SentenceCountMismatch { row, tags, sentences: segmented.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::StartFlavor;

    const TABLE: &str = "scene_id\tturn_id\tline_id\tspeaker\ttext\ttags
S1\tL1\tD1\tEMILY\tYou're being stubborn, as usual.\tT
S1\tL2\tD2\tLORELAI\tNo, Mom, I'm not being stubborn. I'm being me!\t-|P
S1\t\tA\t\tShe looks away.\t
S1\tLa\tDa\tEMILY (O.S.)\tFlorence, I'm dripping.\tD1
";

    #[test]
    fn reads_rows_sentences_and_actions() {
        let t = read_annotations(TABLE.as_bytes(), "gilmore", &ReaderConfig::default()).unwrap();
        assert_eq!(t.scenes.len(), 1);
        let utts: Vec<_> = t.utterances().collect();
        assert_eq!(utts.len(), 4);
        assert_eq!(utts[1].utterance.text, "No, Mom, I'm not being stubborn.");
        assert_eq!(utts[2].utterance.utt_id, "D2.2");
        assert_eq!(utts[2].tag, AnnotationTag::ThreadStart(StartFlavor::P));
        assert_eq!(utts[3].utterance.utt_id, "Da.1");
        assert_eq!(utts[3].utterance.speaker, "EMILY");
        assert_eq!(utts[3].utterance.position, 3);
        assert!(matches!(t.scenes[0].items[3], AnnotatedItem::Action(_)));
    }

    #[test]
    fn unknown_tag() {
        let bad = TABLE.replace("\tD1\n", "\tQ\n");
        let err = read_annotations(bad.as_bytes(), "g", &ReaderConfig::default()).unwrap_err();
        assert_eq!(err, AnnotationError::UnknownTag { row: 4, tag: "Q".into() });
    }

    #[test]
    fn column_missing() {
        let cfg = ReaderConfig {
            columns: ColumnMap { tags: "annotation".into(), ..ColumnMap::default() },
            ..ReaderConfig::default()
        };
        let err = read_annotations(TABLE.as_bytes(), "g", &cfg).unwrap_err();
        assert_eq!(err, AnnotationError::ColumnMissing("annotation".into()));
    }

    #[test]
    fn explicit_sentence_boundaries_win() {
        let table = "scene_id,turn_id,line_id,speaker,text,tags\nS1,L1,D1,JESS,Gotta catch me that worm.|see ya.,T|-\n";
        let t = read_annotations(table.as_bytes(), "g", &ReaderConfig::csv()).unwrap();
        let texts: Vec<_> = t.utterances().map(|u| u.utterance.text.as_str()).collect();
        assert_eq!(texts, vec!["Gotta catch me that worm.", "see ya."]);
    }

    #[test]
    fn sentence_count_mismatch() {
        let table = "scene_id,turn_id,line_id,speaker,text,tags\nS1,L1,D1,JESS,One sentence only.,T|-|-\n";
        let err = read_annotations(table.as_bytes(), "g", &ReaderConfig::csv()).unwrap_err();
        assert!(matches!(err, AnnotationError::SentenceCountMismatch { row: 1, tags: 3, .. }));
    }

    #[test]
    fn action_ids() {
        assert!(is_action_line_id("A"));
        assert!(is_action_line_id("A12"));
        assert!(!is_action_line_id("Da"));
        assert!(!is_action_line_id("Ab"));
    }
}
