//! Screenplay structure: scenes, dialogue turns, dialogue lines and
//! sentence-level utterances, plus the parser and canonical JSONL format.

mod canonical;
mod normalize;
mod parse;
mod sentences;

pub use canonical::{emit_canonical, read_canonical, write_canonical, CanonicalDocument, CanonicalRecord, RecordKind};
pub use normalize::normalize_text;
pub use parse::{classify_lines, parse_screenplay, LineClass, ParseReport, ParseWarning, ParsedScreenplay};
pub use sentences::{segment_sentences, SentenceSegmenter, DEFAULT_ABBREVIATIONS};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScreenplayError {
    #[error("document has no scene header")]
    UnparsableDocument,
    #[error("title slug {0:?} must be non-empty lowercase alphanumerics and hyphens")]
    BadSlug(String),
    #[error("document text is empty")]
    EmptyText,
    #[error("canonical stream line {line}: {message}")]
    BadCanonical { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Movie,
    TvPilot,
}

/// A screenplay as read from disk, before any structure is recovered.
#[derive(Debug, Clone)]
pub struct RawDocument {
    title_slug: String,
    source_kind: SourceKind,
    text: String,
}

impl RawDocument {
    pub fn new(
        title_slug: impl Into<String>,
        source_kind: SourceKind,
        text: impl Into<String>,
    ) -> Result<Self, ScreenplayError> {
        let title_slug = title_slug.into();
        let text = text.into();
        if !is_valid_slug(&title_slug) {
            return Err(ScreenplayError::BadSlug(title_slug));
        }
        if text.trim().is_empty() {
            return Err(ScreenplayError::EmptyText);
        }
        Ok(Self { title_slug, source_kind, text })
    }

    pub fn title_slug(&self) -> &str {
        &self.title_slug
    }

    pub fn source_kind(&self) -> SourceKind {
        self.source_kind
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

pub fn is_valid_slug(slug: &str) -> bool {
    !slug.is_empty() && slug.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
}

/// Turns an arbitrary file stem into a filesystem-safe slug.
pub fn slugify(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut last_dash = true;
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
            last_dash = false;
        } else if !last_dash {
            out.push('-');
            last_dash = true;
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub scene_id: String,
    pub header: String,
    pub elements: Vec<Element>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Element {
    Action(ActionLine),
    Dialogue(DialogueTurn),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionLine {
    pub action_id: String,
    pub text: String,
}

/// One cue block. A block opened by a `(CONT'D)` cue that continues the
/// previous turn of the same speaker carries that turn's id and has
/// `continuation` set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueTurn {
    pub turn_id: String,
    pub speaker: String,
    #[serde(default)]
    pub off_screen: bool,
    #[serde(default)]
    pub voice_over: bool,
    #[serde(default)]
    pub continuation: bool,
    /// Parenthetical stage directions attached to the turn.
    #[serde(default)]
    pub directions: Vec<String>,
    pub lines: Vec<DialogueLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueLine {
    pub line_id: String,
    pub sentences: Vec<Utterance>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Utterance {
    pub utt_id: String,
    pub speaker: String,
    pub turn_id: String,
    pub line_id: String,
    pub scene_id: String,
    pub text: String,
    /// Ordinal of the utterance within its scene's dialogue sequence.
    pub position: usize,
}

impl Scene {
    pub fn new(scene_id: impl Into<String>, header: impl Into<String>) -> Self {
        Self { scene_id: scene_id.into(), header: header.into(), elements: Vec::new() }
    }

    /// Utterances in position order.
    pub fn utterances(&self) -> impl Iterator<Item = &Utterance> {
        self.turns().flat_map(|t| t.lines.iter()).flat_map(|l| l.sentences.iter())
    }

    pub fn turns(&self) -> impl Iterator<Item = &DialogueTurn> {
        self.elements.iter().filter_map(|e| match e {
            Element::Dialogue(t) => Some(t),
            Element::Action(_) => None,
        })
    }

    pub fn actions(&self) -> impl Iterator<Item = &ActionLine> {
        self.elements.iter().filter_map(|e| match e {
            Element::Action(a) => Some(a),
            Element::Dialogue(_) => None,
        })
    }

    pub fn dialogue_lines(&self) -> impl Iterator<Item = &DialogueLine> {
        self.turns().flat_map(|t| t.lines.iter())
    }

    pub fn utterance_count(&self) -> usize {
        self.utterances().count()
    }

    /// Appends an utterance, extending the trailing turn segment when the
    /// turn id matches and opening a new segment otherwise.
    pub fn push_utterance(&mut self, utterance: Utterance) {
        let same_segment = matches!(self.elements.last(), Some(Element::Dialogue(t)) if t.turn_id == utterance.turn_id);
        if !same_segment {
            let continuation = self.turns().any(|t| t.turn_id == utterance.turn_id);
            self.elements.push(Element::Dialogue(DialogueTurn {
                turn_id: utterance.turn_id.clone(),
                speaker: utterance.speaker.clone(),
                off_screen: false,
                voice_over: false,
                continuation,
                directions: Vec::new(),
                lines: Vec::new(),
            }));
        }
        let Some(Element::Dialogue(turn)) = self.elements.last_mut() else { unreachable!() };
        match turn.lines.last_mut() {
            Some(l) if l.line_id == utterance.line_id => l.sentences.push(utterance),
            _ => turn.lines.push(DialogueLine { line_id: utterance.line_id.clone(), sentences: vec![utterance] }),
        }
    }

    pub fn push_action(&mut self, action_id: impl Into<String>, text: impl Into<String>) {
        self.elements.push(Element::Action(ActionLine { action_id: action_id.into(), text: text.into() }));
    }
}

/// Normalizes a cue-line name: strips trailing extensions such as
/// `(V.O.)`, `(O.S.)` and `(CONT'D)`, uppercases, and collapses whitespace.
pub fn normalize_speaker(raw: &str) -> SpeakerName {
    let mut name = raw.trim().to_string();
    let mut off_screen = false;
    let mut voice_over = false;
    let mut continued = false;
    loop {
        let trimmed = name.trim_end();
        if !trimmed.ends_with(')') {
            break;
        }
        let Some(open) = trimmed.rfind('(') else {
            break;
        };
        let ext: String = trimmed[open + 1..trimmed.len() - 1]
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_uppercase();
        match ext.as_str() {
            "OS" | "OC" | "OFF" | "OFFSCREEN" => off_screen = true,
            "VO" => voice_over = true,
            "CONTD" | "CONT" | "CONTINUED" | "CONTINUING" => continued = true,
            _ => {}
        }
        name = trimmed[..open].to_string();
    }
    let name = name.split_whitespace().collect::<Vec<_>>().join(" ").to_uppercase();
    SpeakerName { name, off_screen, voice_over, continued }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeakerName {
    pub name: String,
    pub off_screen: bool,
    pub voice_over: bool,
    pub continued: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speaker_extensions_are_stripped() {
        let s = normalize_speaker("sheldon  (o.s.)");
        assert_eq!(s.name, "SHELDON");
        assert!(s.off_screen);
        let s = normalize_speaker("LORELAI (V.O.) (CONT'D)");
        assert_eq!(s.name, "LORELAI");
        assert!(s.voice_over && s.continued && !s.off_screen);
        let s = normalize_speaker("GEORGIE SR.");
        assert_eq!(s.name, "GEORGIE SR.");
    }

    #[test]
    fn slugs() {
        assert!(is_valid_slug("the-wedding-band"));
        assert!(!is_valid_slug("The Wedding Band"));
        assert!(!is_valid_slug(""));
        assert_eq!(slugify("The Wedding Band (2022)"), "the-wedding-band-2022");
        assert!(RawDocument::new("Bad Slug", SourceKind::Movie, "x").is_err());
        assert_eq!(RawDocument::new("ok", SourceKind::Movie, "  \n").unwrap_err(), ScreenplayError::EmptyText);
    }
}
