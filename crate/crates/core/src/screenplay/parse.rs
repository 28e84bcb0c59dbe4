use serde::{Deserialize, Serialize};

use super::{
    normalize_speaker, normalize_text, ActionLine, DialogueLine, DialogueTurn, Element, RawDocument, Scene,
    ScreenplayError, SentenceSegmenter, Utterance,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineClass {
    SceneHeader,
    Cue,
    Parenthetical,
    Dialogue,
    Action,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParseWarning {
    /// A cue line with no dialogue under it; demoted to an action line.
    MalformedCue { line_no: usize, text: String },
    /// Non-blank lines before the first scene header.
    PreambleDropped { lines: usize },
}

#[derive(Debug, Clone)]
pub struct ParsedScreenplay {
    pub title_slug: String,
    pub scenes: Vec<Scene>,
    pub warnings: Vec<ParseWarning>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseReport {
    pub scenes: usize,
    pub turns: usize,
    pub dialogue_lines: usize,
    pub action_lines: usize,
    pub utterances: usize,
    pub speakers: usize,
    pub warnings: usize,
}

impl ParsedScreenplay {
    pub fn report(&self) -> ParseReport {
        let mut turn_ids = std::collections::HashSet::new();
        let mut speakers = std::collections::HashSet::new();
        let mut r = ParseReport { scenes: self.scenes.len(), warnings: self.warnings.len(), ..Default::default() };
        for scene in &self.scenes {
            for t in scene.turns() {
                turn_ids.insert(t.turn_id.as_str());
                speakers.insert(t.speaker.as_str());
                r.dialogue_lines += t.lines.len();
            }
            r.action_lines += scene.actions().count();
            r.utterances += scene.utterance_count();
        }
        r.turns = turn_ids.len();
        r.speakers = speakers.len();
        r
    }
}

#[derive(Debug, Clone)]
struct Classified<'a> {
    line_no: usize,
    class: LineClass,
    text: &'a str,
    /// True when a blank line (or the start of the document) precedes it.
    after_blank: bool,
}

fn indent_width(raw: &str) -> usize {
    let mut w = 0;
    for c in raw.chars() {
        match c {
            ' ' => w += 1,
            '\t' => w += 8 - (w % 8),
            _ => break,
        }
    }
    w
}

fn is_indented(raw: &str) -> bool {
    raw.starts_with('\t') || raw.starts_with("    ")
}

fn strip_parenthesized(s: &str) -> String {
    let mut depth = 0usize;
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

fn uppercase_ratio(s: &str) -> Option<f64> {
    let (mut upper, mut alpha) = (0usize, 0usize);
    for c in s.chars().filter(|c| c.is_alphabetic()) {
        alpha += 1;
        if c.is_uppercase() {
            upper += 1;
        }
    }
    (alpha > 0).then(|| upper as f64 / alpha as f64)
}

fn has_location_prefix(trimmed: &str) -> bool {
    // scene numbers such as "12" or "12A" may precede the heading
    let s = trimmed.trim_start_matches(|c: char| c.is_ascii_digit());
    let s = if s.len() < trimmed.len() {
        s.trim_start_matches(|c: char| c.is_ascii_uppercase() && !s.starts_with("INT") && !s.starts_with("EXT"))
    } else {
        s
    };
    let s = s.trim_start();
    ["INT.", "EXT.", "INT ", "EXT ", "INT/", "EXT/", "I/E", "INT:", "EXT:"].iter().any(|p| s.starts_with(p))
}

fn is_scene_header(trimmed: &str, indented: bool) -> bool {
    if has_location_prefix(trimmed) {
        return true;
    }
    if indented {
        return false;
    }
    let alpha = trimmed.chars().filter(|c| c.is_alphabetic()).count();
    alpha >= 2
        && trimmed.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase)
        && !trimmed.ends_with(['.', '!', '?', ':', ','])
}

fn is_cue_like(trimmed: &str) -> bool {
    let bare = strip_parenthesized(trimmed);
    let bare = bare.trim();
    if bare.is_empty() || bare.chars().count() > 50 || bare.split_whitespace().count() > 6 {
        return false;
    }
    if bare.ends_with(['!', '?', ',', ':', ';']) || bare.contains("--") {
        return false;
    }
    matches!(uppercase_ratio(bare), Some(r) if r >= 0.7)
}

struct Block {
    cue_index: usize,
    cue_indent: usize,
    has_dialogue: bool,
}

fn classify(text: &str) -> (Vec<Classified<'_>>, Vec<ParseWarning>) {
    let mut out: Vec<Classified<'_>> = Vec::new();
    let mut warnings = Vec::new();
    let mut block: Option<Block> = None;
    let mut in_paren = false;
    let mut after_blank = true;

    let close_block = |block: &mut Option<Block>, out: &mut Vec<Classified<'_>>, warnings: &mut Vec<ParseWarning>| {
        if let Some(b) = block.take() {
            if !b.has_dialogue {
                // demote the cue and any parentheticals that followed it
                warnings.push(ParseWarning::MalformedCue {
                    line_no: out[b.cue_index].line_no,
                    text: out[b.cue_index].text.to_string(),
                });
                for c in &mut out[b.cue_index..] {
                    c.class = LineClass::Action;
                }
            }
        }
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            close_block(&mut block, &mut out, &mut warnings);
            in_paren = false;
            after_blank = true;
            continue;
        }
        let indented = is_indented(raw);
        let width = indent_width(raw);

        let class = if in_paren {
            if trimmed.ends_with(')') {
                in_paren = false;
            }
            LineClass::Parenthetical
        } else if is_scene_header(trimmed, indented) {
            close_block(&mut block, &mut out, &mut warnings);
            LineClass::SceneHeader
        } else if !indented {
            close_block(&mut block, &mut out, &mut warnings);
            LineClass::Action
        } else if let Some(b) = block.as_mut() {
            if trimmed.starts_with('(') {
                in_paren = !trimmed.ends_with(')');
                LineClass::Parenthetical
            } else if is_cue_like(trimmed) && width >= b.cue_indent {
                close_block(&mut block, &mut out, &mut warnings);
                block = Some(Block { cue_index: out.len(), cue_indent: width, has_dialogue: false });
                LineClass::Cue
            } else {
                b.has_dialogue = true;
                LineClass::Dialogue
            }
        } else if is_cue_like(trimmed) {
            block = Some(Block { cue_index: out.len(), cue_indent: width, has_dialogue: false });
            LineClass::Cue
        } else {
            LineClass::Action
        };
        out.push(Classified { line_no, class, text: trimmed, after_blank });
        after_blank = false;
    }
    close_block(&mut block, &mut out, &mut warnings);
    (out, warnings)
}

/// Classifies every non-blank source line. Returns `(line_no, class)` with
/// 1-based line numbers, after malformed cues have been demoted.
pub fn classify_lines(text: &str) -> Vec<(usize, LineClass)> {
    classify(text).0.into_iter().map(|c| (c.line_no, c.class)).collect()
}

#[derive(Default)]
struct Counters {
    scene: usize,
    turn: usize,
    line: usize,
    action: usize,
}

struct SceneBuilder<'s> {
    scene: Scene,
    position: usize,
    segmenter: &'s SentenceSegmenter,
}

impl SceneBuilder<'_> {
    fn push_action(&mut self, ids: &mut Counters, text: &str, join: bool) {
        if join {
            if let Some(Element::Action(a)) = self.scene.elements.last_mut() {
                a.text.push(' ');
                a.text.push_str(text);
                return;
            }
        }
        ids.action += 1;
        self.scene
            .elements
            .push(Element::Action(ActionLine { action_id: format!("A{}", ids.action), text: text.to_string() }));
    }

    fn open_turn(&mut self, ids: &mut Counters, cue: &str) {
        let name = normalize_speaker(cue);
        let previous = self.scene.turns().last().map(|t| (t.turn_id.clone(), t.speaker.clone()));
        let (turn_id, continuation) = match previous {
            Some((id, speaker)) if name.continued && speaker == name.name => (id, true),
            _ => {
                ids.turn += 1;
                (format!("L{}", ids.turn), false)
            }
        };
        self.scene.elements.push(Element::Dialogue(DialogueTurn {
            turn_id,
            speaker: name.name,
            off_screen: name.off_screen,
            voice_over: name.voice_over,
            continuation,
            directions: Vec::new(),
            lines: Vec::new(),
        }));
    }

    fn current_turn(&mut self) -> Option<&mut DialogueTurn> {
        match self.scene.elements.last_mut() {
            Some(Element::Dialogue(t)) => Some(t),
            _ => None,
        }
    }

    fn finish_line(&mut self, ids: &mut Counters, paragraph: &mut Vec<&str>) {
        if paragraph.is_empty() {
            return;
        }
        let text = normalize_text(&paragraph.join(" "));
        paragraph.clear();
        let sentences = self.segmenter.segment(&text);
        if sentences.is_empty() {
            return;
        }
        ids.line += 1;
        let line_id = format!("D{}", ids.line);
        let scene_id = self.scene.scene_id.clone();
        let mut position = self.position;
        let Some(turn) = self.current_turn() else {
            return;
        };
        let utterances = sentences
            .into_iter()
            .enumerate()
            .map(|(k, text)| {
                let u = Utterance {
                    utt_id: format!("{line_id}.{}", k + 1),
                    speaker: turn.speaker.clone(),
                    turn_id: turn.turn_id.clone(),
                    line_id: line_id.clone(),
                    scene_id: scene_id.clone(),
                    text,
                    position,
                };
                position += 1;
                u
            })
            .collect();
        turn.lines.push(DialogueLine { line_id, sentences: utterances });
        self.position = position;
    }
}

/// Recovers scenes, turns, dialogue lines and sentence-level utterances.
///
/// Non-blank lines before the first scene header are dropped with a
/// warning. Cues without dialogue are demoted to action lines.
pub fn parse_screenplay(doc: &RawDocument) -> Result<ParsedScreenplay, ScreenplayError> {
    parse_with(doc, &SentenceSegmenter::default())
}

pub fn parse_with(doc: &RawDocument, segmenter: &SentenceSegmenter) -> Result<ParsedScreenplay, ScreenplayError> {
    let (lines, mut warnings) = classify(doc.text());
    let Some(first_header) = lines.iter().position(|l| l.class == LineClass::SceneHeader) else {
        return Err(ScreenplayError::UnparsableDocument);
    };
    if first_header > 0 {
        warnings.push(ParseWarning::PreambleDropped { lines: first_header });
    }

    let mut ids = Counters::default();
    let mut scenes = Vec::new();
    let mut builder: Option<SceneBuilder<'_>> = None;
    let mut paragraph: Vec<&str> = Vec::new();
    let mut prev_class: Option<LineClass> = None;

    for line in &lines[first_header..] {
        if let Some(b) = builder.as_mut() {
            // a dialogue paragraph ends at anything but another dialogue line
            if line.class != LineClass::Dialogue || line.after_blank {
                b.finish_line(&mut ids, &mut paragraph);
            }
        }
        match line.class {
            LineClass::SceneHeader => {
                if let Some(b) = builder.take() {
                    scenes.push(b.scene);
                }
                ids.scene += 1;
                builder = Some(SceneBuilder {
                    scene: Scene::new(format!("S{}", ids.scene), line.text),
                    position: 0,
                    segmenter,
                });
            }
            LineClass::Action => {
                let join = prev_class == Some(LineClass::Action) && !line.after_blank;
                builder.as_mut().expect("header seen").push_action(&mut ids, line.text, join);
            }
            LineClass::Cue => builder.as_mut().expect("header seen").open_turn(&mut ids, line.text),
            LineClass::Parenthetical => {
                let b = builder.as_mut().expect("header seen");
                if let Some(turn) = b.current_turn() {
                    let continues = prev_class == Some(LineClass::Parenthetical) && !line.text.starts_with('(');
                    match turn.directions.last_mut() {
                        Some(last) if continues => {
                            last.push(' ');
                            last.push_str(line.text);
                        }
                        _ => turn.directions.push(line.text.to_string()),
                    }
                }
            }
            LineClass::Dialogue => paragraph.push(line.text),
        }
        prev_class = Some(line.class);
    }
    if let Some(mut b) = builder.take() {
        b.finish_line(&mut ids, &mut paragraph);
        scenes.push(b.scene);
    }
    // turns whose dialogue normalized away entirely carry no lines
    for scene in &mut scenes {
        scene.elements.retain(|e| !matches!(e, Element::Dialogue(t) if t.lines.is_empty()));
    }
    Ok(ParsedScreenplay { title_slug: doc.title_slug().to_string(), scenes, warnings })
}
