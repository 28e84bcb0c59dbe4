use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

/// Tokenizer used for the token-overlap feature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tokenizer {
    /// Lowercased alphanumeric runs; apostrophes stay inside words.
    #[default]
    Word,
    /// Greedy longest-match subwords over a vocabulary, `##` marking
    /// word-internal pieces. Words that cannot be covered become `[UNK]`.
    WordPiece { vocab: BTreeSet<String> },
}

pub const UNKNOWN_PIECE: &str = "[UNK]";

impl Tokenizer {
    /// Reads a vocabulary with one piece per line; blank lines are ignored.
    pub fn wordpiece_from_str(vocab: &str) -> Self {
        let vocab = vocab.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect();
        Tokenizer::WordPiece { vocab }
    }

    pub fn tokens(&self, text: &str) -> Vec<String> {
        let words = words(text);
        match self {
            Tokenizer::Word => words,
            Tokenizer::WordPiece { vocab } => words.iter().flat_map(|w| wordpiece(w, vocab)).collect(),
        }
    }

    pub fn token_set(&self, text: &str) -> HashSet<String> {
        self.tokens(text).into_iter().collect()
    }
}

fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() || (c == '\'' && !cur.is_empty()) || (c == '’' && !cur.is_empty()) {
            cur.extend(c.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    for w in &mut out {
        while w.ends_with('\'') || w.ends_with('’') {
            w.pop();
        }
    }
    out
}

fn wordpiece(word: &str, vocab: &BTreeSet<String>) -> Vec<String> {
    let chars: Vec<char> = word.chars().collect();
    let mut pieces = Vec::new();
    let mut start = 0;
    while start < chars.len() {
        let mut end = chars.len();
        let mut found = None;
        while end > start {
            let mut piece: String = chars[start..end].iter().collect();
            if start > 0 {
                piece.insert_str(0, "##");
            }
            if vocab.contains(&piece) {
                found = Some(piece);
                break;
            }
            end -= 1;
        }
        match found {
            Some(p) => {
                pieces.push(p);
                start = end;
            }
            None => return vec![UNKNOWN_PIECE.to_string()],
        }
    }
    pieces
}
