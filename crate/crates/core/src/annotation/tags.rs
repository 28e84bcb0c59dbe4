use std::fmt;

use serde::{Deserialize, Serialize};

/// How a thread start was annotated: both floor and topic change (`T`),
/// floor only (`F`) or topic only (`P`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StartFlavor {
    T,
    F,
    P,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AnnotationTag {
    ThreadStart(StartFlavor),
    /// Replies to the immediately preceding utterance.
    Prev,
    /// Replies to the referenced utterance or line (`D45`, `D45.2`, `Da`).
    ReplyTo(String),
    Skip,
    /// Awaiting adjudication.
    Discuss,
}

impl AnnotationTag {
    /// Parses one annotation symbol. Returns `None` for anything outside
    /// `{T, F, P, -, D<x>, S, X}`.
    pub fn parse(symbol: &str) -> Option<Self> {
        let s = symbol.trim();
        Some(match s {
            "T" => Self::ThreadStart(StartFlavor::T),
            "F" => Self::ThreadStart(StartFlavor::F),
            "P" => Self::ThreadStart(StartFlavor::P),
            "-" => Self::Prev,
            "S" => Self::Skip,
            "X" => Self::Discuss,
            _ => {
                let rest = s.strip_prefix('D')?;
                let valid = !rest.is_empty()
                    && rest.chars().all(|c| c.is_ascii_alphanumeric() || c == '.')
                    && !rest.starts_with('.')
                    && !rest.ends_with('.');
                if !valid {
                    return None;
                }
                Self::ReplyTo(s.to_string())
            }
        })
    }
}

impl fmt::Display for AnnotationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ThreadStart(fl) => write!(f, "{fl:?}"),
            Self::Prev => f.write_str("-"),
            Self::ReplyTo(t) => f.write_str(t),
            Self::Skip => f.write_str("S"),
            Self::Discuss => f.write_str("X"),
        }
    }
}
