pub const DEFAULT_ABBREVIATIONS: &[&str] = &["Mr.", "Mrs.", "Dr.", "Ms.", "St.", "vs."];

/// Rule-based sentence splitter for dialogue lines.
///
/// A boundary is placed after a run of `.`, `!` or `?` (plus any closing
/// quotes or brackets) when it is followed by whitespace and then an
/// uppercase letter or an opening quote. Ellipses never end a sentence and
/// neither does a period closing a listed abbreviation.
#[derive(Debug, Clone)]
pub struct SentenceSegmenter {
    abbreviations: Vec<String>,
}

impl Default for SentenceSegmenter {
    fn default() -> Self {
        Self::with_abbreviations(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

const CLOSERS: &[char] = &['"', '\'', '\u{201d}', '\u{2019}', ')', ']'];
const OPENERS: &[char] = &['"', '\'', '\u{201c}', '\u{2018}'];

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

impl SentenceSegmenter {
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let abbreviations =
            abbreviations.into_iter().map(|a| a.as_ref().trim().to_lowercase()).filter(|a| !a.is_empty()).collect();
        Self { abbreviations }
    }

    fn is_abbreviation(&self, chars: &[(usize, char)], period: usize) -> bool {
        let mut start = period;
        while start > 0 && !chars[start - 1].1.is_whitespace() {
            start -= 1;
        }
        let word: String = chars[start..=period]
            .iter()
            .map(|&(_, c)| c)
            .skip_while(|c| OPENERS.contains(c) || *c == '(')
            .collect::<String>()
            .to_lowercase();
        self.abbreviations.contains(&word)
    }

    pub fn segment(&self, text: &str) -> Vec<String> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let n = chars.len();
        let mut out = Vec::new();
        let mut start_byte = 0;
        let mut i = 0;
        while i < n {
            if !is_terminal(chars[i].1) {
                i += 1;
                continue;
            }
            let mut k = i;
            while k < n && is_terminal(chars[k].1) {
                k += 1;
            }
            let run = &chars[i..k];
            let dots_only = run.iter().all(|&(_, c)| c == '.');
            if dots_only && run.len() >= 2 {
                i = k;
                continue;
            }
            if dots_only {
                // ". . ." spaced ellipsis, either side of this period
                let next_is_dot = k + 1 < n && chars[k].1 == ' ' && chars[k + 1].1 == '.';
                let prev_is_dot = i >= 2 && chars[i - 1].1 == ' ' && chars[i - 2].1 == '.';
                if next_is_dot || prev_is_dot || self.is_abbreviation(&chars, i) {
                    i = k;
                    continue;
                }
            }
            let mut m = k;
            while m < n && CLOSERS.contains(&chars[m].1) {
                m += 1;
            }
            if m >= n || !chars[m].1.is_whitespace() {
                i = m.max(i + 1);
                continue;
            }
            let mut next = m;
            while next < n && chars[next].1.is_whitespace() {
                next += 1;
            }
            if next >= n {
                break;
            }
            let c = chars[next].1;
            if c.is_uppercase() || OPENERS.contains(&c) {
                let sentence = text[start_byte..chars[m].0].trim();
                if !sentence.is_empty() {
                    out.push(sentence.to_string());
                }
                start_byte = chars[next].0;
            }
            i = next;
        }
        let tail = text[start_byte..].trim();
        if !tail.is_empty() {
            out.push(tail.to_string());
        }
        out
    }
}

/// Splits with the default abbreviation list.
pub fn segment_sentences(line_text: &str) -> Vec<String> {
    SentenceSegmenter::default().segment(line_text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_sentences_with_exclamation() {
        assert_eq!(
            segment_sentences("No, Mom, I'm not being stubborn. I'm being me!"),
            vec!["No, Mom, I'm not being stubborn.", "I'm being me!"]
        );
    }

    #[test]
    fn single_sentence() {
        assert_eq!(segment_sentences("Morning."), vec!["Morning."]);
        assert_eq!(segment_sentences("no terminal punctuation"), vec!["no terminal punctuation"]);
    }

    #[test]
    fn worm_line_splits() {
        assert_eq!(
            segment_sentences("Gotta catch me that worm. See ya."),
            vec!["Gotta catch me that worm.", "See ya."]
        );
    }

    #[test]
    fn ellipses_and_dashes_do_not_split() {
        assert_eq!(segment_sentences("And if we go down... It was fine.").len(), 1);
        assert_eq!(segment_sentences("And if we go down . . . It was fine.").len(), 1);
        assert_eq!(segment_sentences("And if we go down. . . It was fine.").len(), 1);
        assert_eq!(segment_sentences("Wait \u{2014} No way.").len(), 1);
        assert_eq!(segment_sentences("Wait\u{2026} No way.").len(), 1);
    }

    #[test]
    fn abbreviations_suppress() {
        assert_eq!(segment_sentences("Ask Dr. Smith. He knows.").len(), 2);
        assert_eq!(segment_sentences("Mr. And Mrs. Gilmore are here.").len(), 1);
        let seg = SentenceSegmenter::with_abbreviations(["Capt."]);
        assert_eq!(seg.segment("Capt. Kirk. Hello.").len(), 2);
        assert_eq!(seg.segment("Dr. Kirk. Hello.").len(), 3);
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(segment_sentences("It's 5 p.m. today.").len(), 1);
        assert_eq!(segment_sentences("Really? yes.").len(), 1);
    }

    #[test]
    fn quotes_and_repeated_marks() {
        assert_eq!(
            segment_sentences("He said \"go.\" Then left?! \"Why?\""),
            vec!["He said \"go.\"", "Then left?!", "\"Why?\""]
        );
        assert_eq!(segment_sentences("MOM, I CAN'T FIND MY BOWTIE!!!"), vec!["MOM, I CAN'T FIND MY BOWTIE!!!"]);
    }

    fn strip_ws(s: &str) -> String {
        s.chars().filter(|c| !c.is_whitespace()).collect()
    }

    proptest! {
        #[test]
        fn joins_back_and_never_empty(text in "[A-Za-z .!?,'\"\u{2026}]{1,80}") {
            let out = segment_sentences(&text);
            for s in &out {
                prop_assert!(!s.trim().is_empty());
                prop_assert_eq!(s.trim(), s.as_str());
            }
            prop_assert_eq!(strip_ws(&out.concat()), strip_ws(&text));
        }
    }
}
