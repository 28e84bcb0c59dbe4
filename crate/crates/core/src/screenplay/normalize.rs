/// Canonicalizes ellipses and dashes and collapses whitespace.
///
/// `. . .` and `...` become `…`; a spaced hyphen ` - ` and a double hyphen
/// `--` become an em dash (U+2014). Hyphens inside words are left alone.
pub fn normalize_text(text: &str) -> String {
    let collapsed = text.split_whitespace().collect::<Vec<_>>().join(" ");
    let s = collapsed.replace(". . .", "…").replace("...", "…");
    let s = s.replace("--", "—").replace(" - ", " — ");
    // " - " replacement can leave "x -" or "- x" at the ends of the string
    let s = match s.strip_suffix(" -") {
        Some(head) => format!("{head} —"),
        None => s,
    };
    let s = match s.strip_prefix("- ") {
        Some(tail) => format!("— {tail}"),
        None => s,
    };
    s.trim().to_string()
}
