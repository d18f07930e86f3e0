use std::collections::HashSet;
use std::sync::OnceLock;

const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

/// Lowercases, replaces every character outside `[a-z0-9 ]` with a space,
/// collapses whitespace runs and trims.
pub fn clean_text(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for ch in raw.chars().flat_map(char::to_lowercase) {
        if ch.is_ascii_lowercase() || ch.is_ascii_digit() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(ch);
        } else {
            pending_space = true;
        }
    }
    out
}

/// Order-preserving filter.
pub fn remove_stopwords<'a, S: AsRef<str>>(tokens: &'a [S], stoplist: &HashSet<String>) -> Vec<&'a str> {
    tokens.iter().map(AsRef::as_ref).filter(|w| !stoplist.contains(*w)).collect()
}

/// The English list shipped in `data/stopwords_en.txt`.
pub fn default_stopwords() -> &'static HashSet<String> {
    static LIST: OnceLock<HashSet<String>> = OnceLock::new();
    LIST.get_or_init(|| {
        BUNDLED_STOPWORDS
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_owned)
            .collect()
    })
}

/// `clean_text`, split on spaces, drop stopwords.
pub fn normalize_words(raw: &str, stoplist: &HashSet<String>) -> Vec<String> {
    let cleaned = clean_text(raw);
    cleaned.split(' ').filter(|w| !w.is_empty() && !stoplist.contains(*w)).map(str::to_owned).collect()
}
