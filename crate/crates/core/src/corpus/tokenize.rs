//! Deterministic word tokenizer shared by text embedding, tracking and
//! co-occurrence extraction.

use std::collections::HashSet;
use std::sync::OnceLock;

const STOPWORDS_RAW: &str = include_str!("stopwords.txt");

fn stopwords() -> &'static HashSet<&'static str> {
    static WORDS: OnceLock<HashSet<&'static str>> = OnceLock::new();
    WORDS.get_or_init(|| {
        STOPWORDS_RAW
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

/// Returns true if `word` (already lowercase) is in the bundled stopword list.
pub fn is_stopword(word: &str) -> bool {
    stopwords().contains(word)
}

/// The bundled stopword list, sorted.
pub fn stopword_list() -> Vec<&'static str> {
    let mut words: Vec<_> = stopwords().iter().copied().collect();
    words.sort_unstable();
    words
}

/// Lowercases `text`, splits on every non-alphanumeric character and drops
/// tokens shorter than two characters as well as stopwords.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|piece| !piece.is_empty())
        .map(str::to_lowercase)
        .filter(|tok| tok.chars().count() >= 2 && !is_stopword(tok))
        .collect()
}
