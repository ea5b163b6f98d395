//! Detection of solution names in user-facing text.

use crate::feature_space::{DomainSchema, SolutionId};
use crate::scalar::Scalar;

/// Whether `needle` occurs in `haystack` as a whole word (ASCII case-insensitive).
fn contains_word(haystack: &str, needle: &str) -> bool {
    if needle.is_empty() {
        return false;
    }
    let hay = haystack.to_ascii_lowercase();
    let needle = needle.to_ascii_lowercase();
    let is_word = |c: char| c.is_alphanumeric() || c == '_';
    hay.match_indices(&needle).any(|(i, m)| {
        let before = hay[..i].chars().next_back();
        let after = hay[i + m.len()..].chars().next();
        !before.is_some_and(is_word) && !after.is_some_and(is_word)
    })
}

/// Solutions other than `allowed` whose id or label appears in `text`.
pub fn foreign_solutions<T: Scalar>(text: &str, schema: &DomainSchema<T>, allowed: &[SolutionId]) -> Vec<SolutionId> {
    schema
        .solutions()
        .iter()
        .filter(|s| !allowed.contains(&s.id))
        .filter(|s| contains_word(text, s.id.as_str()) || contains_word(text, &s.label))
        .map(|s| s.id.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::contains_word;

    #[test]
    fn whole_words_only() {
        assert!(contains_word("diagnosis: Flu.", "flu"));
        assert!(contains_word("\"flu\"", "flu"));
        assert!(!contains_word("influenza", "flu"));
        assert!(!contains_word("flu_like", "flu"));
        assert!(contains_word("a cold day", "cold"));
        assert!(!contains_word("", "cold"));
    }
}
