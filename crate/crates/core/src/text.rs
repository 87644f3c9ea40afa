//! Word-level text matching shared by the rewrite and prune engines.
//!
//! All matching is case-insensitive and operates on word boundaries: a
//! summary is tokenized into lowercase alphanumeric runs, and phrases match
//! only as consecutive token sequences. Singular/plural tolerance is a
//! minimal append/strip of `s`, `es`, `ies` — no lexicon.

/// Lowercase alphanumeric tokens of `s`, in order. Hyphens and punctuation
/// split tokens, so "polka-dot" tokenizes the same way in a value and in a
/// summary sentence.
pub fn words(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in s.chars() {
        if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Collapse internal whitespace runs to single spaces and trim.
pub fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// The word plus every de-pluralization the minimal strip rules allow.
fn singular_candidates(w: &str) -> Vec<String> {
    let mut out = vec![w.to_string()];
    if let Some(stem) = w.strip_suffix("ies") {
        if !stem.is_empty() {
            out.push(format!("{stem}y"));
        }
    }
    if let Some(stem) = w.strip_suffix("es") {
        if stem.len() > 1 {
            out.push(stem.to_string());
        }
    }
    if let Some(stem) = w.strip_suffix('s') {
        if stem.len() > 1 && !stem.ends_with('s') {
            out.push(stem.to_string());
        }
    }
    out
}

/// True when two lowercase words are equal up to the minimal pluralizer.
pub fn word_matches(a: &str, b: &str) -> bool {
    if a == b {
        return true;
    }
    let ca = singular_candidates(a);
    singular_candidates(b).iter().any(|x| ca.contains(x))
}

/// Index of the first occurrence of `phrase` (consecutive words) in `ws`,
/// matching the last phrase word with plural tolerance.
pub fn find_phrase_flex(ws: &[String], phrase: &str) -> Option<usize> {
    let pw = words(phrase);
    if pw.is_empty() || pw.len() > ws.len() {
        return None;
    }
    'outer: for start in 0..=ws.len() - pw.len() {
        for (j, p) in pw.iter().enumerate() {
            let w = &ws[start + j];
            let ok = if j == pw.len() - 1 {
                word_matches(w, p)
            } else {
                w == p
            };
            if !ok {
                continue 'outer;
            }
        }
        return Some(start);
    }
    None
}

/// Exact consecutive-word phrase search (no plural tolerance).
pub fn find_phrase_exact(ws: &[String], phrase_words: &[String]) -> Option<usize> {
    if phrase_words.is_empty() || phrase_words.len() > ws.len() {
        return None;
    }
    (0..=ws.len() - phrase_words.len())
        .find(|&start| ws[start..start + phrase_words.len()] == *phrase_words)
}

/// True when `phrase` occurs in `text` on word boundaries, with plural
/// tolerance on the final word.
pub fn contains_phrase(text: &str, phrase: &str) -> bool {
    find_phrase_flex(&words(text), phrase).is_some()
}

/// True when `text` contains `word` exactly on a word boundary.
pub fn contains_word_exact(text: &str, word: &str) -> bool {
    let w = word.to_lowercase();
    words(text).iter().any(|t| *t == w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_through_punctuation() {
        assert_eq!(words("A polka-dot dress!"), vec!["a", "polka", "dot", "dress"]);
    }

    #[test]
    fn plural_matching_is_symmetric() {
        assert!(word_matches("glove", "gloves"));
        assert!(word_matches("gloves", "glove"));
        assert!(word_matches("puppies", "puppy"));
        assert!(word_matches("boxes", "box"));
        assert!(word_matches("dresses", "dress"));
        assert!(!word_matches("glass", "glas"));
        assert!(!word_matches("cat", "dog"));
    }

    #[test]
    fn phrase_needs_word_boundaries() {
        assert!(contains_phrase("a lamp next to the desk", "next to"));
        assert!(!contains_phrase("the alongsidewalk is long", "alongside"));
        assert!(contains_phrase("two red cars parked", "red car"));
    }

    #[test]
    fn exact_word_lookup_ignores_substrings() {
        assert!(contains_word_exact("walking around the park", "around"));
        assert!(!contains_word_exact("a playground by the school", "around"));
    }
}
