//! Dictionary lemmas with suffix-stripping fallback.

use super::degree::deflect;
use super::{normalize, Lexicon, PosTag};

fn undouble(stem: &str) -> Option<&str> {
    let b = stem.as_bytes();
    let n = b.len();
    (n >= 3 && b[n - 1] == b[n - 2] && !b"aeiouls".contains(&b[n - 1])).then(|| &stem[..n - 1])
}

fn noun_lemma(word: &str, lexicon: &Lexicon) -> String {
    let known = |w: &str| lexicon.entry(w).is_some_and(|e| e.pos == PosTag::Noun);
    if let Some(stem) = word.strip_suffix("ies").filter(|s| s.len() >= 2) {
        return format!("{stem}y");
    }
    for suffix in ["sses", "ches", "shes", "xes", "zes"] {
        if word.ends_with(suffix) {
            return word[..word.len() - 2].to_string();
        }
    }
    if let Some(stem) = word.strip_suffix("es") {
        if known(stem) {
            return stem.to_string();
        }
    }
    if word.len() > 3
        && word.ends_with('s')
        && !["ss", "us", "is"].iter().any(|s| word.ends_with(s))
    {
        return word[..word.len() - 1].to_string();
    }
    word.to_string()
}

fn verb_lemma(word: &str, lexicon: &Lexicon) -> String {
    let known = |w: &str| lexicon.is_verb_lemma(w);
    let pick = |stem: &str| -> String {
        let mut candidates = vec![stem.to_string(), format!("{stem}e")];
        if let Some(u) = undouble(stem) {
            candidates.insert(1, u.to_string());
        }
        if let Some(c) = candidates.iter().find(|c| known(c)) {
            return c.clone();
        }
        if let Some(u) = undouble(stem) {
            return u.to_string();
        }
        // "creat" -> "create", "us" -> "use"
        let b = stem.as_bytes();
        let n = b.len();
        let needs_e = n >= 2
            && matches!(b[n - 1], b'v' | b'z' | b'c' | b'g' | b't' | b's' | b'r')
            && matches!(b[n - 2], b'a' | b'i' | b'o' | b'u' | b'r' | b'l');
        if needs_e && !stem.ends_with("rt") && !stem.ends_with("lt") && !stem.ends_with("ss") {
            format!("{stem}e")
        } else {
            stem.to_string()
        }
    };
    if let Some(stem) = word
        .strip_suffix("ied")
        .or_else(|| word.strip_suffix("ies"))
    {
        if stem.len() >= 2 {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = word.strip_suffix("ing").filter(|s| s.len() >= 2) {
        return pick(stem);
    }
    if let Some(stem) = word.strip_suffix("ed").filter(|s| s.len() >= 2) {
        return pick(stem);
    }
    for suffix in ["sses", "ches", "shes", "xes", "zes"] {
        if word.ends_with(suffix) {
            return word[..word.len() - 2].to_string();
        }
    }
    if word.len() > 3 && word.ends_with('s') && !word.ends_with("ss") {
        return word[..word.len() - 1].to_string();
    }
    word.to_string()
}

fn gradable_lemma(word: &str, lexicon: &Lexicon) -> String {
    lexicon
        .irregular_degree(word)
        .or_else(|| lexicon.regular_form(word))
        .map(|(base, _)| base.to_string())
        .or_else(|| {
            (!lexicon.in_degree_stoplist(word))
                .then(|| deflect(word, lexicon).map(|(b, _)| b))
                .flatten()
        })
        .unwrap_or_else(|| word.to_string())
}

/// Lowercase lemma of `surface` read as `pos`.
pub fn lemmatize(surface: &str, pos: PosTag, lexicon: &Lexicon) -> String {
    let word = normalize(surface);
    if let Some(entry) = lexicon.entry(&word) {
        let open_class = matches!(
            pos,
            PosTag::Noun | PosTag::Verb | PosTag::Adjective | PosTag::Adverb
        );
        if entry.pos == pos || !open_class {
            return entry.lemma.clone();
        }
    }
    let lemma = match pos {
        PosTag::Noun => noun_lemma(&word, lexicon),
        PosTag::Verb => verb_lemma(&word, lexicon),
        PosTag::Adjective | PosTag::Adverb => gradable_lemma(&word, lexicon),
        _ => word.clone(),
    };
    if lemma.is_empty() {
        word
    } else {
        lemma
    }
}
