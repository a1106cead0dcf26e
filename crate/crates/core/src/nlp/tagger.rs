//! Table-driven part-of-speech tagging.

use super::{normalize, ClosedClass, Lexicon, PosTag};

/// Assigns one tag per token of a single sentence.
pub trait PosTagger {
    fn tag(&self, tokens: &[&str]) -> Vec<PosTag>;
}

impl PosTagger for Lexicon {
    fn tag(&self, tokens: &[&str]) -> Vec<PosTag> {
        pos_tag(tokens, self)
    }
}

fn is_numeric(word: &str) -> bool {
    word.chars().next().is_some_and(|c| c.is_ascii_digit())
        && word
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | ':' | '/' | '%' | '-' | '+'))
}

fn is_punct(word: &str) -> bool {
    !word.is_empty() && !word.chars().any(char::is_alphanumeric)
}

fn lookup(surface: &str, lexicon: &Lexicon) -> PosTag {
    if is_punct(surface) {
        return PosTag::Punct;
    }
    let word = normalize(surface);
    match lexicon.closed_class(&word) {
        Some(ClosedClass::PersonalPronoun) => return PosTag::PronounSubstituting,
        Some(ClosedClass::AmbiguousPronoun) => return PosTag::PronounSubstituting,
        Some(ClosedClass::Determiner) => return PosTag::Determiner,
        Some(ClosedClass::Negation) => return PosTag::Negation,
        Some(ClosedClass::Number) => return PosTag::Number,
        None => {}
    }
    if is_numeric(&word) {
        return PosTag::Number;
    }
    if let Some(pos) = lexicon.entry_pos(&word) {
        return pos;
    }
    if lexicon.regular_form(&word).is_some() {
        return PosTag::Adjective;
    }
    if let Some(pos) = lexicon.suffix_tag(&word) {
        return pos;
    }
    if word.chars().any(char::is_alphabetic) {
        PosTag::Noun
    } else {
        PosTag::Other
    }
}

/// Tags a sentence with the lexicon, then resolves pronouns from context.
///
/// Ambiguous pronouns ("this", "which", ...) are attributive when the next
/// word, skipping adjective, adverb and number modifiers, is a noun.
/// "one" before a verb stands in for a noun phrase.
pub fn pos_tag(tokens: &[&str], lexicon: &Lexicon) -> Vec<PosTag> {
    let mut tags: Vec<PosTag> = tokens.iter().map(|t| lookup(t, lexicon)).collect();
    for i in 0..tokens.len() {
        let word = normalize(tokens[i]);
        let next_word = || {
            tags[i + 1..]
                .iter()
                .copied()
                .find(|t| !matches!(t, PosTag::Adjective | PosTag::Adverb | PosTag::Number))
        };
        match lexicon.closed_class(&word) {
            Some(ClosedClass::AmbiguousPronoun) => {
                if next_word() == Some(PosTag::Noun) {
                    tags[i] = PosTag::PronounAttributive;
                }
            }
            Some(ClosedClass::Number) if word == "one" => {
                if tags.get(i + 1) == Some(&PosTag::Verb) {
                    tags[i] = PosTag::PronounSubstituting;
                }
            }
            Some(ClosedClass::Determiner)
                if tokens[i] == "A"
                // a bare capital "A" in a list is a label, not an article
                && tags.get(i + 1).is_none_or(|t| *t == PosTag::Punct) =>
            {
                tags[i] = PosTag::Noun;
            }
            _ => {}
        }
    }
    tags
}
