//! Language annotation: sentences, tokens, POS tags, lemmas and degree.
//!
//! Tagging is deterministic and table-driven. Everything language-specific
//! lives in the [`Lexicon`] files; [`PosTagger`] lets another tagger be
//! plugged in without touching lemmatization or degree analysis.

mod degree;
mod lemma;
mod lexicon;
mod sentence;
mod tagger;
mod tokenize;

pub use degree::{analyze_degree, inflect, DegreeAnalysis};
pub use lemma::lemmatize;
pub use lexicon::{ClosedClass, ClosedClasses, Inflection, Lexicon, LexiconError};
pub use sentence::split_sentences;
pub use tagger::{pos_tag, PosTagger};
pub use tokenize::{is_abbreviation, tokenize, RawToken, ABBREVIATIONS};

use crate::Span;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PosTag {
    Noun,
    Verb,
    Adjective,
    Adverb,
    /// Pronoun standing in place of a noun ("which must", "these.", "their").
    PronounSubstituting,
    /// Pronoun accompanying a noun ("these kids").
    PronounAttributive,
    Determiner,
    Preposition,
    Conjunction,
    Particle,
    Number,
    Negation,
    Punct,
    Other,
}

impl PosTag {
    pub const ALL: [PosTag; 14] = [
        PosTag::Noun,
        PosTag::Verb,
        PosTag::Adjective,
        PosTag::Adverb,
        PosTag::PronounSubstituting,
        PosTag::PronounAttributive,
        PosTag::Determiner,
        PosTag::Preposition,
        PosTag::Conjunction,
        PosTag::Particle,
        PosTag::Number,
        PosTag::Negation,
        PosTag::Punct,
        PosTag::Other,
    ];

    pub fn is_gradable(self) -> bool {
        matches!(self, PosTag::Adjective | PosTag::Adverb)
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for PosTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PosTag::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown POS tag `{s}`"))
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub enum Degree {
    #[default]
    None,
    Comparative,
    Superlative,
}

impl FromStr for Degree {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Degree::None),
            "comparative" => Ok(Degree::Comparative),
            "superlative" => Ok(Degree::Superlative),
            _ => Err(format!("unknown degree `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedToken {
    pub surface: String,
    /// Byte range within the item text.
    pub char_range: Span,
    pub sentence_index: usize,
    pub pos: PosTag,
    pub lemma: String,
    pub degree: Degree,
    /// Degree comes from the preceding "more"/"most"/... auxiliary.
    #[serde(default)]
    pub periphrastic: bool,
}

impl AnnotatedToken {
    pub fn is_word(&self) -> bool {
        self.surface.chars().any(char::is_alphanumeric)
    }
}

/// Lowercases and folds typographic apostrophes for table lookups.
pub(crate) fn normalize(word: &str) -> String {
    word.to_lowercase().replace(['’', '‘'], "'")
}

/// Annotates `text` with the lexicon's own rule tagger.
pub fn annotate(text: &str, lexicon: &Lexicon) -> Vec<AnnotatedToken> {
    annotate_with(text, lexicon, lexicon)
}

/// Annotates `text`, taking POS tags from `tagger` and everything else from
/// `lexicon`. Tagging runs per sentence.
pub fn annotate_with(text: &str, lexicon: &Lexicon, tagger: &dyn PosTagger) -> Vec<AnnotatedToken> {
    let raw = tokenize(text);
    if raw.is_empty() {
        return Vec::new();
    }
    let sentences = split_sentences(text);
    let sentence_of = |offset: usize| {
        sentences
            .iter()
            .position(|s| offset < s.end)
            .unwrap_or(sentences.len().saturating_sub(1))
    };

    let mut out: Vec<AnnotatedToken> = Vec::with_capacity(raw.len());
    let mut start = 0;
    while start < raw.len() {
        let sentence = sentence_of(raw[start].span.start);
        let mut end = start + 1;
        while end < raw.len() && sentence_of(raw[end].span.start) == sentence {
            end += 1;
        }
        let group = &raw[start..end];
        let surfaces: Vec<&str> = group.iter().map(|t| t.surface).collect();
        let tags = tagger.tag(&surfaces);
        debug_assert_eq!(tags.len(), surfaces.len());

        for (i, (tok, &pos)) in group.iter().zip(&tags).enumerate() {
            let prev = i.checked_sub(1).map(|p| group[p].surface);
            let analysis = analyze_degree(tok.surface, pos, prev, lexicon);
            if analysis.periphrastic {
                // the auxiliary only marks this token; it is not a finding of its own
                if let Some(aux) = out.last_mut() {
                    aux.degree = Degree::None;
                }
            }
            out.push(AnnotatedToken {
                surface: tok.surface.to_string(),
                char_range: tok.span,
                sentence_index: sentence,
                pos,
                lemma: lemmatize(tok.surface, pos, lexicon),
                degree: analysis.degree,
                periphrastic: analysis.periphrastic,
            });
        }
        start = end;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lex() -> &'static Lexicon {
        Lexicon::bundled()
    }

    fn find<'a>(toks: &'a [AnnotatedToken], surface: &str) -> &'a AnnotatedToken {
        toks.iter().find(|t| t.surface == surface).unwrap()
    }

    #[test]
    fn loophole_sentence_fully_annotated() {
        let text = "As far as possible, inputs are checked for plausibility.";
        let toks = annotate(text, lex());
        assert_eq!(toks.len(), 11);
        assert_eq!(find(&toks, "possible").lemma, "possible");
        assert_eq!(find(&toks, "inputs").lemma, "input");
        assert_eq!(find(&toks, "are").lemma, "be");
        assert_eq!(find(&toks, "checked").lemma, "check");
        assert!(toks.iter().all(|t| t.sentence_index == 0));
        for t in &toks {
            assert_eq!(t.char_range.slice(text), t.surface);
            assert!(!t.lemma.is_empty());
        }
    }

    #[test]
    fn empty_text_yields_nothing() {
        assert!(annotate("", lex()).is_empty());
    }

    #[test]
    fn modal_may_is_a_verb() {
        let toks = annotate("The system may only be activated", lex());
        let may = find(&toks, "may");
        assert_eq!(may.pos, PosTag::Verb);
        assert_eq!(may.lemma, "may");
    }

    #[test]
    fn periphrastic_degree_marks_the_adjective() {
        let toks = annotate("as well as more exact build infos.", lex());
        let more = find(&toks, "more");
        let exact = find(&toks, "exact");
        assert_eq!(exact.degree, Degree::Comparative);
        assert!(exact.periphrastic);
        assert_eq!(more.degree, Degree::None);
    }

    #[test]
    fn standalone_more_keeps_its_degree() {
        let toks = annotate("if the system takes more than 1 second to respond", lex());
        assert_eq!(find(&toks, "more").degree, Degree::Comparative);
        assert_eq!(find(&toks, "1").pos, PosTag::Number);
    }

    #[test]
    fn sentence_indices() {
        let toks = annotate("It fails. These work.", lex());
        assert_eq!(find(&toks, "It").sentence_index, 0);
        assert_eq!(find(&toks, "These").sentence_index, 1);
        // pronoun look-ahead stops at the sentence end
        assert_eq!(find(&toks, "These").pos, PosTag::PronounSubstituting);
    }

    proptest! {
        #[test]
        fn annotation_invariants(text in "[A-Za-z ,.;()0-9-]{0,100}") {
            let toks = annotate(&text, lex());
            let again = annotate(&text, lex());
            prop_assert_eq!(&toks, &again);
            let mut prev = 0;
            for t in &toks {
                prop_assert!(t.char_range.start >= prev);
                prev = t.char_range.end;
                prop_assert_eq!(t.char_range.slice(&text), t.surface.as_str());
                prop_assert!(!t.lemma.is_empty());
                prop_assert_eq!(t.lemma.to_lowercase(), t.lemma.clone());
                if t.degree != Degree::None {
                    prop_assert!(t.pos.is_gradable());
                }
            }
        }
    }
}
