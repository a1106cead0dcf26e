//! Per-smell detectors. Each returns token-level matches; [`super::detect`]
//! turns them into findings.

use super::{DetectorConfig, Dictionary, SmellKind, SuppressionReason};
use crate::ingest::split_user_story;
use crate::nlp::{normalize, AnnotatedToken, Degree, PosTag};
use crate::TokenSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Match {
    pub smell: SmellKind,
    pub tokens: TokenSpan,
    pub suppressed_by: Option<SuppressionReason>,
}

impl Match {
    fn new(smell: SmellKind, first: usize, last: usize) -> Self {
        Match {
            smell,
            tokens: TokenSpan::new(first, last),
            suppressed_by: None,
        }
    }
}

fn token_matches(token: &AnnotatedToken, lemma: &str) -> bool {
    token.lemma == lemma || normalize(&token.surface) == lemma
}

fn phrase_at(tokens: &[AnnotatedToken], at: usize, phrase: &[String]) -> bool {
    let sentence = tokens[at].sentence_index;
    phrase.len() <= tokens.len() - at
        && phrase
            .iter()
            .zip(&tokens[at..])
            .all(|(lemma, t)| t.sentence_index == sentence && token_matches(t, lemma))
}

/// Longest-match greedy scan of the dictionary phrases over token lemmas.
/// Matches never cross a sentence boundary.
pub fn detect_dictionary_smell(tokens: &[AnnotatedToken], dict: &Dictionary) -> Vec<Match> {
    let max_len = dict.max_len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let longest = (1..=max_len.min(tokens.len() - i)).rev().find(|&n| {
            dict.phrases()
                .any(|p| p.len() == n && phrase_at(tokens, i, p))
        });
        match longest {
            Some(n) => {
                out.push(Match::new(dict.smell, i, i + n - 1));
                i += n;
            }
            None => i += 1,
        }
    }
    out
}

fn sentence_range(tokens: &[AnnotatedToken], at: usize) -> std::ops::Range<usize> {
    let s = tokens[at].sentence_index;
    let start = tokens[..at]
        .iter()
        .rposition(|t| t.sentence_index != s)
        .map_or(0, |p| p + 1);
    let end = tokens[at..]
        .iter()
        .position(|t| t.sentence_index != s)
        .map_or(tokens.len(), |p| at + p);
    start..end
}

/// Comparative followed later in the sentence by "than" and a number.
fn is_numeric_comparison(tokens: &[AnnotatedToken], at: usize) -> bool {
    let range = sentence_range(tokens, at);
    let Some(than) = (at + 1..range.end).find(|&j| tokens[j].lemma == "than") else {
        return false;
    };
    tokens[than + 1..range.end]
        .iter()
        .find(|t| t.pos != PosTag::Punct)
        .is_some_and(|t| t.pos == PosTag::Number)
}

/// One match per token carrying the requested degree. Periphrastic forms
/// ("more exact") span the auxiliary and the adjective.
pub fn detect_degree_smell(
    tokens: &[AnnotatedToken],
    kind: SmellKind,
    config: &DetectorConfig,
) -> Vec<Match> {
    let wanted = match kind {
        SmellKind::Comparatives => Degree::Comparative,
        SmellKind::Superlatives => Degree::Superlative,
        _ => return Vec::new(),
    };
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.degree == wanted)
        .map(|(i, t)| {
            let first = if t.periphrastic && i > 0 { i - 1 } else { i };
            let mut m = Match::new(kind, first, i);
            if kind == SmellKind::Comparatives
                && config.enable_numeric_comparison_suppression
                && is_numeric_comparison(tokens, i)
            {
                m.suppressed_by = Some(SuppressionReason::NumericComparisonHeuristic);
            }
            m
        })
        .collect()
}

const CLAUSE_OPENERS: &[&str] = &["if", "unless", "when", "whenever"];

/// Negation between a conditional opener and the next comma, semicolon or
/// sentence end.
fn in_conditional_clause(tokens: &[AnnotatedToken], at: usize) -> bool {
    let range = sentence_range(tokens, at);
    for t in tokens[range.start..at].iter().rev() {
        if matches!(t.surface.as_str(), "," | ";" | ":") {
            return false;
        }
        if CLAUSE_OPENERS.contains(&t.lemma.as_str()) {
            return true;
        }
    }
    false
}

/// One match per Negation-tagged token or negation-list word.
pub fn detect_negative_statements(
    tokens: &[AnnotatedToken],
    negations: Option<&Dictionary>,
    config: &DetectorConfig,
) -> Vec<Match> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| {
            t.pos == PosTag::Negation
                || negations.is_some_and(|d| {
                    d.contains(std::slice::from_ref(&t.lemma))
                        || d.contains(&[normalize(&t.surface)])
                })
        })
        .map(|(i, _)| {
            let mut m = Match::new(SmellKind::NegativeStatements, i, i);
            if config.enable_condition_suppression && in_conditional_clause(tokens, i) {
                m.suppressed_by = Some(SuppressionReason::ConditionHeuristic);
            }
            m
        })
        .collect()
}

const STORY_FRAME_PRONOUNS: &[&str] = &["i", "me", "my", "mine", "myself"];

/// One match per substituting pronoun. In a conformant user story the
/// first person refers to the role and is skipped.
pub fn detect_vague_pronouns(text: &str, tokens: &[AnnotatedToken]) -> Vec<Match> {
    let story = split_user_story(text).conformant;
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.pos == PosTag::PronounSubstituting)
        .filter(|(_, t)| !(story && STORY_FRAME_PRONOUNS.contains(&normalize(&t.surface).as_str())))
        .map(|(i, _)| Match::new(SmellKind::VaguePronouns, i, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlp::{annotate, Lexicon};
    use crate::smells::DictionarySet;

    fn toks(text: &str) -> Vec<AnnotatedToken> {
        annotate(text, Lexicon::bundled())
    }

    fn texts(text: &str, ms: &[Match]) -> Vec<String> {
        let t = toks(text);
        ms.iter()
            .map(|m| {
                text[t[m.tokens.first].char_range.start..t[m.tokens.last].char_range.end]
                    .to_string()
            })
            .collect()
    }

    fn dict(smell: SmellKind) -> Dictionary {
        DictionarySet::bundled(Lexicon::bundled())
            .get(smell)
            .unwrap()
            .clone()
    }

    #[test]
    fn subjective_example_yields_both_terms() {
        let text = "The architecture as well as the programming must ensure a simple and efficient maintainability.";
        let ms = detect_dictionary_smell(&toks(text), &dict(SmellKind::SubjectiveLanguage));
        assert_eq!(texts(text, &ms), ["simple", "efficient"]);
    }

    #[test]
    fn multiword_phrases() {
        let text = "If the (...) quality is too low, a fault must be written to the error memory.";
        let ms = detect_dictionary_smell(&toks(text), &dict(SmellKind::AmbiguousAdverbsAdjectives));
        assert_eq!(texts(text, &ms), ["too low"]);
        let d =
            Dictionary::from_phrases(SmellKind::Loopholes, [vec!["if"], vec!["if", "possible"]]);
        let text = "Log it if possible.";
        assert_eq!(
            texts(text, &detect_dictionary_smell(&toks(text), &d)),
            ["if possible"]
        );
    }

    #[test]
    fn phrases_do_not_cross_sentences() {
        let d = Dictionary::from_phrases(SmellKind::AmbiguousAdverbsAdjectives, [["too", "low"]]);
        assert!(detect_dictionary_smell(&toks("It is too. Low values pass."), &d).is_empty());
        assert!(detect_dictionary_smell(&toks("The system must log events."), &d).is_empty());
    }

    #[test]
    fn inflected_forms_match_lemmas() {
        let d = Dictionary::from_phrases(SmellKind::SubjectiveLanguage, [["simple"]]);
        assert_eq!(
            texts(
                "a simpler design",
                &detect_dictionary_smell(&toks("a simpler design"), &d)
            ),
            ["simpler"]
        );
    }

    #[test]
    fn degree_examples() {
        let cfg = DetectorConfig::default();
        let text = "The system must provide the signal in the highest resolution that is desired by the signal customer.";
        assert_eq!(
            texts(
                text,
                &detect_degree_smell(&toks(text), SmellKind::Superlatives, &cfg)
            ),
            ["highest"]
        );
        let text = "A better solution.";
        assert_eq!(
            texts(
                text,
                &detect_degree_smell(&toks(text), SmellKind::Comparatives, &cfg)
            ),
            ["better"]
        );
        let text = "Each user and number is under test.";
        assert!(detect_degree_smell(&toks(text), SmellKind::Comparatives, &cfg).is_empty());
        assert!(detect_degree_smell(&toks(text), SmellKind::Superlatives, &cfg).is_empty());
    }

    #[test]
    fn numeric_comparison_suppression() {
        let text = "if the system takes more than 1 second to respond";
        let t = toks(text);
        let off = detect_degree_smell(&t, SmellKind::Comparatives, &DetectorConfig::default());
        assert_eq!(off[0].suppressed_by, None);
        let cfg = DetectorConfig {
            enable_numeric_comparison_suppression: true,
            ..Default::default()
        };
        let on = detect_degree_smell(&t, SmellKind::Comparatives, &cfg);
        assert_eq!(
            on[0].suppressed_by,
            Some(SuppressionReason::NumericComparisonHeuristic)
        );
        let t = toks("It must be faster than the old engine.");
        assert_eq!(
            detect_degree_smell(&t, SmellKind::Comparatives, &cfg)[0].suppressed_by,
            None
        );
    }

    #[test]
    fn negative_statements() {
        let cfg = DetectorConfig::default();
        let neg = dict(SmellKind::NegativeStatements);
        let text =
            "As a user, I do not want to see category X, so that I am not confronted with it.";
        assert_eq!(
            texts(
                text,
                &detect_negative_statements(&toks(text), Some(&neg), &cfg)
            ),
            ["not", "not"]
        );
        assert!(
            detect_negative_statements(&toks("The system must log events."), Some(&neg), &cfg)
                .is_empty()
        );
        let text = "It can't fail.";
        assert_eq!(
            texts(text, &detect_negative_statements(&toks(text), None, &cfg)),
            ["can't"]
        );
    }

    #[test]
    fn condition_suppression() {
        let cfg = DetectorConfig {
            enable_condition_suppression: true,
            ..Default::default()
        };
        let t = toks("if the user input is not zero, the system must not stop.");
        let ms = detect_negative_statements(&t, None, &cfg);
        assert_eq!(ms.len(), 2);
        assert_eq!(
            ms[0].suppressed_by,
            Some(SuppressionReason::ConditionHeuristic)
        );
        assert_eq!(ms[1].suppressed_by, None);
        let t = toks("The user must not see category X, if the filter is active.");
        assert_eq!(
            detect_negative_statements(&t, None, &cfg)[0].suppressed_by,
            None
        );
    }

    #[test]
    fn vague_pronoun_examples() {
        let text = "The software must implement services for applications, which must communicate with controller applications deployed on other controllers.";
        assert_eq!(
            texts(text, &detect_vague_pronouns(text, &toks(text))),
            ["which"]
        );
        let text = "As a visitor, I want to filter the products, so that the visitor can get an overview of selected brands and categories and their filters.";
        assert_eq!(
            texts(text, &detect_vague_pronouns(text, &toks(text))),
            ["their"]
        );
        let text = "I want it.";
        assert_eq!(
            texts(text, &detect_vague_pronouns(text, &toks(text))),
            ["I", "it"]
        );
        let text = "These kids play.";
        assert!(detect_vague_pronouns(text, &toks(text)).is_empty());
    }
}
