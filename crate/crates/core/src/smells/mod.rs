//! The eight requirements smells and their detectors.
//!
//! | Smell | Mechanism |
//! |---|---|
//! | SubjectiveLanguage, AmbiguousAdverbsAdjectives, Loopholes, NonVerifiableTerms | dictionary |
//! | Superlatives, Comparatives | morphological degree |
//! | NegativeStatements | POS tag and negation word list |
//! | VaguePronouns | POS tag (substituting pronouns) |

mod detectors;
mod dictionary;

pub use detectors::{
    detect_degree_smell, detect_dictionary_smell, detect_negative_statements,
    detect_vague_pronouns, Match,
};
pub use dictionary::{Dictionary, DictionaryError, DictionarySet};

use crate::ingest::RequirementItem;
use crate::nlp::{annotate, AnnotatedToken, Lexicon};
use crate::{Span, TokenSpan};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SmellKind {
    SubjectiveLanguage,
    AmbiguousAdverbsAdjectives,
    Loopholes,
    NonVerifiableTerms,
    Superlatives,
    Comparatives,
    NegativeStatements,
    VaguePronouns,
}

impl SmellKind {
    pub const ALL: [SmellKind; 8] = [
        SmellKind::SubjectiveLanguage,
        SmellKind::AmbiguousAdverbsAdjectives,
        SmellKind::Loopholes,
        SmellKind::NonVerifiableTerms,
        SmellKind::Superlatives,
        SmellKind::Comparatives,
        SmellKind::NegativeStatements,
        SmellKind::VaguePronouns,
    ];

    /// Smells found by phrase dictionaries alone.
    pub fn is_dictionary_smell(self) -> bool {
        matches!(
            self,
            SmellKind::SubjectiveLanguage
                | SmellKind::AmbiguousAdverbsAdjectives
                | SmellKind::Loopholes
                | SmellKind::NonVerifiableTerms
        )
    }

    /// Smells that read a dictionary file (the four above plus the negation list).
    pub fn has_dictionary(self) -> bool {
        self.is_dictionary_smell() || self == SmellKind::NegativeStatements
    }

    pub fn message(self) -> &'static str {
        match self {
            SmellKind::SubjectiveLanguage => "Subjective language: the meaning of this term is not objectively defined.",
            SmellKind::AmbiguousAdverbsAdjectives => {
                "Ambiguous adverb or adjective: the term is unspecific and can be read in several ways."
            }
            SmellKind::Loopholes => "Loophole: the phrase weakens how far the requirement must be fulfilled.",
            SmellKind::NonVerifiableTerms => "Non-verifiable term: the term offers a choice and cannot be tested.",
            SmellKind::Superlatives => "Superlative: the requirement expresses a relative, best-possible quality.",
            SmellKind::Comparatives => "Comparative: the requirement compares against an unstated reference.",
            SmellKind::NegativeStatements => {
                "Negative statement: the requirement states what the system must not do."
            }
            SmellKind::VaguePronouns => "Vague pronoun: the reader has to resolve what this pronoun refers to.",
        }
    }

    pub fn improvement_hint(self) -> &'static str {
        match self {
            SmellKind::SubjectiveLanguage => {
                "Replace the term with a measurable criterion, e.g. a target value or an accepted standard."
            }
            SmellKind::AmbiguousAdverbsAdjectives => "State the intended quantity or threshold explicitly.",
            SmellKind::Loopholes => {
                "Decide whether the requirement is binding. If it is, remove the qualifier; if not, state the exact exceptions."
            }
            SmellKind::NonVerifiableTerms => {
                "Name the concrete options or the acceptance criterion that makes the statement testable."
            }
            SmellKind::Superlatives => "Name the reference and the required value instead of the extreme.",
            SmellKind::Comparatives => "Name the object of comparison or an absolute value.",
            SmellKind::NegativeStatements => "Rephrase positively: describe what the system shall do instead.",
            SmellKind::VaguePronouns => "Repeat the noun the pronoun stands for.",
        }
    }
}

impl fmt::Display for SmellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for SmellKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_alphanumeric()).collect();
        SmellKind::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(&key))
            .ok_or_else(|| format!("unknown smell `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SuppressionReason {
    /// A negation inside an "if"/"unless"/"when" clause.
    ConditionHeuristic,
    /// A comparative followed by "than" and a number.
    NumericComparisonHeuristic,
}

/// One instance of a smell in an item's text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub finding_id: String,
    pub smell: SmellKind,
    pub artifact_id: String,
    pub item_id: String,
    pub token_span: TokenSpan,
    /// Byte range within the item text.
    pub char_range: Span,
    pub matched_text: String,
    pub message: String,
    pub improvement_hint: String,
    #[serde(default)]
    pub suppressed_by: Option<SuppressionReason>,
}

impl Finding {
    pub fn is_suppressed(&self) -> bool {
        self.suppressed_by.is_some()
    }
}

/// Content hash of a finding's location; stable across runs.
pub fn finding_id(artifact_id: &str, item_id: &str, smell: SmellKind, span: Span) -> String {
    let mut h = Sha256::new();
    for part in [
        artifact_id,
        item_id,
        &smell.to_string(),
        &span.start.to_string(),
        &span.end.to_string(),
    ] {
        h.update(part.as_bytes());
        h.update([0u8]);
    }
    hex::encode(&h.finalize()[..16])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub enabled_smells: BTreeSet<SmellKind>,
    pub enable_condition_suppression: bool,
    pub enable_numeric_comparison_suppression: bool,
    /// Where dictionaries were loaded from; `None` for the bundled seeds.
    pub dictionary_dir: Option<PathBuf>,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            enabled_smells: SmellKind::ALL.into_iter().collect(),
            enable_condition_suppression: false,
            enable_numeric_comparison_suppression: false,
            dictionary_dir: None,
        }
    }
}

impl DetectorConfig {
    pub fn with_smells(smells: impl IntoIterator<Item = SmellKind>) -> Self {
        DetectorConfig {
            enabled_smells: smells.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn is_enabled(&self, smell: SmellKind) -> bool {
        self.enabled_smells.contains(&smell)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SmellError {
    #[error("smell {0} is enabled but has no dictionary")]
    MissingDictionary(SmellKind),
    #[error("no smells enabled")]
    NoSmellsEnabled,
}

/// Runs every enabled detector over the annotated tokens of `item`.
///
/// Findings are ordered by char range, then smell. Overlapping findings of
/// different smells are all kept.
pub fn detect(
    item: &RequirementItem,
    tokens: &[AnnotatedToken],
    config: &DetectorConfig,
    dictionaries: &DictionarySet,
) -> Result<Vec<Finding>, SmellError> {
    if config.enabled_smells.is_empty() {
        return Err(SmellError::NoSmellsEnabled);
    }
    let mut matches = Vec::new();
    for &smell in &config.enabled_smells {
        match smell {
            s if s.is_dictionary_smell() => {
                let dict = dictionaries
                    .get(s)
                    .ok_or(SmellError::MissingDictionary(s))?;
                matches.extend(detect_dictionary_smell(tokens, dict));
            }
            SmellKind::Superlatives | SmellKind::Comparatives => {
                matches.extend(detect_degree_smell(tokens, smell, config));
            }
            SmellKind::NegativeStatements => {
                let list = dictionaries.get(SmellKind::NegativeStatements);
                matches.extend(detect_negative_statements(tokens, list, config));
            }
            SmellKind::VaguePronouns => matches.extend(detect_vague_pronouns(&item.text, tokens)),
            _ => unreachable!("all smells handled"),
        }
    }
    let mut findings: Vec<Finding> = matches
        .into_iter()
        .map(|m| {
            let span = Span::new(
                tokens[m.tokens.first].char_range.start,
                tokens[m.tokens.last].char_range.end,
            );
            Finding {
                finding_id: finding_id(&item.artifact_id, &item.item_id, m.smell, span),
                smell: m.smell,
                artifact_id: item.artifact_id.clone(),
                item_id: item.item_id.clone(),
                token_span: m.tokens,
                char_range: span,
                matched_text: span.slice(&item.text).to_string(),
                message: m.smell.message().to_string(),
                improvement_hint: m.smell.improvement_hint().to_string(),
                suppressed_by: m.suppressed_by,
            }
        })
        .collect();
    findings.sort_by_key(|a| (a.char_range, a.smell));
    findings.dedup_by(|a, b| a.char_range == b.char_range && a.smell == b.smell);
    Ok(findings)
}

/// Annotates `item.text` with `lexicon` and runs [`detect`].
pub fn analyze_item(
    item: &RequirementItem,
    lexicon: &Lexicon,
    config: &DetectorConfig,
    dictionaries: &DictionarySet,
) -> Result<(Vec<AnnotatedToken>, Vec<Finding>), SmellError> {
    let tokens = annotate(&item.text, lexicon);
    let findings = detect(item, &tokens, config, dictionaries)?;
    Ok((tokens, findings))
}
