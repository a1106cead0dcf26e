//! Phrase dictionaries for the dictionary-based smells.

use super::SmellKind;
use crate::nlp::{annotate, Lexicon};
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DictionaryError {
    #[error("cannot read dictionary {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{smell} has no dictionary")]
    NotDictionarySmell { smell: SmellKind },
}

/// Lemmatized phrases for one smell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    pub smell: SmellKind,
    phrases: BTreeSet<Vec<String>>,
}

impl Dictionary {
    /// Parses one phrase per line; `#` starts a comment line. Each phrase is
    /// tokenized and lemmatized with `lexicon` so it matches inflected text.
    pub fn parse(smell: SmellKind, text: &str, lexicon: &Lexicon) -> Dictionary {
        let phrases = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                annotate(l, lexicon)
                    .into_iter()
                    .map(|t| t.lemma)
                    .collect::<Vec<_>>()
            })
            .filter(|p| !p.is_empty())
            .collect();
        Dictionary { smell, phrases }
    }

    pub fn from_phrases<I, P, S>(smell: SmellKind, phrases: I) -> Dictionary
    where
        I: IntoIterator<Item = P>,
        P: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let phrases = phrases
            .into_iter()
            .map(|p| {
                p.into_iter()
                    .map(|s| s.as_ref().to_lowercase())
                    .collect::<Vec<_>>()
            })
            .filter(|p| !p.is_empty())
            .collect();
        Dictionary { smell, phrases }
    }

    pub fn phrases(&self) -> impl Iterator<Item = &[String]> {
        self.phrases.iter().map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub(crate) fn max_len(&self) -> usize {
        self.phrases.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub(crate) fn contains(&self, phrase: &[String]) -> bool {
        self.phrases.contains(phrase)
    }
}

/// Dictionaries keyed by smell. The NegativeStatements entry is the
/// negation word list.
#[derive(Debug, Clone, Default)]
pub struct DictionarySet {
    dictionaries: BTreeMap<SmellKind, Dictionary>,
}

fn file_name(smell: SmellKind) -> String {
    format!("{smell}.dict")
}

impl DictionarySet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The seed dictionaries shipped with the crate.
    pub fn bundled(lexicon: &Lexicon) -> DictionarySet {
        let files: [(SmellKind, &str); 5] = [
            (
                SmellKind::SubjectiveLanguage,
                include_str!("../../data/dictionaries/SubjectiveLanguage.dict"),
            ),
            (
                SmellKind::AmbiguousAdverbsAdjectives,
                include_str!("../../data/dictionaries/AmbiguousAdverbsAdjectives.dict"),
            ),
            (
                SmellKind::Loopholes,
                include_str!("../../data/dictionaries/Loopholes.dict"),
            ),
            (
                SmellKind::NonVerifiableTerms,
                include_str!("../../data/dictionaries/NonVerifiableTerms.dict"),
            ),
            (
                SmellKind::NegativeStatements,
                include_str!("../../data/dictionaries/NegativeStatements.dict"),
            ),
        ];
        let mut set = DictionarySet::new();
        for (smell, text) in files {
            set.insert(Dictionary::parse(smell, text, lexicon));
        }
        set
    }

    /// Reads `<dir>/<SmellKind>.dict` for every smell that owns a dictionary.
    /// Missing files are skipped; detection reports them if the smell is enabled.
    pub fn load_dir(dir: &Path, lexicon: &Lexicon) -> Result<DictionarySet, DictionaryError> {
        let mut set = DictionarySet::new();
        for smell in SmellKind::ALL.into_iter().filter(|s| s.has_dictionary()) {
            let path = dir.join(file_name(smell));
            match std::fs::read_to_string(&path) {
                Ok(text) => set.insert(Dictionary::parse(smell, &text, lexicon)),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                    log::debug!("no dictionary at {}", path.display());
                }
                Err(source) => return Err(DictionaryError::Io { path, source }),
            }
        }
        Ok(set)
    }

    pub fn insert(&mut self, dictionary: Dictionary) {
        self.dictionaries.insert(dictionary.smell, dictionary);
    }

    pub fn get(&self, smell: SmellKind) -> Option<&Dictionary> {
        self.dictionaries.get(&smell)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Dictionary> {
        self.dictionaries.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> &'static Lexicon {
        Lexicon::bundled()
    }

    #[test]
    fn phrases_are_lemmatized_and_deduplicated() {
        let d = Dictionary::parse(
            SmellKind::Loopholes,
            "# c\nAs far as possible\nas far as possible\n\nshould\n",
            lex(),
        );
        assert_eq!(d.len(), 2);
        assert!(d.contains(&["as".into(), "far".into(), "as".into(), "possible".into()]));
        let d = Dictionary::parse(SmellKind::SubjectiveLanguage, "easy to use", lex());
        assert_eq!(d.max_len(), 3);
    }

    #[test]
    fn bundled_seeds() {
        let set = DictionarySet::bundled(lex());
        for smell in SmellKind::ALL.into_iter().filter(|s| s.has_dictionary()) {
            assert!(!set.get(smell).unwrap().is_empty(), "{smell}");
        }
        let nv = set.get(SmellKind::NonVerifiableTerms).unwrap();
        assert!(nv.contains(&["sufficient".into()]));
        assert!(nv.contains(&["may".into()]));
    }

    #[test]
    fn load_dir_skips_missing_files() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("Loopholes.dict"), "if possible\n").unwrap();
        let set = DictionarySet::load_dir(dir.path(), lex()).unwrap();
        assert_eq!(set.get(SmellKind::Loopholes).unwrap().len(), 1);
        assert!(set.get(SmellKind::SubjectiveLanguage).is_none());
    }
}
