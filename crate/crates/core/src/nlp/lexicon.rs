//! Word tables behind the rule tagger, lemmatizer and degree analysis.
//!
//! A lexicon directory holds:
//!
//! ```text
//! entries.tsv            surface<TAB>POS<TAB>lemma
//! suffixes.tsv           suffix<TAB>POS            (ordered, first match wins)
//! irregular_degrees.tsv  form<TAB>base<TAB>Comparative|Superlative
//! degree_markers.tsv     auxiliary<TAB>Comparative|Superlative
//! adjectives.tsv         base<TAB>regular|periphrastic
//! degree_stoplist.txt    one word per line
//! closed/{personal_pronouns,ambiguous_pronouns,determiners,negations,numbers}.txt
//! ```
//!
//! `#` starts a comment line in every file.

use super::degree::inflect;
use super::{normalize, Degree, PosTag};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("`{word}` is listed in both {first:?} and {second:?}")]
    OverlappingClosedClasses {
        word: String,
        first: ClosedClass,
        second: ClosedClass,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClosedClass {
    PersonalPronoun,
    AmbiguousPronoun,
    Determiner,
    Negation,
    Number,
}

impl ClosedClass {
    pub const ALL: [ClosedClass; 5] = [
        ClosedClass::PersonalPronoun,
        ClosedClass::AmbiguousPronoun,
        ClosedClass::Determiner,
        ClosedClass::Negation,
        ClosedClass::Number,
    ];

    fn file_name(self) -> &'static str {
        match self {
            ClosedClass::PersonalPronoun => "personal_pronouns.txt",
            ClosedClass::AmbiguousPronoun => "ambiguous_pronouns.txt",
            ClosedClass::Determiner => "determiners.txt",
            ClosedClass::Negation => "negations.txt",
            ClosedClass::Number => "numbers.txt",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ClosedClasses {
    sets: BTreeMap<ClosedClass, BTreeSet<String>>,
}

impl ClosedClasses {
    pub fn words(&self, class: ClosedClass) -> impl Iterator<Item = &str> {
        self.sets
            .get(&class)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    pub fn class_of(&self, word: &str) -> Option<ClosedClass> {
        self.sets
            .iter()
            .find(|(_, set)| set.contains(word))
            .map(|(class, _)| *class)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inflection {
    /// -er / -est
    Regular,
    /// more / most
    Periphrastic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Entry {
    pub pos: PosTag,
    pub lemma: String,
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: HashMap<String, Entry>,
    suffix_rules: Vec<(String, PosTag)>,
    irregular_degrees: HashMap<String, (String, Degree)>,
    degree_markers: HashMap<String, Degree>,
    adjectives: BTreeMap<String, Inflection>,
    regular_forms: HashMap<String, (String, Degree)>,
    degree_stoplist: HashSet<String>,
    closed: ClosedClasses,
    verb_lemmas: HashSet<String>,
}

/// Raw file contents, one field per lexicon file.
#[derive(Debug, Clone, Default)]
pub struct LexiconSources {
    pub entries: String,
    pub suffixes: String,
    pub irregular_degrees: String,
    pub degree_markers: String,
    pub adjectives: String,
    pub degree_stoplist: String,
    pub closed: Vec<(ClosedClass, String)>,
}

macro_rules! bundled_file {
    ($name:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/lexicon/", $name))
    };
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn columns<'a>(
    file: &str,
    line: usize,
    text: &'a str,
    n: usize,
) -> Result<Vec<&'a str>, LexiconError> {
    let cols: Vec<&str> = text.split('\t').map(str::trim).collect();
    if cols.len() != n || cols.iter().any(|c| c.is_empty()) {
        return Err(LexiconError::Parse {
            file: file.to_string(),
            line,
            message: format!("expected {n} tab-separated columns"),
        });
    }
    Ok(cols)
}

fn parse_field<T: FromStr<Err = String>>(
    file: &str,
    line: usize,
    s: &str,
) -> Result<T, LexiconError> {
    s.parse().map_err(|message| LexiconError::Parse {
        file: file.to_string(),
        line,
        message,
    })
}

impl Lexicon {
    /// The English lexicon shipped with the crate.
    pub fn bundled() -> &'static Lexicon {
        static LEXICON: OnceLock<Lexicon> = OnceLock::new();
        LEXICON.get_or_init(|| {
            Lexicon::from_sources(&Self::bundled_sources()).expect("bundled lexicon is valid")
        })
    }

    pub fn bundled_sources() -> LexiconSources {
        LexiconSources {
            entries: bundled_file!("entries.tsv").into(),
            suffixes: bundled_file!("suffixes.tsv").into(),
            irregular_degrees: bundled_file!("irregular_degrees.tsv").into(),
            degree_markers: bundled_file!("degree_markers.tsv").into(),
            adjectives: bundled_file!("adjectives.tsv").into(),
            degree_stoplist: bundled_file!("degree_stoplist.txt").into(),
            closed: vec![
                (
                    ClosedClass::PersonalPronoun,
                    bundled_file!("closed/personal_pronouns.txt").into(),
                ),
                (
                    ClosedClass::AmbiguousPronoun,
                    bundled_file!("closed/ambiguous_pronouns.txt").into(),
                ),
                (
                    ClosedClass::Determiner,
                    bundled_file!("closed/determiners.txt").into(),
                ),
                (
                    ClosedClass::Negation,
                    bundled_file!("closed/negations.txt").into(),
                ),
                (
                    ClosedClass::Number,
                    bundled_file!("closed/numbers.txt").into(),
                ),
            ],
        }
    }

    /// Loads a lexicon directory (layout in the module docs).
    pub fn load_dir(dir: &Path) -> Result<Lexicon, LexiconError> {
        let read = |rel: &str| {
            let path = dir.join(rel);
            std::fs::read_to_string(&path).map_err(|source| LexiconError::Io {
                path: path.display().to_string(),
                source,
            })
        };
        let mut closed = Vec::new();
        for class in ClosedClass::ALL {
            closed.push((class, read(&format!("closed/{}", class.file_name()))?));
        }
        Lexicon::from_sources(&LexiconSources {
            entries: read("entries.tsv")?,
            suffixes: read("suffixes.tsv")?,
            irregular_degrees: read("irregular_degrees.tsv")?,
            degree_markers: read("degree_markers.tsv")?,
            adjectives: read("adjectives.tsv")?,
            degree_stoplist: read("degree_stoplist.txt")?,
            closed,
        })
    }

    pub fn from_sources(src: &LexiconSources) -> Result<Lexicon, LexiconError> {
        let mut closed = ClosedClasses::default();
        let mut owner: HashMap<String, ClosedClass> = HashMap::new();
        for (class, text) in &src.closed {
            for (_, word) in content_lines(text) {
                let word = normalize(word);
                if let Some(&first) = owner.get(&word) {
                    if first != *class {
                        return Err(LexiconError::OverlappingClosedClasses {
                            word,
                            first,
                            second: *class,
                        });
                    }
                }
                owner.insert(word.clone(), *class);
                closed.sets.entry(*class).or_default().insert(word);
            }
        }

        let mut entries = HashMap::new();
        for (line, text) in content_lines(&src.entries) {
            let cols = columns("entries.tsv", line, text, 3)?;
            let pos = parse_field("entries.tsv", line, cols[1])?;
            entries.entry(normalize(cols[0])).or_insert(Entry {
                pos,
                lemma: normalize(cols[2]),
            });
        }

        let mut suffix_rules = Vec::new();
        for (line, text) in content_lines(&src.suffixes) {
            let cols = columns("suffixes.tsv", line, text, 2)?;
            suffix_rules.push((
                normalize(cols[0]),
                parse_field("suffixes.tsv", line, cols[1])?,
            ));
        }

        let mut irregular_degrees = HashMap::new();
        for (line, text) in content_lines(&src.irregular_degrees) {
            let cols = columns("irregular_degrees.tsv", line, text, 3)?;
            let degree: Degree = parse_field("irregular_degrees.tsv", line, cols[2])?;
            if degree == Degree::None {
                return Err(LexiconError::Parse {
                    file: "irregular_degrees.tsv".into(),
                    line,
                    message: "irregular forms must be Comparative or Superlative".into(),
                });
            }
            irregular_degrees.insert(normalize(cols[0]), (normalize(cols[1]), degree));
        }

        let mut degree_markers = HashMap::new();
        for (line, text) in content_lines(&src.degree_markers) {
            let cols = columns("degree_markers.tsv", line, text, 2)?;
            let degree: Degree = parse_field("degree_markers.tsv", line, cols[1])?;
            degree_markers.insert(normalize(cols[0]), degree);
        }

        let mut adjectives = BTreeMap::new();
        for (line, text) in content_lines(&src.adjectives) {
            let cols = columns("adjectives.tsv", line, text, 2)?;
            let inflection = match cols[1] {
                "regular" => Inflection::Regular,
                "periphrastic" => Inflection::Periphrastic,
                other => {
                    return Err(LexiconError::Parse {
                        file: "adjectives.tsv".into(),
                        line,
                        message: format!("unknown inflection `{other}`"),
                    })
                }
            };
            adjectives.insert(normalize(cols[0]), inflection);
        }

        let degree_stoplist: HashSet<String> = content_lines(&src.degree_stoplist)
            .map(|(_, w)| normalize(w))
            .collect();

        let mut regular_forms = HashMap::new();
        for (base, inflection) in &adjectives {
            entries.entry(base.clone()).or_insert(Entry {
                pos: PosTag::Adjective,
                lemma: base.clone(),
            });
            if *inflection == Inflection::Regular {
                for degree in [Degree::Comparative, Degree::Superlative] {
                    let form = inflect(base, degree);
                    regular_forms.entry(form).or_insert((base.clone(), degree));
                }
            }
        }
        for (form, (base, _)) in &irregular_degrees {
            entries.entry(form.clone()).or_insert(Entry {
                pos: PosTag::Adjective,
                lemma: base.clone(),
            });
        }

        let verb_lemmas = entries
            .values()
            .filter(|e| e.pos == PosTag::Verb)
            .map(|e| e.lemma.clone())
            .collect();

        Ok(Lexicon {
            entries,
            suffix_rules,
            irregular_degrees,
            degree_markers,
            adjectives,
            regular_forms,
            degree_stoplist,
            closed,
            verb_lemmas,
        })
    }

    pub(crate) fn entry(&self, word: &str) -> Option<&Entry> {
        self.entries.get(word)
    }

    /// POS of a known surface form (lowercased), if listed.
    pub fn entry_pos(&self, word: &str) -> Option<PosTag> {
        self.entries.get(&normalize(word)).map(|e| e.pos)
    }

    pub fn closed_classes(&self) -> &ClosedClasses {
        &self.closed
    }

    pub fn closed_class(&self, word: &str) -> Option<ClosedClass> {
        self.closed.class_of(word)
    }

    /// First suffix rule matching `word`; the stem must keep at least two characters.
    pub fn suffix_tag(&self, word: &str) -> Option<PosTag> {
        self.suffix_rules
            .iter()
            .find(|(suffix, _)| word.len() >= suffix.len() + 2 && word.ends_with(suffix.as_str()))
            .map(|(_, pos)| *pos)
    }

    pub fn irregular_degree(&self, word: &str) -> Option<(&str, Degree)> {
        self.irregular_degrees
            .get(word)
            .map(|(base, d)| (base.as_str(), *d))
    }

    pub fn irregular_degrees(&self) -> impl Iterator<Item = (&str, &str, Degree)> {
        self.irregular_degrees
            .iter()
            .map(|(form, (base, d))| (form.as_str(), base.as_str(), *d))
    }

    pub fn degree_marker(&self, word: &str) -> Option<Degree> {
        self.degree_markers.get(word).copied()
    }

    /// Known regular comparative/superlative form of a listed adjective.
    pub fn regular_form(&self, word: &str) -> Option<(&str, Degree)> {
        self.regular_forms
            .get(word)
            .map(|(base, d)| (base.as_str(), *d))
    }

    pub fn is_known_adjective(&self, base: &str) -> bool {
        self.adjectives.contains_key(base)
    }

    pub fn adjectives(&self) -> impl Iterator<Item = (&str, Inflection)> {
        self.adjectives.iter().map(|(b, i)| (b.as_str(), *i))
    }

    pub fn in_degree_stoplist(&self, word: &str) -> bool {
        self.degree_stoplist.contains(word)
    }

    pub fn is_verb_lemma(&self, word: &str) -> bool {
        self.verb_lemmas.contains(word)
    }
}
