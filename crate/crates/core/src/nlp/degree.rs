//! Comparative and superlative detection.

use super::{normalize, Degree, Lexicon, PosTag};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeAnalysis {
    pub degree: Degree,
    /// Degree is lent by a preceding "more"/"most"/"less"/"least".
    pub periphrastic: bool,
    /// Positive form, when known.
    pub base: Option<String>,
}

impl DegreeAnalysis {
    fn none() -> Self {
        DegreeAnalysis {
            degree: Degree::None,
            periphrastic: false,
            base: None,
        }
    }
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn syllables(word: &[u8]) -> usize {
    let mut n = 0;
    let mut prev = false;
    for &c in word {
        let v = is_vowel(c) || (c == b'y' && n > 0 && !prev);
        if v && !prev {
            n += 1;
        }
        prev = v;
    }
    n
}

/// Regular -er/-est form of `base`.
pub fn inflect(base: &str, degree: Degree) -> String {
    let suffix = match degree {
        Degree::None => return base.to_string(),
        Degree::Comparative => "er",
        Degree::Superlative => "est",
    };
    let b = base.as_bytes();
    let n = b.len();
    if base.ends_with('e') {
        return format!("{base}{}", &suffix[1..]);
    }
    if n >= 2 && b[n - 1] == b'y' && !is_vowel(b[n - 2]) {
        return format!("{}i{suffix}", &base[..n - 1]);
    }
    if n >= 3
        && !is_vowel(b[n - 1])
        && !matches!(b[n - 1], b'w' | b'x' | b'y')
        && is_vowel(b[n - 2])
        && !is_vowel(b[n - 3])
        && syllables(b) == 1
    {
        return format!("{base}{}{suffix}", &base[n - 1..]);
    }
    format!("{base}{suffix}")
}

/// Recovers the positive form of a regular -er/-est word, if it is a listed adjective.
pub(crate) fn deflect(word: &str, lexicon: &Lexicon) -> Option<(String, Degree)> {
    let (stem, degree) = if let Some(s) = word.strip_suffix("est") {
        (s, Degree::Superlative)
    } else {
        let s = word.strip_suffix("er")?;
        (s, Degree::Comparative)
    };
    if stem.len() < 2 {
        return None;
    }
    let mut candidates = vec![stem.to_string()];
    if let Some(s) = stem.strip_suffix('i') {
        candidates.push(format!("{s}y"));
    }
    let sb = stem.as_bytes();
    if sb.len() >= 2 && sb[sb.len() - 1] == sb[sb.len() - 2] && !is_vowel(sb[sb.len() - 1]) {
        candidates.push(stem[..stem.len() - 1].to_string());
    }
    candidates.push(format!("{stem}e"));
    candidates
        .into_iter()
        .find(|c| lexicon.is_known_adjective(c))
        .map(|c| (c, degree))
}

/// Degree of `surface` given its tag and the preceding token.
pub fn analyze_degree(
    surface: &str,
    pos: PosTag,
    prev: Option<&str>,
    lexicon: &Lexicon,
) -> DegreeAnalysis {
    if !pos.is_gradable() {
        return DegreeAnalysis::none();
    }
    let word = normalize(surface);
    if let Some(marker) = prev.and_then(|p| lexicon.degree_marker(&normalize(p))) {
        return DegreeAnalysis {
            degree: marker,
            periphrastic: true,
            base: Some(word),
        };
    }
    if lexicon.in_degree_stoplist(&word) {
        return DegreeAnalysis::none();
    }
    let found = lexicon
        .irregular_degree(&word)
        .or_else(|| lexicon.regular_form(&word))
        .map(|(b, d)| (b.to_string(), d))
        .or_else(|| deflect(&word, lexicon));
    match found {
        Some((base, degree)) => DegreeAnalysis {
            degree,
            periphrastic: false,
            base: Some(base),
        },
        None if pos == PosTag::Adjective && word.len() > 5 && word.ends_with("iest") => {
            DegreeAnalysis {
                degree: Degree::Superlative,
                periphrastic: false,
                base: Some(format!("{}y", &word[..word.len() - 4])),
            }
        }
        None => DegreeAnalysis::none(),
    }
}
