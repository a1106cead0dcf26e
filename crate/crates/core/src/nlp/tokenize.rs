//! Whitespace tokenizer that peels punctuation off word edges.

use crate::Span;

/// Abbreviations kept whole (trailing period included) by the tokenizer and
/// never treated as sentence ends.
pub const ABBREVIATIONS: &[&str] = &[
    "e.g.", "i.e.", "etc.", "vs.", "cf.", "approx.", "incl.", "excl.", "resp.", "fig.", "ca.",
    "esp.", "et al.", "mr.", "mrs.", "dr.", "z.b.", "u.a.", "bzw.", "d.h.",
];

pub fn is_abbreviation(word: &str) -> bool {
    let lower = word.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

/// True for characters that are split off word edges.
fn is_edge_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

/// A token produced by [`tokenize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawToken<'a> {
    pub surface: &'a str,
    pub span: Span,
}

impl RawToken<'_> {
    pub fn is_punct(&self) -> bool {
        !self.surface.chars().any(char::is_alphanumeric)
    }
}

/// Splits on whitespace, then separates leading and trailing punctuation into
/// single-character tokens. Hyphenated words, decimal numbers and known
/// abbreviations stay whole; a chunk made only of punctuation (`...`, `(...)`)
/// is one token.
pub fn tokenize(text: &str) -> Vec<RawToken<'_>> {
    let mut out = Vec::new();
    for (chunk_start, chunk) in whitespace_chunks(text) {
        push_chunk(text, chunk_start, chunk, &mut out);
    }
    out
}

fn whitespace_chunks(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest_start = 0;
    std::iter::from_fn(move || {
        let rest = &text[rest_start..];
        let skip = rest.len() - rest.trim_start().len();
        let start = rest_start + skip;
        if start >= text.len() {
            return None;
        }
        let len = text[start..]
            .find(char::is_whitespace)
            .unwrap_or(text.len() - start);
        rest_start = start + len;
        Some((start, &text[start..start + len]))
    })
}

fn push_chunk<'a>(text: &'a str, start: usize, chunk: &'a str, out: &mut Vec<RawToken<'a>>) {
    let push = |s: usize, e: usize, out: &mut Vec<RawToken<'a>>| {
        out.push(RawToken {
            surface: &text[s..e],
            span: Span::new(s, e),
        })
    };
    if !chunk.chars().any(char::is_alphanumeric) {
        push(start, start + chunk.len(), out);
        return;
    }

    // leading punctuation, one token per character
    let mut core_start = start;
    for (i, c) in chunk.char_indices() {
        if !is_edge_punct(c) {
            break;
        }
        push(start + i, start + i + c.len_utf8(), out);
        core_start = start + i + c.len_utf8();
    }

    let core_chunk = &text[core_start..start + chunk.len()];
    let mut core_end = core_start + core_chunk.len();
    // abbreviations keep their trailing period(s)
    let abbrev_len = ABBREVIATIONS
        .iter()
        .filter(|a| !a.contains(' '))
        .filter_map(|a| {
            let n = a.len();
            let fits = core_chunk.len() >= n
                && core_chunk.is_char_boundary(n)
                && core_chunk[..n].eq_ignore_ascii_case(a)
                && core_chunk[n..].chars().all(is_edge_punct);
            fits.then_some(n)
        })
        .max();
    let word_end = match abbrev_len {
        Some(n) => core_start + n,
        None => {
            let trimmed = core_chunk.trim_end_matches(is_edge_punct);
            core_start + trimmed.len()
        }
    };
    push(core_start, word_end, out);
    core_end = core_end.max(word_end);
    for (i, c) in text[word_end..core_end].char_indices() {
        push(word_end + i, word_end + i + c.len_utf8(), out);
    }
}
