//! Rule-based sentence splitting.

use super::tokenize::ABBREVIATIONS;
use crate::Span;

const CLOSERS: &[char] = &[')', ']', '"', '\'', '’', '”', '»'];

/// Sentence boundaries fall after `.`, `!` or `?` (plus any closing brackets
/// or quotes) when followed by whitespace and an uppercase letter, or by the
/// end of the text. A blank line always ends a sentence. Known abbreviations
/// such as "e.g." never end one.
pub fn split_sentences(text: &str) -> Vec<Span> {
    let mut cuts = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c == '\n' {
            // blank line: newline, optional spaces, newline
            let mut j = i + 1;
            while j < chars.len() && chars[j].1 != '\n' && chars[j].1.is_whitespace() {
                j += 1;
            }
            if j < chars.len() && chars[j].1 == '\n' {
                cuts.push(pos);
            }
        } else if matches!(c, '.' | '!' | '?') {
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j].1, '.' | '!' | '?') {
                j += 1;
            }
            while j < chars.len() && CLOSERS.contains(&chars[j].1) {
                j += 1;
            }
            let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
            let boundary = if j >= chars.len() {
                true
            } else if chars[j].1.is_whitespace() {
                let mut k = j;
                while k < chars.len() && chars[k].1.is_whitespace() {
                    k += 1;
                }
                k >= chars.len() || chars[k].1.is_uppercase()
            } else {
                false
            };
            if boundary && !(c == '.' && ends_with_abbreviation(&text[..pos + 1])) {
                cuts.push(end);
            }
            i = j.max(i + 1);
            continue;
        }
        i += 1;
    }

    let mut out = Vec::new();
    let mut start = 0;
    for cut in cuts.into_iter().chain(std::iter::once(text.len())) {
        if cut < start {
            continue;
        }
        let piece = &text[start..cut];
        let lead = piece.len() - piece.trim_start().len();
        let trimmed = piece.trim();
        if !trimmed.is_empty() {
            out.push(Span::new(start + lead, start + lead + trimmed.len()));
        }
        start = cut;
    }
    out
}

fn ends_with_abbreviation(prefix: &str) -> bool {
    let word_start = prefix
        .rfind(|c: char| c.is_whitespace() || c == '(' || c == '[')
        .map_or(0, |i| i + 1);
    let word = prefix[word_start..].to_lowercase();
    ABBREVIATIONS
        .iter()
        .any(|a| word == *a || (a.contains(' ') && prefix.to_lowercase().ends_with(a)))
}
