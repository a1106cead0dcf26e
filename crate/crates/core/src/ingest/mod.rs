//! Loading requirements artifacts and cutting them into addressable items.
//!
//! Supported inputs are plain text (blank-line separated blocks), Markdown
//! (heading-delimited sections), CSV (one row per item, configurable id and
//! text columns) and JSON lines (`{"artifact", "item_id", "text"}` objects).

mod story;

pub use story::{split_user_story, StoryPart, UserStoryParts};

use crate::Span;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::path::{Component, Path};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} is not valid UTF-8 (first invalid byte at offset {offset})")]
    Encoding { path: String, offset: usize },
    #[error("cannot infer format of {path}; use a format override")]
    UnknownFormat { path: String },
    #[error("CSV column `{column}` not found in header of {path}")]
    CsvColumnMissing { path: String, column: String },
    #[error("CSV document {path} needs an id and a text column")]
    CsvConfigMissing { path: String },
    #[error("malformed CSV in {path}: {message}")]
    Csv { path: String, message: String },
    #[error("{path}:{line}: {message}")]
    JsonShape {
        path: String,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Format {
    PlainText,
    Markdown,
    Csv,
    JsonLines,
}

impl Format {
    /// Extension mapping: `.txt`, `.md`, `.csv`, `.jsonl`.
    pub fn from_path(path: &Path) -> Option<Format> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "txt" | "text" => Some(Format::PlainText),
            "md" | "markdown" => Some(Format::Markdown),
            "csv" => Some(Format::Csv),
            "jsonl" | "ndjson" => Some(Format::JsonLines),
            _ => None,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "txt" | "text" | "plain" | "plaintext" => Ok(Format::PlainText),
            "md" | "markdown" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "jsonl" | "jsonlines" | "ndjson" => Ok(Format::JsonLines),
            other => Err(format!(
                "unknown format `{other}` (expected txt, md, csv or jsonl)"
            )),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Format::PlainText => "txt",
            Format::Markdown => "md",
            Format::Csv => "csv",
            Format::JsonLines => "jsonl",
        };
        f.write_str(s)
    }
}

/// Names the CSV columns holding item ids and requirement text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvConfig {
    pub id_column: String,
    pub text_column: String,
}

impl CsvConfig {
    pub fn new(id_column: impl Into<String>, text_column: impl Into<String>) -> Self {
        CsvConfig {
            id_column: id_column.into(),
            text_column: text_column.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceDocument {
    /// Display path, `/`-separated. Also the artifact id for non-JSONL formats.
    pub path: String,
    pub format: Format,
    pub raw_text: String,
    pub folder_path: Vec<String>,
}

impl SourceDocument {
    /// Builds a document from in-memory text. `path` is only used for ids.
    pub fn from_text(path: &str, format: Format, text: impl Into<String>) -> Self {
        let path = normalize_display_path(Path::new(path));
        let folder_path = folder_components(&path);
        SourceDocument {
            path,
            format,
            raw_text: text.into(),
            folder_path,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ItemKind {
    FreeText,
    SectionedText,
    CsvRow,
    UserStory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementItem {
    pub item_id: String,
    pub artifact_id: String,
    pub text: String,
    /// Byte range into the source document's text.
    pub char_range: Span,
    pub kind: ItemKind,
}

/// Reads `path` from disk. The display path is `path` itself.
pub fn load_document(
    path: &Path,
    format_hint: Option<Format>,
    csv_config: Option<&CsvConfig>,
) -> Result<SourceDocument, IngestError> {
    let display = normalize_display_path(path);
    load_document_as(path, &display, format_hint, csv_config)
}

/// Reads `path` from disk but records it under `display_path` (usually the
/// path relative to the corpus root).
pub fn load_document_as(
    path: &Path,
    display_path: &str,
    format_hint: Option<Format>,
    csv_config: Option<&CsvConfig>,
) -> Result<SourceDocument, IngestError> {
    let format = format_hint
        .or_else(|| Format::from_path(path))
        .ok_or_else(|| IngestError::UnknownFormat {
            path: display_path.to_string(),
        })?;
    let bytes = std::fs::read(path).map_err(|source| IngestError::Io {
        path: display_path.to_string(),
        source,
    })?;
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(&bytes);
    let raw_text = std::str::from_utf8(bytes)
        .map_err(|e| IngestError::Encoding {
            path: display_path.to_string(),
            offset: e.valid_up_to(),
        })?
        .to_string();
    let doc = SourceDocument {
        path: display_path.to_string(),
        format,
        folder_path: folder_components(display_path),
        raw_text,
    };
    if format == Format::Csv {
        if let Some(cfg) = csv_config {
            check_csv_header(&doc, cfg)?;
        }
    }
    Ok(doc)
}

pub fn segment(
    doc: &SourceDocument,
    csv_config: Option<&CsvConfig>,
) -> Result<Vec<RequirementItem>, IngestError> {
    let mut items = match doc.format {
        Format::PlainText => segment_plain(doc),
        Format::Markdown => segment_markdown(doc),
        Format::Csv => {
            let cfg = csv_config.ok_or_else(|| IngestError::CsvConfigMissing {
                path: doc.path.clone(),
            })?;
            segment_csv(doc, cfg)?
        }
        Format::JsonLines => segment_jsonl(doc)?,
    };
    for item in &mut items {
        if split_user_story(&item.text).conformant {
            item.kind = ItemKind::UserStory;
        }
    }
    Ok(items)
}

fn normalize_display_path(path: &Path) -> String {
    path.components()
        .filter_map(|c| match c {
            Component::Normal(s) => Some(s.to_string_lossy().into_owned()),
            _ => None,
        })
        .collect::<Vec<_>>()
        .join("/")
}

fn folder_components(display_path: &str) -> Vec<String> {
    let mut parts: Vec<String> = display_path
        .split('/')
        .filter(|p| !p.is_empty())
        .map(str::to_string)
        .collect();
    parts.pop();
    parts
}

fn trimmed_span(text: &str, start: usize, end: usize) -> Option<Span> {
    let slice = &text[start..end];
    let lead = slice.len() - slice.trim_start().len();
    let trimmed = slice.trim();
    if trimmed.is_empty() {
        return None;
    }
    Some(Span::new(start + lead, start + lead + trimmed.len()))
}

/// Line records `(start, end_without_newline, next_line_start)`.
fn lines_with_offsets(text: &str) -> impl Iterator<Item = (usize, usize)> + '_ {
    let mut pos = 0;
    std::iter::from_fn(move || {
        if pos >= text.len() {
            return None;
        }
        let start = pos;
        let rest = &text[start..];
        let (end, next) = match rest.find('\n') {
            Some(i) => (start + i, start + i + 1),
            None => (text.len(), text.len()),
        };
        pos = next;
        let end = if end > start && text.as_bytes()[end - 1] == b'\r' {
            end - 1
        } else {
            end
        };
        Some((start, end))
    })
}

fn segment_plain(doc: &SourceDocument) -> Vec<RequirementItem> {
    let text = &doc.raw_text;
    let mut items = Vec::new();
    let mut block_start: Option<usize> = None;
    let mut block_end = 0;
    let flush = |start: usize, end: usize, items: &mut Vec<RequirementItem>| {
        if let Some(span) = trimmed_span(text, start, end) {
            let n = items.len() + 1;
            items.push(RequirementItem {
                item_id: n.to_string(),
                artifact_id: doc.path.clone(),
                text: span.slice(text).to_string(),
                char_range: span,
                kind: ItemKind::FreeText,
            });
        }
    };
    for (start, end) in lines_with_offsets(text) {
        if text[start..end].trim().is_empty() {
            if let Some(bs) = block_start.take() {
                flush(bs, block_end, &mut items);
            }
        } else {
            block_start.get_or_insert(start);
            block_end = end;
        }
    }
    if let Some(bs) = block_start {
        flush(bs, block_end, &mut items);
    }
    items
}

fn heading_text(line: &str) -> Option<&str> {
    let trimmed = line.trim_start();
    if line.len() - trimmed.len() > 3 {
        return None;
    }
    let hashes = trimmed.bytes().take_while(|&b| b == b'#').count();
    if hashes == 0 || hashes > 6 {
        return None;
    }
    let rest = &trimmed[hashes..];
    if !rest.is_empty() && !rest.starts_with([' ', '\t']) {
        return None;
    }
    Some(rest.trim().trim_end_matches('#').trim())
}

fn segment_markdown(doc: &SourceDocument) -> Vec<RequirementItem> {
    let text = &doc.raw_text;
    // (heading, body_start, body_end)
    let mut sections: Vec<(String, usize, usize)> = Vec::new();
    let mut current: (String, usize) = (String::new(), 0);
    let mut in_fence = false;
    for (start, end) in lines_with_offsets(text) {
        let line = &text[start..end];
        if line.trim_start().starts_with("```") {
            in_fence = !in_fence;
        }
        if in_fence {
            continue;
        }
        if let Some(h) = heading_text(line) {
            sections.push((std::mem::take(&mut current.0), current.1, start));
            let next = if end < text.len() && text[end..].starts_with("\r\n") {
                end + 2
            } else {
                (end + 1).min(text.len())
            };
            current = (h.to_string(), next);
        }
    }
    sections.push((current.0, current.1, text.len()));

    let mut items = Vec::new();
    for (index, (heading, start, end)) in sections.into_iter().enumerate() {
        let Some(span) = trimmed_span(text, start, end.max(start)) else {
            continue;
        };
        let item_id = if heading.is_empty() {
            format!("{index}")
        } else {
            format!("{index} {heading}")
        };
        items.push(RequirementItem {
            item_id,
            artifact_id: doc.path.clone(),
            text: span.slice(text).to_string(),
            char_range: span,
            kind: ItemKind::SectionedText,
        });
    }
    items
}

fn check_csv_header(doc: &SourceDocument, cfg: &CsvConfig) -> Result<(usize, usize), IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(doc.raw_text.as_bytes());
    let headers = reader.headers().map_err(|e| IngestError::Csv {
        path: doc.path.clone(),
        message: e.to_string(),
    })?;
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| IngestError::CsvColumnMissing {
                path: doc.path.clone(),
                column: name.to_string(),
            })
    };
    Ok((find(&cfg.id_column)?, find(&cfg.text_column)?))
}

/// Disambiguates repeated ids within one artifact with `#2`, `#3`, ... suffixes.
#[derive(Default)]
struct IdAllocator {
    seen: HashMap<(String, String), usize>,
}

impl IdAllocator {
    fn allocate(&mut self, artifact: &str, id: &str) -> String {
        let n = self
            .seen
            .entry((artifact.to_string(), id.to_string()))
            .and_modify(|n| *n += 1)
            .or_insert(1);
        if *n == 1 {
            id.to_string()
        } else {
            format!("{id}#{n}")
        }
    }
}

/// Locates `needle` verbatim inside `text[within]`; falls back to the whole
/// window when the stored text was unescaped and no longer matches.
fn locate(text: &str, within: Span, needle: &str) -> Span {
    let window = within.slice(text);
    match window.find(needle) {
        Some(i) => Span::new(within.start + i, within.start + i + needle.len()),
        None => within,
    }
}

fn segment_csv(doc: &SourceDocument, cfg: &CsvConfig) -> Result<Vec<RequirementItem>, IngestError> {
    let (id_idx, text_idx) = check_csv_header(doc, cfg)?;
    let text = &doc.raw_text;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| IngestError::Csv {
        path: doc.path.clone(),
        message: e.to_string(),
    };
    reader.headers().map_err(csv_err)?;
    let mut items = Vec::new();
    let mut ids = IdAllocator::default();
    let mut record = csv::StringRecord::new();
    let mut row = 0usize;
    loop {
        let start = reader.position().byte() as usize;
        if !reader.read_record(&mut record).map_err(csv_err)? {
            break;
        }
        row += 1;
        let end = (reader.position().byte() as usize).min(text.len());
        let cell = record.get(text_idx).unwrap_or("").trim();
        if cell.is_empty() {
            continue;
        }
        let raw_id = record.get(id_idx).unwrap_or("").trim();
        let raw_id = if raw_id.is_empty() {
            format!("row{row}")
        } else {
            raw_id.to_string()
        };
        let record_span = trimmed_span(text, start, end).unwrap_or(Span::new(start, end));
        items.push(RequirementItem {
            item_id: ids.allocate(&doc.path, &raw_id),
            artifact_id: doc.path.clone(),
            text: cell.to_string(),
            char_range: locate(text, record_span, cell),
            kind: ItemKind::CsvRow,
        });
    }
    Ok(items)
}

fn segment_jsonl(doc: &SourceDocument) -> Result<Vec<RequirementItem>, IngestError> {
    let text = &doc.raw_text;
    let mut items = Vec::new();
    let mut ids = IdAllocator::default();
    for (line_no, (start, end)) in lines_with_offsets(text).enumerate() {
        let line_no = line_no + 1;
        let line = &text[start..end];
        if line.trim().is_empty() {
            continue;
        }
        let shape_err = |message: String| IngestError::JsonShape {
            path: doc.path.clone(),
            line: line_no,
            message,
        };
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| shape_err(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| shape_err("expected a JSON object".into()))?;
        let field = |key: &str| -> Result<&str, IngestError> {
            obj.get(key)
                .and_then(|v| v.as_str())
                .ok_or_else(|| shape_err(format!("missing string field `{key}`")))
        };
        let artifact = field("artifact")?;
        let item_id = field("item_id")?;
        let body = field("text")?.trim();
        if body.is_empty() {
            continue;
        }
        items.push(RequirementItem {
            item_id: ids.allocate(artifact, item_id),
            artifact_id: artifact.to_string(),
            text: body.to_string(),
            char_range: locate(text, Span::new(start, end), body),
            kind: ItemKind::FreeText,
        });
    }
    Ok(items)
}
