//! Whole-corpus analysis: discovery, ingestion, detection and aggregation.

use crate::ingest::{
    load_document_as, segment, split_user_story, CsvConfig, Format, IngestError, ItemKind,
    RequirementItem, SourceDocument, UserStoryParts,
};
use crate::metrics::{
    build_treemap, count_words, story_part_metrics, ArtifactMetrics, JsonReport, StoryInput,
    StoryPartReport, TreemapNode,
};
use crate::nlp::{annotate, Lexicon};
use crate::smells::{detect, DetectorConfig, DictionarySet, Finding, SmellError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input {0} does not exist")]
    InputNotFound(PathBuf),
    #[error("cannot walk {path}: {message}")]
    Walk { path: PathBuf, message: String },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Smell(#[from] SmellError),
}

/// A file to analyse and the id it is reported under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusFile {
    pub path: PathBuf,
    pub display: String,
}

fn is_hidden(name: &std::ffi::OsStr) -> bool {
    name.to_string_lossy().starts_with('.')
}

fn root_name(root: &Path) -> String {
    root.canonicalize()
        .ok()
        .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .or_else(|| root.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_default()
}

/// Expands inputs into files in a stable order. Directories are walked
/// recursively (hidden entries skipped) and their files are named relative
/// to the directory's parent; a file input is named by its file name.
/// Without a format override only files with a known extension are taken.
pub fn discover(
    inputs: &[PathBuf],
    format_override: Option<Format>,
) -> Result<Vec<CorpusFile>, PipelineError> {
    let mut files = Vec::new();
    for input in inputs {
        if !input.exists() {
            return Err(PipelineError::InputNotFound(input.clone()));
        }
        if input.is_file() {
            let display = input
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| input.display().to_string());
            files.push(CorpusFile {
                path: input.clone(),
                display,
            });
            continue;
        }
        let prefix = root_name(input);
        let walker = walkdir::WalkDir::new(input)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| e.depth() == 0 || !is_hidden(e.file_name()));
        for entry in walker {
            let entry = entry.map_err(|e| PipelineError::Walk {
                path: input.clone(),
                message: e.to_string(),
            })?;
            if !entry.file_type().is_file() {
                continue;
            }
            if format_override.is_none() && Format::from_path(entry.path()).is_none() {
                log::debug!("skipping {}: unknown format", entry.path().display());
                continue;
            }
            let rel = entry.path().strip_prefix(input).unwrap_or(entry.path());
            let rel: Vec<String> = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect();
            let display = if prefix.is_empty() {
                rel.join("/")
            } else {
                format!("{prefix}/{}", rel.join("/"))
            };
            files.push(CorpusFile {
                path: entry.into_path(),
                display,
            });
        }
    }
    Ok(files)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzedItem {
    pub item: RequirementItem,
    pub word_count: usize,
    pub findings: Vec<Finding>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub story: Option<UserStoryParts>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactAnalysis {
    pub artifact_id: String,
    pub folder_path: Vec<String>,
    pub format: Format,
    pub items: Vec<AnalyzedItem>,
}

impl ArtifactAnalysis {
    pub fn word_count(&self) -> usize {
        self.items.iter().map(|i| i.word_count).sum()
    }

    pub fn findings(&self) -> impl Iterator<Item = &Finding> {
        self.items.iter().flat_map(|i| &i.findings)
    }

    pub fn metrics(&self, include_suppressed: bool) -> ArtifactMetrics {
        let findings: Vec<Finding> = self.findings().cloned().collect();
        ArtifactMetrics::new(
            self.artifact_id.clone(),
            self.word_count(),
            &findings,
            include_suppressed,
        )
    }

    fn has_stories(&self) -> bool {
        self.items
            .iter()
            .any(|i| i.item.kind == ItemKind::UserStory)
    }
}

/// A file that could not be analysed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusAnalysis {
    pub artifacts: Vec<ArtifactAnalysis>,
    pub diagnostics: Vec<Diagnostic>,
}

impl CorpusAnalysis {
    pub fn findings(&self) -> impl Iterator<Item = &Finding> {
        self.artifacts.iter().flat_map(|a| a.findings())
    }

    pub fn metrics(&self, include_suppressed: bool) -> Vec<ArtifactMetrics> {
        self.artifacts
            .iter()
            .map(|a| a.metrics(include_suppressed))
            .collect()
    }

    pub fn treemap(&self, include_suppressed: bool) -> TreemapNode {
        let metrics = self.metrics(include_suppressed);
        let entries: Vec<(Vec<String>, &ArtifactMetrics)> = self
            .artifacts
            .iter()
            .zip(&metrics)
            .map(|(a, m)| (a.folder_path.clone(), m))
            .collect();
        build_treemap(&entries)
    }

    /// Story-part tallies over artifacts that contain at least one user story.
    pub fn story_parts(&self, include_suppressed: bool) -> Option<StoryPartReport> {
        let kept: Vec<Vec<Finding>> = self
            .artifacts
            .iter()
            .filter(|a| a.has_stories())
            .flat_map(|a| &a.items)
            .map(|i| {
                i.findings
                    .iter()
                    .filter(|f| include_suppressed || !f.is_suppressed())
                    .cloned()
                    .collect()
            })
            .collect();
        let items: Vec<&AnalyzedItem> = self
            .artifacts
            .iter()
            .filter(|a| a.has_stories())
            .flat_map(|a| &a.items)
            .collect();
        if items.is_empty() {
            return None;
        }
        let splits: Vec<UserStoryParts> = items
            .iter()
            .map(|i| {
                i.story
                    .clone()
                    .unwrap_or_else(|| split_user_story(&i.item.text))
            })
            .collect();
        let inputs: Vec<StoryInput<'_>> = items
            .iter()
            .zip(&splits)
            .zip(&kept)
            .map(|((i, parts), findings)| StoryInput {
                text: &i.item.text,
                parts,
                findings,
            })
            .collect();
        Some(story_part_metrics(&inputs))
    }

    pub fn report(&self, include_suppressed: bool) -> JsonReport {
        let artifacts = self.metrics(include_suppressed);
        JsonReport {
            sum: ArtifactMetrics::sum("Sum", &artifacts),
            treemap: self.treemap(include_suppressed),
            story_parts: self.story_parts(include_suppressed),
            artifacts,
        }
    }
}

/// Settings shared by every file of a run.
#[derive(Debug, Clone, Default)]
pub struct AnalysisOptions {
    pub format: Option<Format>,
    pub csv: Option<CsvConfig>,
    pub detector: DetectorConfig,
}

pub struct Analyzer<'a> {
    lexicon: &'a Lexicon,
    dictionaries: DictionarySet,
    options: AnalysisOptions,
}

impl<'a> Analyzer<'a> {
    /// Fails when an enabled dictionary smell has no dictionary.
    pub fn new(
        lexicon: &'a Lexicon,
        dictionaries: DictionarySet,
        options: AnalysisOptions,
    ) -> Result<Self, PipelineError> {
        if options.detector.enabled_smells.is_empty() {
            return Err(SmellError::NoSmellsEnabled.into());
        }
        for smell in options
            .detector
            .enabled_smells
            .iter()
            .filter(|s| s.is_dictionary_smell())
        {
            if dictionaries.get(*smell).is_none() {
                return Err(SmellError::MissingDictionary(*smell).into());
            }
        }
        Ok(Analyzer {
            lexicon,
            dictionaries,
            options,
        })
    }

    /// Bundled lexicon and dictionaries with default detector settings.
    pub fn bundled() -> Analyzer<'static> {
        let lexicon = Lexicon::bundled();
        Analyzer::new(
            lexicon,
            DictionarySet::bundled(lexicon),
            AnalysisOptions::default(),
        )
        .expect("bundled dictionaries cover every smell")
    }

    pub fn options(&self) -> &AnalysisOptions {
        &self.options
    }

    pub fn analyze_item(&self, item: RequirementItem) -> Result<AnalyzedItem, SmellError> {
        let tokens = annotate(&item.text, self.lexicon);
        let findings = detect(&item, &tokens, &self.options.detector, &self.dictionaries)?;
        let story = (item.kind == ItemKind::UserStory).then(|| split_user_story(&item.text));
        Ok(AnalyzedItem {
            word_count: count_words(&tokens),
            findings,
            story,
            item,
        })
    }

    /// Segments and analyses one document. JSON-lines documents may hold
    /// several artifacts; they are returned in first-seen order.
    pub fn analyze_document(
        &self,
        doc: &SourceDocument,
    ) -> Result<Vec<ArtifactAnalysis>, PipelineError> {
        let items = segment(doc, self.options.csv.as_ref())?;
        let mut artifacts: Vec<ArtifactAnalysis> = Vec::new();
        if doc.format != Format::JsonLines {
            artifacts.push(ArtifactAnalysis {
                artifact_id: doc.path.clone(),
                folder_path: doc.folder_path.clone(),
                format: doc.format,
                items: Vec::new(),
            });
        }
        for item in items {
            let pos = match artifacts
                .iter()
                .position(|a| a.artifact_id == item.artifact_id)
            {
                Some(p) => p,
                None => {
                    let mut folder_path: Vec<String> =
                        item.artifact_id.split('/').map(str::to_string).collect();
                    folder_path.pop();
                    artifacts.push(ArtifactAnalysis {
                        artifact_id: item.artifact_id.clone(),
                        folder_path,
                        format: doc.format,
                        items: Vec::new(),
                    });
                    artifacts.len() - 1
                }
            };
            let analyzed = self.analyze_item(item)?;
            artifacts[pos].items.push(analyzed);
        }
        Ok(artifacts)
    }

    pub fn analyze_file(&self, file: &CorpusFile) -> Result<Vec<ArtifactAnalysis>, PipelineError> {
        let doc = load_document_as(
            &file.path,
            &file.display,
            self.options.format,
            self.options.csv.as_ref(),
        )?;
        self.analyze_document(&doc)
    }

    /// Analyses files in parallel. Output order follows `files`; a file that
    /// fails is reported as a diagnostic and skipped.
    pub fn analyze_files(&self, files: &[CorpusFile]) -> CorpusAnalysis {
        let results: Vec<Result<Vec<ArtifactAnalysis>, PipelineError>> =
            files.par_iter().map(|f| self.analyze_file(f)).collect();
        let mut out = CorpusAnalysis::default();
        for (file, result) in files.iter().zip(results) {
            match result {
                Ok(artifacts) => out.artifacts.extend(artifacts),
                Err(e) => {
                    log::warn!("skipping {}: {e}", file.display);
                    out.diagnostics.push(Diagnostic {
                        path: file.display.clone(),
                        message: e.to_string(),
                    });
                }
            }
        }
        out
    }

    pub fn analyze_inputs(&self, inputs: &[PathBuf]) -> Result<CorpusAnalysis, PipelineError> {
        let files = discover(inputs, self.options.format)?;
        Ok(self.analyze_files(&files))
    }
}
