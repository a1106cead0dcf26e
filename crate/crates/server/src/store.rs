//! On-disk run store.
//!
//! ```text
//! <store>/runs/<run_id>/run.json        header: id, timestamp, counts
//! <store>/runs/<run_id>/items.jsonl     one analysed item per line
//! <store>/runs/<run_id>/findings.jsonl  one finding per line
//! <store>/runs/<run_id>/metrics.jsonl   one artifact's metrics per line
//! <store>/runs/<run_id>/reviews.jsonl   append-only review log
//! ```

use crate::review::{ReviewLog, ReviewRecord};
use chrono::{DateTime, Utc};
use reqsmell_core::ingest::{Format, RequirementItem};
use reqsmell_core::metrics::{build_treemap, ArtifactMetrics, TreemapNode};
use reqsmell_core::pipeline::{CorpusAnalysis, Diagnostic};
use reqsmell_core::smells::{Finding, SmellKind};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0} is not a run directory (no run.json)")]
    NotARun(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub run_id: String,
    pub created_at: DateTime<Utc>,
    pub artifacts: usize,
    pub findings: usize,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredItem {
    #[serde(flatten)]
    pub item: RequirementItem,
    pub word_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredMetrics {
    #[serde(flatten)]
    pub metrics: ArtifactMetrics,
    pub folder_path: Vec<String>,
    pub format: Format,
}

fn write_jsonl<T: Serialize>(
    path: &Path,
    rows: impl IntoIterator<Item = T>,
) -> Result<(), StoreError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for row in rows {
        serde_json::to_writer(&mut w, &row).map_err(|e| io_err(path)(e.into()))?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.into_inner()
        .map_err(|e| io_err(path)(e.into_error()))?
        .sync_all()
        .map_err(io_err(path))
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, StoreError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| StoreError::Corrupt {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Immutable contents of one run.
#[derive(Debug, Clone)]
pub struct RunData {
    pub dir: PathBuf,
    pub meta: RunMeta,
    pub items: Vec<StoredItem>,
    pub findings: Vec<Finding>,
    pub artifacts: Vec<StoredMetrics>,
    finding_index: HashMap<String, usize>,
}

impl RunData {
    pub fn load(dir: &Path) -> Result<RunData, StoreError> {
        let meta_path = dir.join("run.json");
        if !meta_path.exists() {
            return Err(StoreError::NotARun(dir.to_path_buf()));
        }
        let meta_text = std::fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
        let meta: RunMeta = serde_json::from_str(&meta_text).map_err(|e| StoreError::Corrupt {
            path: meta_path.clone(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let items = read_jsonl(&dir.join("items.jsonl"))?;
        let findings: Vec<Finding> = read_jsonl(&dir.join("findings.jsonl"))?;
        let artifacts = read_jsonl(&dir.join("metrics.jsonl"))?;
        let finding_index = findings
            .iter()
            .enumerate()
            .map(|(i, f)| (f.finding_id.clone(), i))
            .collect();
        Ok(RunData {
            dir: dir.to_path_buf(),
            meta,
            items,
            findings,
            artifacts,
            finding_index,
        })
    }

    pub fn finding(&self, finding_id: &str) -> Option<&Finding> {
        self.finding_index
            .get(finding_id)
            .map(|&i| &self.findings[i])
    }

    pub fn artifact(&self, artifact_id: &str) -> Option<&StoredMetrics> {
        self.artifacts
            .iter()
            .find(|a| a.metrics.artifact_id == artifact_id)
    }

    /// Metrics and treemap over the findings `keep` accepts.
    pub fn metrics_where(&self, keep: impl Fn(&Finding) -> bool) -> Vec<StoredMetrics> {
        self.artifacts
            .iter()
            .map(|a| {
                let findings: Vec<Finding> = self
                    .findings
                    .iter()
                    .filter(|f| f.artifact_id == a.metrics.artifact_id && keep(f))
                    .cloned()
                    .collect();
                StoredMetrics {
                    metrics: ArtifactMetrics::new(
                        a.metrics.artifact_id.clone(),
                        a.metrics.word_count,
                        &findings,
                        true,
                    ),
                    folder_path: a.folder_path.clone(),
                    format: a.format,
                }
            })
            .collect()
    }

    pub fn treemap_where(
        &self,
        keep: impl Fn(&Finding) -> bool,
        smell: Option<SmellKind>,
    ) -> TreemapNode {
        let metrics = self.metrics_where(keep);
        let entries: Vec<(Vec<String>, &ArtifactMetrics)> = metrics
            .iter()
            .map(|m| (m.folder_path.clone(), &m.metrics))
            .collect();
        let tree = build_treemap(&entries);
        match smell {
            Some(s) => tree.for_smell(s),
            None => tree,
        }
    }
}

/// A directory holding `runs/<run_id>/`.
#[derive(Debug, Clone)]
pub struct RunStore {
    root: PathBuf,
}

impl RunStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        RunStore { root: root.into() }
    }

    pub fn runs_dir(&self) -> PathBuf {
        self.root.join("runs")
    }

    /// Run ids sorted by their number (r1, r2, ...).
    pub fn run_ids(&self) -> Result<Vec<String>, StoreError> {
        let dir = self.runs_dir();
        if !dir.exists() {
            return Ok(Vec::new());
        }
        let mut ids: Vec<(u64, String)> = std::fs::read_dir(&dir)
            .map_err(io_err(&dir))?
            .filter_map(Result::ok)
            .filter(|e| e.path().join("run.json").exists())
            .filter_map(|e| {
                let name = e.file_name().to_string_lossy().into_owned();
                let n = name.strip_prefix('r')?.parse().ok()?;
                Some((n, name))
            })
            .collect();
        ids.sort();
        Ok(ids.into_iter().map(|(_, id)| id).collect())
    }

    pub fn run_dir(&self, run_id: &str) -> PathBuf {
        self.runs_dir().join(run_id)
    }

    /// Persists an analysis as a new run. Reviews of the latest earlier run
    /// are carried over for findings whose id still exists.
    pub fn create_run(&self, corpus: &CorpusAnalysis) -> Result<String, StoreError> {
        let previous = self.run_ids()?;
        let next = previous
            .last()
            .and_then(|id| id.strip_prefix('r')?.parse::<u64>().ok())
            .unwrap_or(0)
            + 1;
        let run_id = format!("r{next}");
        let dir = self.run_dir(&run_id);
        std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;

        let items = corpus
            .artifacts
            .iter()
            .flat_map(|a| &a.items)
            .map(|i| StoredItem {
                item: i.item.clone(),
                word_count: i.word_count,
            });
        write_jsonl(&dir.join("items.jsonl"), items)?;
        let findings: Vec<&Finding> = corpus.findings().collect();
        write_jsonl(&dir.join("findings.jsonl"), &findings)?;
        let metrics = corpus.artifacts.iter().map(|a| StoredMetrics {
            metrics: a.metrics(false),
            folder_path: a.folder_path.clone(),
            format: a.format,
        });
        write_jsonl(&dir.join("metrics.jsonl"), metrics)?;

        let carried: Vec<ReviewRecord> = match previous.last() {
            Some(prev) => {
                let log =
                    ReviewLog::open(&self.run_dir(prev)).map_err(io_err(&self.run_dir(prev)))?;
                let live: std::collections::HashSet<&str> =
                    findings.iter().map(|f| f.finding_id.as_str()).collect();
                log.records()
                    .filter(|r| live.contains(r.finding_id.as_str()))
                    .cloned()
                    .collect()
            }
            None => Vec::new(),
        };
        write_jsonl(&dir.join("reviews.jsonl"), carried)?;

        let meta = RunMeta {
            run_id: run_id.clone(),
            created_at: Utc::now(),
            artifacts: corpus.artifacts.len(),
            findings: findings.len(),
            diagnostics: corpus.diagnostics.clone(),
        };
        let meta_path = dir.join("run.json");
        let tmp = dir.join("run.json.tmp");
        std::fs::write(
            &tmp,
            serde_json::to_vec_pretty(&meta).expect("meta serializes"),
        )
        .map_err(io_err(&tmp))?;
        std::fs::rename(&tmp, &meta_path).map_err(io_err(&meta_path))?;
        Ok(run_id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::review::ReviewStatus;
    use reqsmell_core::pipeline::Analyzer;

    fn corpus(dir: &Path) -> CorpusAnalysis {
        std::fs::write(
            dir.join("a.txt"),
            "The system must not fail.\n\nIt should be fast.",
        )
        .unwrap();
        Analyzer::bundled()
            .analyze_inputs(&[dir.join("a.txt")])
            .unwrap()
    }

    #[test]
    fn runs_round_trip_and_carry_reviews() {
        let tmp = tempfile::tempdir().unwrap();
        let store = RunStore::new(tmp.path().join("store"));
        let c = corpus(tmp.path());
        let r1 = store.create_run(&c).unwrap();
        assert_eq!(r1, "r1");
        let data = RunData::load(&store.run_dir(&r1)).unwrap();
        assert_eq!(data.findings, c.findings().cloned().collect::<Vec<_>>());
        assert_eq!(data.meta.findings, data.findings.len());

        let fid = data.findings[0].finding_id.clone();
        let mut log = ReviewLog::open(&store.run_dir(&r1)).unwrap();
        log.append(ReviewRecord {
            finding_id: fid.clone(),
            status: ReviewStatus::Rejected,
            comment: Some("fine as is".into()),
            updated_at: Utc::now(),
            reviewer: None,
        })
        .unwrap();
        let r2 = store.create_run(&c).unwrap();
        assert_eq!(r2, "r2");
        assert_eq!(store.run_ids().unwrap(), ["r1", "r2"]);
        let log = ReviewLog::open(&store.run_dir(&r2)).unwrap();
        assert!(log.is_rejected(&fid));
        let a = std::fs::read(store.run_dir(&r1).join("findings.jsonl")).unwrap();
        let b = std::fs::read(store.run_dir(&r2).join("findings.jsonl")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_corpus_and_missing_run() {
        let tmp = tempfile::tempdir().unwrap();
        let store = RunStore::new(tmp.path());
        let id = store.create_run(&CorpusAnalysis::default()).unwrap();
        let data = RunData::load(&store.run_dir(&id)).unwrap();
        assert!(data.artifacts.is_empty());
        assert_eq!(data.treemap_where(|_| true, None).findings, 0);
        assert!(matches!(
            RunData::load(tmp.path()),
            Err(StoreError::NotARun(_))
        ));
    }
}
