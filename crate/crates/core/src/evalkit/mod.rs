//! Evaluation against gold annotations: precision, recall and rater agreement.
//!
//! A gold file uses the finding JSON format with two extra fields,
//! `verdict` (`TruePositiveLabel` or `FalsePositiveLabel`) and `rater_id`.
//! Entries with a verdict are classified tool findings and feed precision;
//! entries without one are presence-only annotations and feed recall.

mod agreement;

pub use agreement::{cohen_kappa, percent_fp_agreement};

use crate::metrics::round_half_up;
use crate::smells::{Finding, SmellKind};
use crate::Span;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("row {row}: {detail}")]
    InvalidCounts { row: String, detail: String },
    #[error("no labels to compare")]
    EmptyInput,
    #[error("label lists differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(alias = "TruePositive", alias = "tp", alias = "TP")]
    TruePositiveLabel,
    #[serde(alias = "FalsePositive", alias = "fp", alias = "FP")]
    FalsePositiveLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSpan {
    pub artifact_id: String,
    pub item_id: String,
    pub smell: SmellKind,
    pub char_range: Span,
    #[serde(default)]
    pub verdict: Option<Verdict>,
    #[serde(default)]
    pub rater_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finding_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_text: Option<String>,
}

impl GoldSpan {
    fn location(&self) -> (&str, &str, SmellKind, Span) {
        (
            &self.artifact_id,
            &self.item_id,
            self.smell,
            self.char_range,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MatchPolicy {
    /// Same smell and identical char range.
    #[default]
    ExactSpan,
    /// Same smell and intersecting char ranges.
    Overlap,
}

impl FromStr for MatchPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "exact" | "exactspan" => Ok(MatchPolicy::ExactSpan),
            "overlap" => Ok(MatchPolicy::Overlap),
            _ => Err(format!("unknown match policy `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchResult {
    /// (finding index, gold index)
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_findings: Vec<usize>,
    pub unmatched_gold: Vec<usize>,
}

/// Pairs findings with gold spans. Each gold span and each finding is used
/// at most once; among candidates the leftmost finding wins.
pub fn match_findings(findings: &[Finding], gold: &[GoldSpan], policy: MatchPolicy) -> MatchResult {
    let mut order: Vec<usize> = (0..findings.len()).collect();
    order.sort_by_key(|&i| (findings[i].char_range, i));
    let mut used = vec![false; findings.len()];
    let mut result = MatchResult::default();
    for (gi, g) in gold.iter().enumerate() {
        let hit = order.iter().copied().find(|&fi| {
            let f = &findings[fi];
            !used[fi]
                && f.smell == g.smell
                && f.artifact_id == g.artifact_id
                && f.item_id == g.item_id
                && match policy {
                    MatchPolicy::ExactSpan => f.char_range == g.char_range,
                    MatchPolicy::Overlap => f.char_range.intersects(g.char_range),
                }
        });
        match hit {
            Some(fi) => {
                used[fi] = true;
                result.pairs.push((fi, gi));
            }
            None => result.unmatched_gold.push(gi),
        }
    }
    result.unmatched_findings = (0..findings.len()).filter(|&i| !used[i]).collect();
    result
}

/// Row label of an evaluation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RowKey {
    Smell(SmellKind),
    /// The four dictionary smells pooled into one row.
    AmbiguityRelated,
}

impl RowKey {
    pub fn of(smell: SmellKind, group_ambiguity: bool) -> RowKey {
        if group_ambiguity && smell.is_dictionary_smell() {
            RowKey::AmbiguityRelated
        } else {
            RowKey::Smell(smell)
        }
    }
}

impl fmt::Display for RowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowKey::Smell(s) => write!(f, "{s}"),
            RowKey::AmbiguityRelated => f.write_str("Ambiguity-related"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRow {
    pub key: RowKey,
    pub inspected: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub precision: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionReport {
    pub rows: Vec<PrecisionRow>,
    /// Unweighted mean over rows with data.
    pub average_precision: Option<f64>,
    /// Pooled counts.
    pub overall_precision: Option<f64>,
    pub total_inspected: usize,
    pub total_accepted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallRow {
    pub key: RowKey,
    pub gold_total: usize,
    pub detected: usize,
    pub recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallReport {
    pub rows: Vec<RecallRow>,
    pub average_recall: Option<f64>,
    pub overall_recall: Option<f64>,
    pub total_gold: usize,
    pub total_detected: usize,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Precision per row from (key, inspected, accepted) counts.
pub fn precision_table(rows: &[(RowKey, usize, usize)]) -> Result<PrecisionReport, EvalError> {
    let mut out = Vec::with_capacity(rows.len());
    for &(key, inspected, accepted) in rows {
        if accepted > inspected {
            return Err(EvalError::InvalidCounts {
                row: key.to_string(),
                detail: format!("accepted {accepted} exceeds inspected {inspected}"),
            });
        }
        out.push(PrecisionRow {
            key,
            inspected,
            accepted,
            rejected: inspected - accepted,
            precision: ratio(accepted, inspected),
        });
    }
    let total_inspected = out.iter().map(|r| r.inspected).sum();
    let total_accepted = out.iter().map(|r| r.accepted).sum();
    Ok(PrecisionReport {
        average_precision: mean(out.iter().filter_map(|r| r.precision)),
        overall_precision: ratio(total_accepted, total_inspected),
        rows: out,
        total_inspected,
        total_accepted,
    })
}

/// Recall per row from (key, gold_total, detected) counts.
pub fn recall_table(rows: &[(RowKey, usize, usize)]) -> Result<RecallReport, EvalError> {
    let mut out = Vec::with_capacity(rows.len());
    for &(key, gold_total, detected) in rows {
        if detected > gold_total {
            return Err(EvalError::InvalidCounts {
                row: key.to_string(),
                detail: format!("detected {detected} exceeds gold total {gold_total}"),
            });
        }
        out.push(RecallRow {
            key,
            gold_total,
            detected,
            recall: ratio(detected, gold_total),
        });
    }
    let total_gold = out.iter().map(|r| r.gold_total).sum();
    let total_detected = out.iter().map(|r| r.detected).sum();
    Ok(RecallReport {
        average_recall: mean(out.iter().filter_map(|r| r.recall)),
        overall_recall: ratio(total_detected, total_gold),
        rows: out,
        total_gold,
        total_detected,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub policy: MatchPolicy,
    pub precision: Option<PrecisionReport>,
    pub recall: Option<RecallReport>,
    /// Cohen's kappa on TP/FP labels between the first two raters.
    pub kappa: Option<f64>,
    pub fp_agreement: Option<f64>,
    pub raters: Vec<String>,
}

fn grouped<T>(counts: BTreeMap<RowKey, T>) -> Vec<(RowKey, T)> {
    counts.into_iter().collect()
}

/// Full evaluation of tool findings against a gold file.
///
/// Precision uses the labelled entries of the first rater (by id order) that
/// match a finding; recall uses the presence-only entries.
pub fn evaluate(
    findings: &[Finding],
    gold: &[GoldSpan],
    policy: MatchPolicy,
    group_ambiguity: bool,
) -> Result<EvalReport, EvalError> {
    let raters: Vec<String> = gold
        .iter()
        .filter(|g| g.verdict.is_some())
        .map(|g| g.rater_id.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let precision = match raters.first() {
        None => None,
        Some(first) => {
            let labelled: Vec<GoldSpan> = gold
                .iter()
                .filter(|g| g.verdict.is_some() && &g.rater_id == first)
                .cloned()
                .collect();
            let m = match_findings(findings, &labelled, policy);
            let mut counts: BTreeMap<RowKey, (usize, usize)> = BTreeMap::new();
            for (_, gi) in &m.pairs {
                let g = &labelled[*gi];
                let c = counts
                    .entry(RowKey::of(g.smell, group_ambiguity))
                    .or_default();
                c.0 += 1;
                if g.verdict == Some(Verdict::TruePositiveLabel) {
                    c.1 += 1;
                }
            }
            let rows: Vec<(RowKey, usize, usize)> = grouped(counts)
                .into_iter()
                .map(|(k, (i, a))| (k, i, a))
                .collect();
            Some(precision_table(&rows)?)
        }
    };

    let mut presence: Vec<GoldSpan> = Vec::new();
    let mut seen = BTreeSet::new();
    for g in gold.iter().filter(|g| g.verdict.is_none()) {
        if seen.insert(g.location()) {
            presence.push(g.clone());
        }
    }
    let recall = if presence.is_empty() {
        None
    } else {
        let m = match_findings(findings, &presence, policy);
        let mut counts: BTreeMap<RowKey, (usize, usize)> = BTreeMap::new();
        for g in &presence {
            counts
                .entry(RowKey::of(g.smell, group_ambiguity))
                .or_default()
                .0 += 1;
        }
        for (_, gi) in &m.pairs {
            counts
                .entry(RowKey::of(presence[*gi].smell, group_ambiguity))
                .or_default()
                .1 += 1;
        }
        let rows: Vec<(RowKey, usize, usize)> = grouped(counts)
            .into_iter()
            .map(|(k, (t, d))| (k, t, d))
            .collect();
        Some(recall_table(&rows)?)
    };

    let (kappa, fp_agreement) = match raters.as_slice() {
        [a, b, ..] => {
            let labels = |rater: &str| -> BTreeMap<(&str, &str, SmellKind, Span), Verdict> {
                gold.iter()
                    .filter(|g| g.rater_id == rater)
                    .filter_map(|g| g.verdict.map(|v| (g.location(), v)))
                    .collect()
            };
            let la = labels(a);
            let lb = labels(b);
            let common: Vec<_> = la.keys().filter(|k| lb.contains_key(*k)).collect();
            let va: Vec<Verdict> = common.iter().map(|k| la[*k]).collect();
            let vb: Vec<Verdict> = common.iter().map(|k| lb[*k]).collect();
            let fp = |l: &BTreeMap<_, Verdict>| -> BTreeSet<_> {
                l.iter()
                    .filter(|(_, v)| **v == Verdict::FalsePositiveLabel)
                    .map(|(k, _)| *k)
                    .collect()
            };
            (
                cohen_kappa(&va, &vb).ok(),
                Some(percent_fp_agreement(&fp(&la), &fp(&lb))),
            )
        }
        _ => (None, None),
    };

    Ok(EvalReport {
        policy,
        precision,
        recall,
        kappa,
        fp_agreement,
        raters,
    })
}

fn parse_records<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, EvalError> {
    let trimmed = text.trim_start();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    if trimmed.starts_with('[') {
        return serde_json::from_str(text).map_err(|e| EvalError::Schema {
            line: e.line(),
            message: e.to_string(),
        });
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| EvalError::Schema {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Reads findings from a JSON array or JSON lines.
pub fn parse_findings(text: &str) -> Result<Vec<Finding>, EvalError> {
    parse_records(text)
}

/// Reads gold spans from a JSON array or JSON lines.
pub fn parse_gold(text: &str) -> Result<Vec<GoldSpan>, EvalError> {
    parse_records(text)
}

fn fmt2(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{:.2}", round_half_up(v, 2)))
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].len())
                .chain([header[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == 0 {
                    format!("{c:<w$}", w = widths[i])
                } else {
                    format!("{c:>w$}", w = widths[i])
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

impl PrecisionReport {
    /// Plain-text table with Average and Overall rows.
    pub fn to_table(&self) -> String {
        let mut rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.key.to_string(),
                    r.inspected.to_string(),
                    r.accepted.to_string(),
                    r.rejected.to_string(),
                    fmt2(r.precision),
                ]
            })
            .collect();
        let with_data: Vec<&PrecisionRow> = self.rows.iter().filter(|r| r.inspected > 0).collect();
        let n = with_data.len().max(1) as f64;
        let avg = |f: fn(&PrecisionRow) -> usize| {
            format!(
                "{:.1}",
                with_data.iter().map(|r| f(r) as f64).sum::<f64>() / n
            )
        };
        rows.push(vec![
            "Average".into(),
            avg(|r| r.inspected),
            avg(|r| r.accepted),
            avg(|r| r.rejected),
            fmt2(self.average_precision),
        ]);
        rows.push(vec![
            "Overall".into(),
            self.total_inspected.to_string(),
            self.total_accepted.to_string(),
            (self.total_inspected - self.total_accepted).to_string(),
            fmt2(self.overall_precision),
        ]);
        table(
            &["Smell", "Inspected", "Accepted", "Rejected", "Precision"],
            &rows,
        )
    }
}

impl RecallReport {
    pub fn to_table(&self) -> String {
        let mut rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.key.to_string(),
                    r.gold_total.to_string(),
                    r.detected.to_string(),
                    fmt2(r.recall),
                ]
            })
            .collect();
        rows.push(vec![
            "Average".into(),
            String::new(),
            String::new(),
            fmt2(self.average_recall),
        ]);
        rows.push(vec![
            "Overall".into(),
            self.total_gold.to_string(),
            self.total_detected.to_string(),
            fmt2(self.overall_recall),
        ]);
        table(&["Smell", "In artifacts", "Identified", "Recall"], &rows)
    }
}

impl EvalReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.precision {
            out.push_str("Precision\n");
            out.push_str(&p.to_table());
        }
        if let Some(r) = &self.recall {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str("Recall\n");
            out.push_str(&r.to_table());
        }
        if let Some(k) = self.kappa {
            out.push_str(&format!(
                "\nCohen's kappa ({}): {:.2}\n",
                self.raters[..2].join(" vs "),
                round_half_up(k, 2)
            ));
        }
        if let Some(a) = self.fp_agreement {
            out.push_str(&format!(
                "False-positive agreement: {:.0}%\n",
                round_half_up(a * 100.0, 0)
            ));
        }
        out
    }
}
