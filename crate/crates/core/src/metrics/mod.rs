//! Densities (findings per 1000 words), story-part tallies and hotspot treemaps.

mod report;
mod treemap;

pub use report::{write_csv_report, JsonReport, REPORT_SMELL_ORDER};
pub use treemap::{build_treemap, TreemapNode};

use crate::ingest::{StoryPart, UserStoryParts};
use crate::nlp::{tokenize, AnnotatedToken};
use crate::smells::{Finding, SmellKind};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Number of annotated tokens containing a letter or digit.
pub fn count_words(tokens: &[AnnotatedToken]) -> usize {
    tokens.iter().filter(|t| t.is_word()).count()
}

/// Word count of raw text under the same rule as [`count_words`].
pub fn count_text_words(text: &str) -> usize {
    tokenize(text).iter().filter(|t| !t.is_punct()).count()
}

/// Findings per 1000 words, unrounded; 0 when there are no words.
pub fn compute_density(findings: usize, words: usize) -> f64 {
    if words == 0 {
        0.0
    } else {
        findings as f64 / words as f64 * 1000.0
    }
}

/// Rounds half away from zero at `decimals` places. A small tolerance keeps
/// values such as 2.675 (stored as 2.67499...) rounding up.
pub fn round_half_up(value: f64, decimals: u32) -> f64 {
    let factor = 10f64.powi(decimals as i32);
    let scaled = value * factor;
    let rounded = (scaled.abs() + 1e-9).floor()
        + if (scaled.abs() + 1e-9).fract() >= 0.5 {
            1.0
        } else {
            0.0
        };
    rounded.copysign(scaled) / factor
}

fn zero_counts() -> BTreeMap<SmellKind, usize> {
    SmellKind::ALL.into_iter().map(|s| (s, 0)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactMetrics {
    pub artifact_id: String,
    pub word_count: usize,
    pub findings_total: usize,
    pub per_smell: BTreeMap<SmellKind, usize>,
    pub density_total: f64,
    pub per_smell_density: BTreeMap<SmellKind, f64>,
}

impl ArtifactMetrics {
    /// Tallies `findings`; suppressed findings count only with `include_suppressed`.
    pub fn new(
        artifact_id: impl Into<String>,
        word_count: usize,
        findings: &[Finding],
        include_suppressed: bool,
    ) -> Self {
        let mut per_smell = zero_counts();
        for f in findings
            .iter()
            .filter(|f| include_suppressed || !f.is_suppressed())
        {
            *per_smell.entry(f.smell).or_default() += 1;
        }
        Self::from_counts(artifact_id, word_count, per_smell)
    }

    pub fn from_counts(
        artifact_id: impl Into<String>,
        word_count: usize,
        counts: BTreeMap<SmellKind, usize>,
    ) -> Self {
        let mut per_smell = zero_counts();
        per_smell.extend(counts);
        let findings_total = per_smell.values().sum();
        let per_smell_density = per_smell
            .iter()
            .map(|(s, n)| (*s, compute_density(*n, word_count)))
            .collect();
        ArtifactMetrics {
            artifact_id: artifact_id.into(),
            word_count,
            findings_total,
            per_smell,
            density_total: compute_density(findings_total, word_count),
            per_smell_density,
        }
    }

    /// Pools word and finding counts of several artifacts.
    pub fn sum<'a>(
        label: impl Into<String>,
        all: impl IntoIterator<Item = &'a ArtifactMetrics>,
    ) -> Self {
        let mut words = 0;
        let mut counts = zero_counts();
        for m in all {
            words += m.word_count;
            for (s, n) in &m.per_smell {
                *counts.entry(*s).or_default() += n;
            }
        }
        Self::from_counts(label, words, counts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryPartMetrics {
    pub part: StoryPart,
    pub word_count: usize,
    pub findings: usize,
    pub density: f64,
}

impl StoryPartMetrics {
    pub fn new(part: StoryPart, word_count: usize, findings: usize) -> Self {
        StoryPartMetrics {
            part,
            word_count,
            findings,
            density: compute_density(findings, word_count),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryPartReport {
    pub parts: BTreeMap<StoryPart, StoryPartMetrics>,
    /// Findings in stories that do not follow the template.
    pub unassigned_findings: usize,
    pub unassigned_words: usize,
}

/// One analysed story: its text, split and findings.
#[derive(Debug, Clone, Copy)]
pub struct StoryInput<'a> {
    pub text: &'a str,
    pub parts: &'a UserStoryParts,
    pub findings: &'a [Finding],
}

/// Tallies words and findings per story part. A finding belongs to the part
/// containing its start offset; words are assigned the same way.
pub fn story_part_metrics(stories: &[StoryInput<'_>]) -> StoryPartReport {
    let mut words: BTreeMap<StoryPart, usize> = BTreeMap::new();
    let mut found: BTreeMap<StoryPart, usize> = BTreeMap::new();
    let mut unassigned_findings = 0;
    let mut unassigned_words = 0;
    for story in stories {
        if !story.parts.conformant {
            unassigned_findings += story.findings.len();
            unassigned_words += count_text_words(story.text);
            continue;
        }
        for tok in tokenize(story.text).iter().filter(|t| !t.is_punct()) {
            match story.parts.region_of(tok.span.start) {
                Some(part) => *words.entry(part).or_default() += 1,
                None => unassigned_words += 1,
            }
        }
        for f in story.findings {
            match story.parts.region_of(f.char_range.start) {
                Some(part) => *found.entry(part).or_default() += 1,
                None => unassigned_findings += 1,
            }
        }
    }
    let parts = [StoryPart::Role, StoryPart::Feature, StoryPart::Reason]
        .into_iter()
        .map(|p| {
            let m = StoryPartMetrics::new(
                p,
                words.get(&p).copied().unwrap_or(0),
                found.get(&p).copied().unwrap_or(0),
            );
            (p, m)
        })
        .collect();
    StoryPartReport {
        parts,
        unassigned_findings,
        unassigned_words,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{split_user_story, ItemKind, RequirementItem};
    use crate::nlp::{annotate, Lexicon};
    use crate::smells::{analyze_item, DetectorConfig, DictionarySet, SuppressionReason};
    use crate::Span;
    use proptest::prelude::*;

    fn words(text: &str) -> usize {
        count_words(&annotate(text, Lexicon::bundled()))
    }

    #[test]
    fn word_counting_rule() {
        assert_eq!(words(""), 0);
        assert_eq!(words("must not sign off users due to timeouts."), 8);
        assert_eq!(words("1.5 seconds"), 2);
        assert_eq!(
            count_text_words("must not sign off users due to timeouts."),
            8
        );
    }

    #[test]
    fn densities_and_rounding() {
        assert_eq!(round_half_up(compute_density(45, 1896), 1), 23.7);
        assert_eq!(round_half_up(compute_density(5, 199), 1), 25.1);
        assert_eq!(compute_density(0, 1000), 0.0);
        assert_eq!(compute_density(3, 0), 0.0);
        assert_eq!(round_half_up(0.125, 2), 0.13);
        assert_eq!(round_half_up(2.675, 2), 2.68);
        assert_eq!(round_half_up(0.5, 0), 1.0);
        assert_eq!(round_half_up(-0.25, 1), -0.3);
    }

    fn finding(smell: SmellKind, start: usize, suppressed: bool) -> Finding {
        Finding {
            finding_id: format!("{smell}{start}"),
            smell,
            artifact_id: "a".into(),
            item_id: "1".into(),
            token_span: [0, 0].into(),
            char_range: Span::new(start, start + 1),
            matched_text: "x".into(),
            message: String::new(),
            improvement_hint: String::new(),
            suppressed_by: suppressed.then_some(SuppressionReason::ConditionHeuristic),
        }
    }

    #[test]
    fn artifact_metrics_and_suppression() {
        let fs = [
            finding(SmellKind::Loopholes, 0, false),
            finding(SmellKind::Loopholes, 5, false),
            finding(SmellKind::NegativeStatements, 9, true),
        ];
        let m = ArtifactMetrics::new("a", 200, &fs, false);
        assert_eq!(m.findings_total, 2);
        assert_eq!(m.per_smell.len(), 8);
        assert_eq!(m.per_smell[&SmellKind::Loopholes], 2);
        assert_eq!(m.density_total, 10.0);
        let all = ArtifactMetrics::new("a", 200, &fs, true);
        assert_eq!(all.findings_total - m.findings_total, 1);
        let s = ArtifactMetrics::sum("sum", [&m, &all]);
        assert_eq!((s.word_count, s.findings_total), (400, 5));
    }

    #[test]
    fn story_parts_regression_on_totals() {
        let rows = [
            (StoryPart::Role, 3073, 6, 2.0),
            (StoryPart::Feature, 15240, 533, 35.0),
            (StoryPart::Reason, 9642, 615, 64.0),
        ];
        for (part, w, f, expected) in rows {
            assert_eq!(
                round_half_up(StoryPartMetrics::new(part, w, f).density, 0),
                expected
            );
        }
    }

    fn analyze(text: &str) -> Vec<Finding> {
        let lex = Lexicon::bundled();
        let item = RequirementItem {
            item_id: "1".into(),
            artifact_id: "s".into(),
            text: text.into(),
            char_range: Span::new(0, text.len()),
            kind: ItemKind::UserStory,
        };
        analyze_item(
            &item,
            lex,
            &DetectorConfig::default(),
            &DictionarySet::bundled(lex),
        )
        .unwrap()
        .1
    }

    #[test]
    fn story_part_assignment() {
        let story = "As a visitor, I want to filter the products, so that I can get an overview of their filters.";
        let parts = split_user_story(story);
        let findings = analyze(story);
        let r = story_part_metrics(&[StoryInput {
            text: story,
            parts: &parts,
            findings: &findings,
        }]);
        assert_eq!(r.parts[&StoryPart::Reason].findings, 1);
        assert_eq!(r.parts[&StoryPart::Role].findings, 0);
        assert_eq!(r.parts[&StoryPart::Feature].findings, 0);
        let total: usize = r.parts.values().map(|p| p.word_count).sum();
        assert_eq!(total, count_text_words(story));

        let other = "The system must not fail.";
        let parts = split_user_story(other);
        let findings = analyze(other);
        let r = story_part_metrics(&[StoryInput {
            text: other,
            parts: &parts,
            findings: &findings,
        }]);
        assert_eq!(r.unassigned_findings, 1);
        assert!(r
            .parts
            .values()
            .all(|p| p.findings == 0 && p.word_count == 0));
    }

    proptest! {
        #[test]
        fn density_is_scale_consistent(f in 0usize..10_000, w in 1usize..100_000, k in 1usize..50) {
            let a = compute_density(f, w);
            let b = compute_density(f * k, w * k);
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }
    }
}
