use super::{round_half_up, ArtifactMetrics, StoryPartReport, TreemapNode};
use crate::smells::SmellKind;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Column order of the per-smell pairs in the CSV report.
pub const REPORT_SMELL_ORDER: [SmellKind; 8] = [
    SmellKind::SubjectiveLanguage,
    SmellKind::Loopholes,
    SmellKind::VaguePronouns,
    SmellKind::Superlatives,
    SmellKind::NegativeStatements,
    SmellKind::Comparatives,
    SmellKind::NonVerifiableTerms,
    SmellKind::AmbiguousAdverbsAdjectives,
];

fn row(m: &ArtifactMetrics) -> Vec<String> {
    let mut out = vec![
        m.artifact_id.clone(),
        m.word_count.to_string(),
        m.findings_total.to_string(),
        format!("{:.1}", round_half_up(m.density_total, 1)),
    ];
    for s in REPORT_SMELL_ORDER {
        out.push(m.per_smell.get(&s).copied().unwrap_or(0).to_string());
        out.push(format!(
            "{:.2}",
            round_half_up(m.per_smell_density.get(&s).copied().unwrap_or(0.0), 2)
        ));
    }
    out
}

/// One row per artifact plus a pooled `Sum` row. Each smell has an absolute
/// count column and a per-1000-words column.
pub fn write_csv_report<W: Write>(out: W, artifacts: &[ArtifactMetrics]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "Case".to_string(),
        "Words".into(),
        "All abs".into(),
        "All rel".into(),
    ];
    for s in REPORT_SMELL_ORDER {
        header.push(format!("{s} abs"));
        header.push(format!("{s} rel"));
    }
    w.write_record(&header)?;
    for m in artifacts {
        w.write_record(row(m))?;
    }
    w.write_record(row(&ArtifactMetrics::sum("Sum", artifacts)))?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub artifacts: Vec<ArtifactMetrics>,
    pub sum: ArtifactMetrics,
    pub treemap: TreemapNode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub story_parts: Option<StoryPartReport>,
}
