use crate::args::{AnalyzeArgs, ReportFormat};
use crate::config::FileConfig;
use crate::detect::build_analyzer;
use crate::{usage, EXIT_DENSITY, EXIT_FILE_ERROR};
use anyhow::Context;
use chrono::{DateTime, Utc};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use reqsmell_core::metrics::{write_csv_report, ArtifactMetrics};
use reqsmell_core::pipeline::{CorpusAnalysis, Diagnostic};
use reqsmell_core::smells::Finding;
use reqsmell_server::RunStore;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const DEFAULT_OUT: &str = "reqsmell-out";

/// Run header, kept apart from findings.json so that file stays byte-stable.
#[derive(Debug, Serialize)]
struct RunHeader<'a> {
    created_at: DateTime<Utc>,
    version: &'static str,
    inputs: &'a [PathBuf],
    artifacts: usize,
    words: usize,
    findings: usize,
    suppressed: usize,
    density: f64,
    run_id: Option<String>,
    diagnostics: &'a [Diagnostic],
}

#[derive(Debug, Serialize)]
struct SampleEntry<'a> {
    artifact_id: &'a str,
    findings: Vec<&'a Finding>,
}

pub fn findings_json(corpus: &CorpusAnalysis) -> anyhow::Result<String> {
    let findings: Vec<&Finding> = corpus.findings().collect();
    let mut text = serde_json::to_string_pretty(&findings)?;
    text.push('\n');
    Ok(text)
}

fn render_report(
    corpus: &CorpusAnalysis,
    format: ReportFormat,
    include_suppressed: bool,
) -> anyhow::Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        ReportFormat::Csv => write_csv_report(&mut buf, &corpus.metrics(include_suppressed))?,
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut buf, &corpus.report(include_suppressed))?;
            buf.push(b'\n');
        }
    }
    Ok(buf)
}

/// Up to `n` unsuppressed findings per artifact, drawn with a seeded RNG.
fn sample(corpus: &CorpusAnalysis, n: usize, seed: u64) -> Vec<SampleEntry<'_>> {
    let mut rng = StdRng::seed_from_u64(seed);
    corpus
        .artifacts
        .iter()
        .map(|a| {
            let pool: Vec<&Finding> = a.findings().filter(|f| !f.is_suppressed()).collect();
            let mut picked: Vec<&Finding> = pool.choose_multiple(&mut rng, n).copied().collect();
            picked.sort_by(|x, y| (&x.item_id, x.char_range).cmp(&(&y.item_id, y.char_range)));
            SampleEntry {
                artifact_id: &a.artifact_id,
                findings: picked,
            }
        })
        .collect()
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn run(args: AnalyzeArgs, file: FileConfig) -> anyhow::Result<u8> {
    let inputs = if args.inputs.is_empty() {
        file.inputs.clone().unwrap_or_default()
    } else {
        args.inputs.clone()
    };
    if inputs.is_empty() {
        return Err(usage("analyze needs at least one input path"));
    }
    let include_suppressed = args.include_suppressed || file.include_suppressed.unwrap_or(false);
    let report = args.report.or(file.report).unwrap_or(ReportFormat::Csv);
    let out = args
        .out
        .clone()
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let to_stdout = out.as_os_str() == "-";
    let gate = args.fail_on_density.or(file.fail_on_density);
    if let Some(x) = gate {
        if !x.is_finite() || x < 0.0 {
            return Err(usage("--fail-on-density must be a non-negative number"));
        }
    }
    let sample_n = args.sample.or(file.sample);
    if sample_n.is_some() && to_stdout {
        return Err(usage("--sample needs an output directory"));
    }
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let store = args.store.clone().or_else(|| file.store.clone());

    let analyzer = build_analyzer(&args.detect, &file)?;
    let corpus = analyzer.analyze_inputs(&inputs)?;
    for d in &corpus.diagnostics {
        eprintln!("error: {}: {}", d.path, d.message);
    }

    let metrics = corpus.metrics(include_suppressed);
    let sum = ArtifactMetrics::sum("Sum", &metrics);
    let report_bytes = render_report(&corpus, report, include_suppressed)?;

    let run_id = match &store {
        Some(root) => {
            let id = RunStore::new(root).create_run(&corpus)?;
            eprintln!("stored run {id} in {}", root.display());
            Some(id)
        }
        None => None,
    };

    if to_stdout {
        std::io::stdout().write_all(&report_bytes)?;
    } else {
        fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
        write_file(
            &out.join("findings.json"),
            findings_json(&corpus)?.as_bytes(),
        )?;
        let name = match report {
            ReportFormat::Csv => "report.csv",
            ReportFormat::Json => "report.json",
        };
        write_file(&out.join(name), &report_bytes)?;
        if let Some(n) = sample_n {
            let picked = sample(&corpus, n, seed);
            write_file(
                &out.join("sample.json"),
                serde_json::to_string_pretty(&picked)?.as_bytes(),
            )?;
        }
        let header = RunHeader {
            created_at: Utc::now(),
            version: env!("CARGO_PKG_VERSION"),
            inputs: &inputs,
            artifacts: corpus.artifacts.len(),
            words: sum.word_count,
            findings: corpus.findings().count(),
            suppressed: corpus.findings().filter(|f| f.is_suppressed()).count(),
            density: sum.density_total,
            run_id,
            diagnostics: &corpus.diagnostics,
        };
        write_file(
            &out.join("run.json"),
            serde_json::to_string_pretty(&header)?.as_bytes(),
        )?;
        eprintln!(
            "{} artifacts, {} words, {} findings, density {:.1} per 1000 words -> {}",
            header.artifacts,
            header.words,
            sum.findings_total,
            sum.density_total,
            out.display()
        );
    }

    if !corpus.diagnostics.is_empty() {
        return Ok(EXIT_FILE_ERROR);
    }
    if let Some(x) = gate {
        if sum.density_total > x {
            eprintln!("density {:.2} exceeds limit {x}", sum.density_total);
            return Ok(EXIT_DENSITY);
        }
    }
    Ok(0)
}
