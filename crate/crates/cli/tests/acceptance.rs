//! Acceptance gate: one PASS/FAIL line per criterion.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use reqsmell_core::evalkit::{cohen_kappa, precision_table, recall_table, RowKey};
use reqsmell_core::ingest::StoryPart;
use reqsmell_core::ingest::{CsvConfig, ItemKind, RequirementItem};
use reqsmell_core::metrics::{
    compute_density, round_half_up, story_part_metrics, StoryInput, StoryPartMetrics,
};
use reqsmell_core::nlp::{analyze_degree, annotate, inflect, Degree, Inflection, Lexicon, PosTag};
use reqsmell_core::pipeline::{AnalysisOptions, Analyzer, CorpusAnalysis};
use reqsmell_core::smells::{DetectorConfig, DictionarySet, Finding, SmellKind, SuppressionReason};
use reqsmell_server::{
    app, load_state, ReviewLog, ReviewRecord, ReviewStatus, RunStore, ServeOptions,
};
use serde::Deserialize;
use serde_json::Value;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

type Outcome = Result<(), String>;
type Check = fn() -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn analyzer(options: AnalysisOptions) -> Analyzer<'static> {
    let lex = Lexicon::bundled();
    Analyzer::new(lex, DictionarySet::bundled(lex), options).unwrap()
}

fn close(actual: Option<f64>, expected: f64, decimals: u32, what: &str) -> Outcome {
    let a = actual.ok_or_else(|| format!("{what}: no value"))?;
    ensure!(
        round_half_up(a, decimals) == expected,
        "{what}: {a} rounds to {} not {expected}",
        round_half_up(a, decimals)
    );
    Ok(())
}

fn precision_regression() -> Outcome {
    let rows = [
        (SmellKind::SubjectiveLanguage, 69, 66, 0.96),
        (SmellKind::AmbiguousAdverbsAdjectives, 21, 17, 0.81),
        (SmellKind::Loopholes, 60, 43, 0.72),
        (SmellKind::NonVerifiableTerms, 23, 16, 0.70),
        (SmellKind::Superlatives, 39, 19, 0.49),
        (SmellKind::Comparatives, 88, 42, 0.48),
        (SmellKind::NegativeStatements, 129, 42, 0.33),
        (SmellKind::VaguePronouns, 187, 48, 0.26),
    ];
    let input: Vec<(RowKey, usize, usize)> = rows
        .iter()
        .map(|r| (RowKey::Smell(r.0), r.1, r.2))
        .collect();
    let start = Instant::now();
    let report = precision_table(&input).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    for (smell, _, _, expected) in rows {
        let row = report
            .rows
            .iter()
            .find(|r| r.key == RowKey::Smell(smell))
            .ok_or(format!("{smell} missing"))?;
        close(row.precision, expected, 2, &smell.to_string())?;
    }
    close(report.average_precision, 0.59, 2, "Average")?;
    close(report.overall_precision, 0.48, 2, "Overall")?;
    ensure!(
        report.total_inspected == 616 && report.total_accepted == 293,
        "totals {}/{}",
        report.total_accepted,
        report.total_inspected
    );
    ensure!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    Ok(())
}

fn recall_regression() -> Outcome {
    let rows = [
        (RowKey::AmbiguityRelated, 74, 64, 0.86),
        (RowKey::Smell(SmellKind::Superlatives), 4, 2, 0.50),
        (RowKey::Smell(SmellKind::Comparatives), 21, 20, 0.95),
        (RowKey::Smell(SmellKind::NegativeStatements), 64, 54, 0.84),
        (RowKey::Smell(SmellKind::VaguePronouns), 37, 34, 0.92),
    ];
    let input: Vec<(RowKey, usize, usize)> = rows.iter().map(|r| (r.0, r.1, r.2)).collect();
    let report = recall_table(&input).map_err(|e| e.to_string())?;
    for (key, _, _, expected) in rows {
        let row = report
            .rows
            .iter()
            .find(|r| r.key == key)
            .ok_or(format!("{key} missing"))?;
        close(row.recall, expected, 2, &key.to_string())?;
    }
    close(report.average_recall, 0.82, 2, "Average")?;
    close(report.overall_recall, 0.87, 2, "Overall")?;
    Ok(())
}

fn density_regression() -> Outcome {
    for (label, findings, words, expected) in [
        ("A1", 45, 1896, 23.7),
        ("A3", 5, 199, 25.1),
        ("B3", 31, 458, 67.7),
        ("TechDivision", 1154, 27955, 41.3),
    ] {
        let d = compute_density(findings, words);
        ensure!((d - expected).abs() <= 0.05, "{label}: {d} vs {expected}");
    }
    Ok(())
}

fn fixture_detection() -> Outcome {
    let expected: &[(&str, SmellKind, &[&str])] = &[
        (
            "subjective_language.txt",
            SmellKind::SubjectiveLanguage,
            &["simple", "efficient"],
        ),
        (
            "ambiguous_adverbs_adjectives.txt",
            SmellKind::AmbiguousAdverbsAdjectives,
            &["too low"],
        ),
        (
            "loopholes.txt",
            SmellKind::Loopholes,
            &["As far as possible"],
        ),
        (
            "non_verifiable_terms.txt",
            SmellKind::NonVerifiableTerms,
            &["sufficient"],
        ),
        ("superlatives.txt", SmellKind::Superlatives, &["highest"]),
        ("comparatives.txt", SmellKind::Comparatives, &["more exact"]),
        (
            "negative_statements.txt",
            SmellKind::NegativeStatements,
            &["not"],
        ),
        ("vague_pronouns.txt", SmellKind::VaguePronouns, &["which"]),
    ];
    let corpus = analyzer(AnalysisOptions::default())
        .analyze_inputs(&[fixtures().join("smell_examples")])
        .map_err(|e| e.to_string())?;
    let mut missed = Vec::new();
    for (file, smell, terms) in expected {
        let id = format!("smell_examples/{file}");
        let artifact = corpus
            .artifacts
            .iter()
            .find(|a| a.artifact_id == id)
            .ok_or(format!("{id} not analysed"))?;
        let found: Vec<&str> = artifact
            .findings()
            .filter(|f| f.smell == *smell)
            .map(|f| f.matched_text.as_str())
            .collect();
        missed.extend(
            terms
                .iter()
                .filter(|t| !found.contains(t))
                .map(|t| format!("{file}:{t}")),
        );
    }
    ensure!(missed.is_empty(), "missed {missed:?}");
    Ok(())
}

fn story_part_regression() -> Outcome {
    for (part, words, findings, expected) in [
        (StoryPart::Role, 3073, 6, 2.0),
        (StoryPart::Feature, 15240, 533, 35.0),
        (StoryPart::Reason, 9642, 615, 64.0),
    ] {
        let m = StoryPartMetrics::new(part, words, findings);
        close(Some(m.density), expected, 0, &format!("{part:?}"))?;
    }
    let corpus = analyzer(AnalysisOptions {
        csv: Some(CsvConfig::new("ID", "Story")),
        ..Default::default()
    })
    .analyze_inputs(&[fixtures().join("stories/user_stories.csv")])
    .map_err(|e| e.to_string())?;
    let report = corpus.story_parts(false).ok_or("no story report")?;
    let assigned: usize = report.parts.values().map(|p| p.findings).sum();
    ensure!(
        assigned + report.unassigned_findings == corpus.findings().count(),
        "story findings not conserved"
    );
    let empty = story_part_metrics(&[] as &[StoryInput<'_>]);
    ensure!(
        empty.parts.values().all(|p| p.density == 0.0),
        "empty input has density"
    );
    Ok(())
}

fn findings_bytes(corpus: &CorpusAnalysis) -> Vec<u8> {
    let findings: Vec<&Finding> = corpus.findings().collect();
    serde_json::to_vec_pretty(&findings).unwrap()
}

fn determinism() -> Outcome {
    let inputs = [
        fixtures().join("smell_examples"),
        fixtures().join("stories"),
    ];
    let options = || AnalysisOptions {
        csv: Some(CsvConfig::new("ID", "Story")),
        ..Default::default()
    };
    let a = analyzer(options())
        .analyze_inputs(&inputs)
        .map_err(|e| e.to_string())?;
    let b = analyzer(options())
        .analyze_inputs(&inputs)
        .map_err(|e| e.to_string())?;
    ensure!(
        findings_bytes(&a) == findings_bytes(&b),
        "findings JSON differs between runs"
    );
    let ids = |c: &CorpusAnalysis| {
        c.findings()
            .map(|f| f.finding_id.clone())
            .collect::<Vec<_>>()
    };
    ensure!(ids(&a) == ids(&b), "finding ids differ");
    ensure!(
        a.findings().count() >= 8,
        "only {} findings",
        a.findings().count()
    );

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = RunStore::new(dir.path());
    let r1 = store.create_run(&a).map_err(|e| e.to_string())?;
    let fid = ids(&a)[0].clone();
    let mut log = ReviewLog::open(&store.run_dir(&r1)).map_err(|e| e.to_string())?;
    log.append(ReviewRecord {
        finding_id: fid.clone(),
        status: ReviewStatus::Rejected,
        comment: Some("accepted term".into()),
        updated_at: chrono::Utc::now(),
        reviewer: None,
    })
    .map_err(|e| e.to_string())?;
    drop(log);
    let r2 = store.create_run(&b).map_err(|e| e.to_string())?;
    let log = ReviewLog::open(&store.run_dir(&r2)).map_err(|e| e.to_string())?;
    ensure!(log.is_rejected(&fid), "review lost in {r2}");
    Ok(())
}

fn morphology() -> Outcome {
    let lex = Lexicon::bundled();
    let adjectives: Vec<(&str, Inflection)> = lex.adjectives().collect();
    ensure!(
        adjectives.len() >= 200,
        "only {} adjectives",
        adjectives.len()
    );
    let mut failures = Vec::new();
    for (base, inflection) in &adjectives {
        for degree in [Degree::Comparative, Degree::Superlative] {
            let a = match inflection {
                Inflection::Regular => {
                    analyze_degree(&inflect(base, degree), PosTag::Adjective, None, lex)
                }
                Inflection::Periphrastic => {
                    let marker = if degree == Degree::Comparative {
                        "more"
                    } else {
                        "most"
                    };
                    analyze_degree(base, PosTag::Adjective, Some(marker), lex)
                }
            };
            if a.degree != degree
                || (*inflection == Inflection::Regular && a.base.as_deref() != Some(*base))
            {
                failures.push(format!("{base}/{degree:?}"));
            }
        }
        if analyze_degree(base, PosTag::Adjective, None, lex).degree != Degree::None {
            failures.push(format!("{base}/positive"));
        }
    }
    let irregular = [
        ("better", "good", Degree::Comparative),
        ("best", "good", Degree::Superlative),
        ("worse", "bad", Degree::Comparative),
        ("worst", "bad", Degree::Superlative),
        ("further", "far", Degree::Comparative),
        ("furthest", "far", Degree::Superlative),
        ("farther", "far", Degree::Comparative),
        ("farthest", "far", Degree::Superlative),
    ];
    for (form, base, degree) in irregular {
        let a = analyze_degree(form, PosTag::Adjective, None, lex);
        if a.degree != degree || a.base.as_deref() != Some(base) {
            failures.push(format!("{form}: {:?} {:?}", a.degree, a.base));
        }
    }
    ensure!(
        failures.is_empty(),
        "{} failures: {:?}",
        failures.len(),
        failures
    );

    let text = "The user shall enter a number under the limit.";
    let item = RequirementItem {
        item_id: "1".into(),
        artifact_id: "stoplist".into(),
        text: text.into(),
        char_range: (0..text.len()).into(),
        kind: ItemKind::FreeText,
    };
    let findings = analyzer(AnalysisOptions::default())
        .analyze_item(item)
        .map_err(|e| e.to_string())?
        .findings;
    let degree: Vec<&str> = findings
        .iter()
        .filter(|f| matches!(f.smell, SmellKind::Comparatives | SmellKind::Superlatives))
        .map(|f| f.matched_text.as_str())
        .collect();
    ensure!(degree.is_empty(), "stoplist words flagged: {degree:?}");
    for w in ["user", "number", "under"] {
        ensure!(
            annotate(w, lex)[0].degree == Degree::None,
            "{w} has a degree"
        );
    }
    Ok(())
}

#[derive(Deserialize)]
struct Case {
    text: String,
    smell: SmellKind,
    term: String,
    flag: Option<SuppressionReason>,
}

fn suppression() -> Outcome {
    let text = std::fs::read_to_string(fixtures().join("suppression_cases.jsonl"))
        .map_err(|e| e.to_string())?;
    let cases: Vec<Case> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    ensure!(cases.len() == 20, "{} cases", cases.len());
    let on = analyzer(AnalysisOptions {
        detector: DetectorConfig {
            enable_condition_suppression: true,
            enable_numeric_comparison_suppression: true,
            ..Default::default()
        },
        ..Default::default()
    });
    let (mut positives, mut hit, mut false_flags) = (0, 0, Vec::new());
    for case in &cases {
        let item = RequirementItem {
            item_id: "1".into(),
            artifact_id: "cases".into(),
            text: case.text.clone(),
            char_range: (0..case.text.len()).into(),
            kind: ItemKind::FreeText,
        };
        let findings = on.analyze_item(item).map_err(|e| e.to_string())?.findings;
        let target = findings
            .iter()
            .find(|f| f.smell == case.smell && f.matched_text == case.term);
        match case.flag {
            Some(flag) => {
                positives += 1;
                if target.is_some_and(|f| f.suppressed_by == Some(flag)) {
                    hit += 1;
                }
            }
            None => {
                if findings.iter().any(|f| f.is_suppressed()) {
                    false_flags.push(case.text.clone());
                }
            }
        }
    }
    ensure!(
        positives > 0 && hit * 10 >= positives * 9,
        "flagged {hit}/{positives} positives"
    );
    ensure!(false_flags.is_empty(), "negatives flagged: {false_flags:?}");
    Ok(())
}

/// p_o and p_e by direct pairwise counting.
fn kappa_brute_force(a: &[bool], b: &[bool]) -> f64 {
    let n = a.len() as f64;
    let po = (0..a.len()).filter(|&i| a[i] == b[i]).count() as f64 / n;
    let mut same = 0usize;
    for x in a {
        for y in b {
            if x == y {
                same += 1;
            }
        }
    }
    let pe = same as f64 / (n * n);
    if pe == 1.0 {
        1.0
    } else {
        (po - pe) / (1.0 - pe)
    }
}

fn kappa() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20);
    for trial in 0..100 {
        let n = rng.gen_range(1..=60);
        let p = rng.gen_range(0.05..0.95);
        let a: Vec<bool> = (0..n).map(|_| rng.gen_bool(p)).collect();
        let b: Vec<bool> = (0..n).map(|_| rng.gen_bool(p)).collect();
        let k = cohen_kappa(&a, &b).map_err(|e| e.to_string())?;
        let o = kappa_brute_force(&a, &b);
        ensure!((k - o).abs() <= 1e-9, "trial {trial}: {k} vs {o}");
    }
    let v = [true, false, true, true, false];
    ensure!(
        cohen_kappa(&v, &v).map_err(|e| e.to_string())? == 1.0,
        "perfect agreement is not 1"
    );
    let k = cohen_kappa(&[true, true, false, false], &[true, false, true, false])
        .map_err(|e| e.to_string())?;
    ensure!(k.abs() <= 1e-9, "chance case gave {k}");
    let k = cohen_kappa(&[true, true, true, false], &[true, true, false, false])
        .map_err(|e| e.to_string())?;
    ensure!((k - 0.5).abs() <= 1e-9, "0.5 case gave {k}");
    Ok(())
}

async fn api_checks(base: &str) -> Outcome {
    let client = reqwest::Client::new();
    let get = |url: String| {
        let client = client.clone();
        async move {
            let r = client.get(&url).send().await.map_err(|e| e.to_string())?;
            let status = r.status().as_u16();
            let body: Value = r.json().await.map_err(|e| e.to_string())?;
            Ok::<_, String>((status, body))
        }
    };
    let items_of = |v: &Value| -> Vec<Value> {
        v.as_array()
            .into_iter()
            .flatten()
            .flat_map(|i| i["findings"].as_array().cloned().unwrap_or_default())
            .collect()
    };

    let (code, arts) = get(format!("{base}/runs/r1/artifacts")).await?;
    ensure!(code == 200, "artifacts: {code}");
    let artifact = "smell_examples%2Fsubjective_language.txt";
    let items_url = format!("{base}/runs/r1/artifacts/{artifact}/items");
    let (_, items) = get(items_url.clone()).await?;
    let before = items_of(&items);
    ensure!(!before.is_empty(), "no findings listed");
    let fid = before[0]["finding_id"].as_str().unwrap().to_string();
    let total_before: u64 = arts
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["findings_total"].as_u64().unwrap())
        .sum();

    let r = client
        .put(format!("{base}/runs/r1/findings/{fid}/review"))
        .json(
            &serde_json::json!({"status": "rejected", "comment": "domain term", "reviewer": "qa"}),
        )
        .send()
        .await
        .map_err(|e| e.to_string())?;
    ensure!(r.status().as_u16() == 200, "PUT review: {}", r.status());
    let (code, detail) = get(format!("{base}/runs/r1/findings/{fid}")).await?;
    ensure!(
        code == 200 && detail["review"]["status"] == "rejected",
        "GET finding: {detail}"
    );
    ensure!(
        detail["review"]["reviewer"] == "qa" && detail["improvement_hint"].is_string(),
        "detail fields: {detail}"
    );

    let (_, items) = get(items_url.clone()).await?;
    ensure!(
        items_of(&items)
            .iter()
            .all(|f| f["finding_id"] != fid.as_str()),
        "rejected finding still listed"
    );
    let (_, items) = get(format!("{items_url}?include_rejected=true")).await?;
    ensure!(
        items_of(&items)
            .iter()
            .any(|f| f["finding_id"] == fid.as_str()),
        "include_rejected ignored"
    );
    let (_, arts) = get(format!("{base}/runs/r1/artifacts")).await?;
    let total_after: u64 = arts
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["findings_total"].as_u64().unwrap())
        .sum();
    ensure!(
        total_after + 1 == total_before,
        "metrics still count rejected finding"
    );

    let (_, items) = get(format!(
        "{base}/runs/r1/artifacts/smell_examples%2Floopholes.txt/items?smells=Loopholes"
    ))
    .await?;
    let listed = items_of(&items);
    ensure!(
        !listed.is_empty() && listed.iter().all(|f| f["smell"] == "Loopholes"),
        "smell filter: {listed:?}"
    );
    let (_, items) = get(format!(
        "{base}/runs/r1/artifacts/smell_examples%2Floopholes.txt/items?smells=Superlatives"
    ))
    .await?;
    ensure!(items_of(&items).is_empty(), "smell filter leaks");

    let (_, items) = get(format!("{base}/runs/r1/artifacts/suppressed.txt/items")).await?;
    let default_count = items_of(&items).len();
    let (_, items) = get(format!(
        "{base}/runs/r1/artifacts/suppressed.txt/items?include_suppressed=true"
    ))
    .await?;
    let with = items_of(&items);
    ensure!(
        with.len() == default_count + 1 && with.iter().any(|f| f["suppressed_by"].is_string()),
        "include_suppressed"
    );

    let r = client
        .put(format!("{base}/runs/r1/findings/{fid}/review"))
        .json(&serde_json::json!({"status": "under review"}))
        .send()
        .await
        .map_err(|e| e.to_string())?;
    ensure!(r.status().as_u16() == 200, "custom status PUT");
    let (_, detail) = get(format!("{base}/runs/r1/findings/{fid}")).await?;
    ensure!(
        detail["review"]["status"]["custom"] == "under review",
        "custom status: {detail}"
    );

    let (code, body) = get(format!("{base}/runs/r1/findings/ffff")).await?;
    ensure!(
        code == 404 && body["code"].is_string() && body["message"].is_string(),
        "unknown finding: {code}"
    );
    let r = client
        .put(format!("{base}/runs/r1/findings/{fid}/review"))
        .body("{\"state\":1}")
        .send()
        .await
        .map_err(|e| e.to_string())?;
    ensure!(r.status().as_u16() == 422, "invalid body: {}", r.status());
    let (code, _) = get(format!("{items_url}?include_rejected=perhaps")).await?;
    ensure!(code == 400, "malformed query: {code}");
    Ok(())
}

fn api_contract() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let extra = dir.path().join("suppressed.txt");
    std::fs::write(&extra, "The response shall be faster than 2 seconds.\n")
        .map_err(|e| e.to_string())?;
    let corpus = analyzer(AnalysisOptions {
        detector: DetectorConfig {
            enable_numeric_comparison_suppression: true,
            ..Default::default()
        },
        ..Default::default()
    })
    .analyze_inputs(&[fixtures().join("smell_examples"), extra])
    .map_err(|e| e.to_string())?;
    let store = dir.path().join("store");
    RunStore::new(&store)
        .create_run(&corpus)
        .map_err(|e| e.to_string())?;
    let state = load_state(&store).map_err(|e| e.to_string())?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0")
            .await
            .map_err(|e| e.to_string())?;
        let addr = listener.local_addr().map_err(|e| e.to_string())?;
        let router = app(state, &ServeOptions::default());
        let server = tokio::spawn(reqsmell_server::serve(listener, router));
        let result = api_checks(&format!("http://{addr}/api/v1")).await;
        server.abort();
        result
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("precision table regression", precision_regression),
        ("recall table regression", recall_regression),
        ("density regression", density_regression),
        ("fixture-corpus detection", fixture_detection),
        ("story-part regression", story_part_regression),
        ("determinism and id stability", determinism),
        ("morphology property suite", morphology),
        ("suppression heuristics", suppression),
        ("kappa correctness", kappa),
        ("API contract", api_contract),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(()) => println!("PASS {name}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name}: {e}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
