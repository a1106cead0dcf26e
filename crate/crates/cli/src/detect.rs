use crate::args::DetectArgs;
use crate::config::FileConfig;
use crate::usage;
use anyhow::Context;
use reqsmell_core::ingest::{CsvConfig, Format};
use reqsmell_core::nlp::Lexicon;
use reqsmell_core::pipeline::{AnalysisOptions, Analyzer};
use reqsmell_core::smells::{DetectorConfig, DictionarySet, SmellKind};

pub fn parse_smells(names: &[String]) -> anyhow::Result<Vec<SmellKind>> {
    names
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<SmellKind>().map_err(usage))
        .collect()
}

/// Builds the analyzer from flags, falling back to the config file.
pub fn build_analyzer(args: &DetectArgs, file: &FileConfig) -> anyhow::Result<Analyzer<'static>> {
    let format = match args.format.as_ref().or(file.format.as_ref()) {
        Some(f) => Some(f.parse::<Format>().map_err(usage)?),
        None => None,
    };
    let csv_id = args.csv_id.clone().or_else(|| file.csv_id.clone());
    let csv_text = args.csv_text.clone().or_else(|| file.csv_text.clone());
    let csv = Some(CsvConfig::new(
        csv_id.unwrap_or_else(|| "ID".into()),
        csv_text.unwrap_or_else(|| "Text".into()),
    ));

    let mut detector = DetectorConfig::default();
    if let Some(names) = args.smells.as_ref().or(file.smells.as_ref()) {
        detector.enabled_smells = parse_smells(names)?.into_iter().collect();
        if detector.enabled_smells.is_empty() {
            return Err(usage("--smells names no smell"));
        }
    }
    detector.enable_condition_suppression =
        args.condition_suppression || file.condition_suppression.unwrap_or(false);
    detector.enable_numeric_comparison_suppression =
        args.numeric_suppression || file.numeric_suppression.unwrap_or(false);

    let lexicon: &'static Lexicon = match args.lexicon_dir.as_ref().or(file.lexicon_dir.as_ref()) {
        Some(dir) => {
            let lex = Lexicon::load_dir(dir)
                .with_context(|| format!("loading lexicon from {}", dir.display()))?;
            Box::leak(Box::new(lex))
        }
        None => Lexicon::bundled(),
    };
    let mut dictionaries = DictionarySet::bundled(lexicon);
    if let Some(dir) = args
        .dictionary_dir
        .as_ref()
        .or(file.dictionary_dir.as_ref())
    {
        if !dir.is_dir() {
            anyhow::bail!("dictionary directory {} does not exist", dir.display());
        }
        let custom = DictionarySet::load_dir(dir, lexicon)?;
        for d in custom.iter() {
            dictionaries.insert(d.clone());
        }
        detector.dictionary_dir = Some(dir.clone());
    }

    if let Some(jobs) = args.jobs.or(file.jobs) {
        if jobs == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }

    let options = AnalysisOptions {
        format,
        csv,
        detector,
    };
    Ok(Analyzer::new(lexicon, dictionaries, options)?)
}
