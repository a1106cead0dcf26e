use crate::args::EvalArgs;
use crate::config::FileConfig;
use crate::usage;
use anyhow::Context;
use reqsmell_core::evalkit::{evaluate, parse_findings, parse_gold, MatchPolicy};

pub fn run(args: EvalArgs, file: FileConfig) -> anyhow::Result<u8> {
    let predictions = args
        .predictions
        .or(file.predictions)
        .ok_or_else(|| usage("eval needs --predictions"))?;
    let gold = args
        .gold
        .or(file.gold)
        .ok_or_else(|| usage("eval needs --gold"))?;
    let policy = match args.policy.or(file.policy) {
        Some(p) => p.parse::<MatchPolicy>().map_err(usage)?,
        None => MatchPolicy::default(),
    };
    let group = args.group_ambiguity || file.group_ambiguity.unwrap_or(false);
    let json = args.json || file.json.unwrap_or(false);

    let text = std::fs::read_to_string(&predictions)
        .with_context(|| format!("reading {}", predictions.display()))?;
    let findings =
        parse_findings(&text).with_context(|| format!("in {}", predictions.display()))?;
    let text =
        std::fs::read_to_string(&gold).with_context(|| format!("reading {}", gold.display()))?;
    let spans = parse_gold(&text).with_context(|| format!("in {}", gold.display()))?;

    let report = evaluate(&findings, &spans, policy, group)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.to_text());
    }
    Ok(0)
}
