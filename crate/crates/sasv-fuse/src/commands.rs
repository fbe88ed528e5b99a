//! The subcommands, as library functions writing their console output to
//! a caller-supplied sink.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use sasv_core::fusion::{pipeline_scores, train_pipeline, PathwaySpec, TrainedPipeline, FUSED_COLUMN};
use sasv_core::metrics::{evaluate, histogram_export, ADCFConfig, EvalReport, LabeledScores};
use sasv_core::synth::{default_sasv_scenario, derive_seed, generate_trials, SynthConfig};
use sasv_core::{Partition, ScoreTable};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::model_io::{read_json, save_pipeline, to_json_string, write_json};
use crate::report::{
    attack_row_for, best_per_mode, histogram_csv, table1_csv, table1_text, table2_csv, table2_text, AttackRow,
    PathwayResult, RunSummary,
};
use crate::score_io::{attach_scores, parse_trial_key, read_canonical, write_canonical, KeyFormat};

/// Console output is best effort; a closed stdout must not fail a run.
macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        let _ = writeln!($out, $($arg)*);
    };
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone)]
pub struct IngestArgs {
    pub key: PathBuf,
    pub format: KeyFormat,
    /// `(column name, score file)` in column order.
    pub scores: Vec<(String, PathBuf)>,
    pub partition: Partition,
    pub out: PathBuf,
}

pub fn cmd_ingest(args: &IngestArgs, out: &mut dyn Write) -> Result<ScoreTable> {
    let mut table = parse_trial_key(&args.key, args.format)?;
    for (column, path) in &args.scores {
        table = attach_scores(&table, column, path)?;
    }
    table.set_partition(args.partition);
    write_canonical(&table, &args.out)?;
    say!(out, "{}: {} trials, columns [{}]", args.out.display(), table.len(), table.columns().join(", "));
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct SynthArgs {
    /// Scenario file; `None` selects the built-in scenario.
    pub config: Option<PathBuf>,
    /// Overrides the scenario's seed.
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
}

pub const PARTITION_FILES: [(Partition, &str); 3] =
    [(Partition::Train, "train.tsv"), (Partition::Dev, "dev.tsv"), (Partition::Eval, "eval.tsv")];

/// Writes `train.tsv`, `dev.tsv` and `eval.tsv`, each generated from its
/// own seed derived from the scenario seed.
pub fn cmd_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let mut scenario: SynthConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => default_sasv_scenario(args.seed.unwrap_or(0)),
    };
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    scenario.validate()?;
    create_dir(&args.out_dir)?;
    let mut written = Vec::new();
    for (stream, (partition, file)) in PARTITION_FILES.iter().enumerate() {
        let mut cfg = scenario.clone();
        cfg.seed = derive_seed(scenario.seed, stream as u64);
        let mut table = generate_trials(&cfg)?;
        table.set_partition(*partition);
        let path = args.out_dir.join(file);
        write_canonical(&table, &path)?;
        say!(out, "{}: {} trials, columns [{}]", path.display(), table.len(), table.columns().join(", "));
        written.push(path);
    }
    Ok(written)
}

struct PathwayRun {
    result: PathwayResult,
    pipeline: Option<TrainedPipeline>,
    dev: Option<ScoreTable>,
    eval: Option<ScoreTable>,
}

fn score_and_evaluate(pipeline: &TrainedPipeline, table: &ScoreTable, adcf: &ADCFConfig) -> Result<(ScoreTable, EvalReport)> {
    let scored = table.with_column(FUSED_COLUMN, pipeline_scores(pipeline, table)?)?;
    let report = evaluate(&LabeledScores::from_table(&scored, FUSED_COLUMN)?, adcf)?;
    Ok((scored, report))
}

fn run_pathway(index: usize, spec: &PathwaySpec, data: &[ScoreTable; 3], cfg: &RunConfig) -> PathwayRun {
    let [train, dev, eval] = data;
    let attempt = || -> Result<_> {
        let pipeline = train_pipeline(train, spec, &cfg.fusion, cfg.seed)?;
        let (dev_scored, dev_report) = score_and_evaluate(&pipeline, dev, &cfg.adcf)?;
        let (eval_scored, eval_report) = score_and_evaluate(&pipeline, eval, &cfg.adcf)?;
        Ok((pipeline, dev_scored, dev_report, eval_scored, eval_report))
    };
    let mut result = PathwayResult { index, name: spec.name(), spec: spec.clone(), dev: None, eval: None, error: None };
    match attempt() {
        Ok((pipeline, dev_scored, dev_report, eval_scored, eval_report)) => {
            result.dev = Some(dev_report);
            result.eval = Some(eval_report);
            PathwayRun { result, pipeline: Some(pipeline), dev: Some(dev_scored), eval: Some(eval_scored) }
        }
        Err(e) => {
            result.error = Some(e.to_string());
            PathwayRun { result, pipeline: None, dev: None, eval: None }
        }
    }
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    unix_time: u64,
    config: &'a RunConfig,
}

/// Trains and evaluates every configured pathway.
///
/// Output layout under `out_dir`: `table1.{txt,csv}`, `table2.{txt,csv}`,
/// `summary.json`, and per pathway `reports/`, `models/`, `histograms/`
/// and (optionally) `scores/`. Everything except `provenance.json` is a
/// pure function of the config and input tables. A failing pathway is
/// recorded and the others continue; the run fails only if all do.
pub fn cmd_run(cfg: &RunConfig, out: &mut dyn Write) -> Result<RunSummary> {
    cfg.validate()?;
    let specs = cfg.pathways.expand()?;
    let data = [read_canonical(&cfg.train)?, read_canonical(&cfg.dev)?, read_canonical(&cfg.eval)?];
    let dir = &cfg.out_dir;
    for sub in ["", "reports", "models", "histograms", "scores"] {
        if sub != "scores" || cfg.write_scores {
            create_dir(&dir.join(sub))?;
        }
    }

    let runs: Vec<PathwayRun> = specs.par_iter().enumerate().map(|(i, s)| run_pathway(i, s, &data, cfg)).collect();

    let eval_table = &data[2];
    let mut attack_rows: Vec<AttackRow> = Vec::new();
    for column in eval_table.columns() {
        let scores = LabeledScores::from_table(eval_table, column)?;
        let report = evaluate(&scores, &cfg.adcf)?;
        attack_rows.push(AttackRow {
            system: column.clone(),
            per_attack: report.per_attack,
            pooled: report.pooled_attack_eer,
        });
        let h = histogram_export(&scores, cfg.histogram_bins)?;
        write_file(&dir.join("histograms").join(format!("column_{column}.csv")), &histogram_csv(&h))?;
    }

    for run in &runs {
        let r = &run.result;
        let slug = r.slug();
        write_json(r, &dir.join("reports").join(format!("{slug}.json")))?;
        match (&run.pipeline, &run.dev, &run.eval) {
            (Some(pipeline), Some(dev), Some(eval)) => {
                save_pipeline(pipeline, &dir.join("models").join(format!("{slug}.json")))?;
                let h = histogram_export(&LabeledScores::from_table(eval, FUSED_COLUMN)?, cfg.histogram_bins)?;
                write_file(&dir.join("histograms").join(format!("{slug}.csv")), &histogram_csv(&h))?;
                if cfg.write_scores {
                    write_canonical(dev, &dir.join("scores").join(format!("{slug}_dev.tsv")))?;
                    write_canonical(eval, &dir.join("scores").join(format!("{slug}_eval.tsv")))?;
                }
                say!(out, "ok     {}", r.name);
            }
            _ => {
                say!(out, "FAILED {}: {}", r.name, r.error.as_deref().unwrap_or(""));
            }
        }
    }

    let results: Vec<PathwayResult> = runs.into_iter().map(|r| r.result).collect();
    attack_rows.extend(best_per_mode(&results).into_iter().filter_map(|i| attack_row_for(&results[i])));
    let summary = RunSummary { pathways: results, attack_rows };

    write_file(&dir.join("table1.txt"), &table1_text(&summary.pathways))?;
    write_file(&dir.join("table1.csv"), &table1_csv(&summary.pathways))?;
    write_file(&dir.join("table2.txt"), &table2_text(&summary.attack_rows))?;
    write_file(&dir.join("table2.csv"), &table2_csv(&summary.attack_rows))?;
    write_json(&summary, &dir.join("summary.json"))?;
    let unix_time = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let provenance = Provenance { tool: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION"), unix_time, config: cfg };
    write_json(&provenance, &dir.join("provenance.json"))?;

    say!(out, "\n{}", table1_text(&summary.pathways));
    say!(out, "{}", table2_text(&summary.attack_rows));
    if summary.pathways.iter().all(|p| !p.succeeded()) {
        return Err(Error::AllPathwaysFailed(summary.pathways.len()));
    }
    Ok(summary)
}

/// Prints the metric suite for one column of a canonical table as JSON.
pub fn cmd_eval(table: &Path, column: &str, adcf: &ADCFConfig, out: &mut dyn Write) -> Result<EvalReport> {
    adcf.validate()?;
    let table = read_canonical(table)?;
    let report = evaluate(&LabeledScores::from_table(&table, column)?, adcf)?;
    let _ = out.write_all(to_json_string(&report).as_bytes());
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

/// Re-renders both tables from a finished run directory.
pub fn cmd_report(run_dir: &Path, format: ReportFormat, out: &mut dyn Write) -> Result<RunSummary> {
    let summary: RunSummary = read_json(&run_dir.join("summary.json"))?;
    let (t1, t2) = match format {
        ReportFormat::Text => (table1_text(&summary.pathways), table2_text(&summary.attack_rows)),
        ReportFormat::Csv => (table1_csv(&summary.pathways), table2_csv(&summary.attack_rows)),
    };
    let _ = write!(out, "{t1}\n{t2}");
    Ok(summary)
}
