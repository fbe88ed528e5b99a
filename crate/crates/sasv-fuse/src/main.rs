use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sasv_core::metrics::ADCFConfig;
use sasv_core::Partition;
use sasv_fuse::commands::{cmd_eval, cmd_ingest, cmd_report, cmd_run, cmd_synth, IngestArgs, ReportFormat, SynthArgs};
use sasv_fuse::config::RunConfig;
use sasv_fuse::score_io::KeyFormat;
use sasv_fuse::Error;

#[derive(Parser)]
#[command(name = "sasv-fuse", version, about = "Score-level fusion for spoofing-aware speaker verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Sasv,
    Canonical,
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionArg {
    Train,
    Dev,
    Eval,
    Other,
}

#[derive(Args)]
struct AdcfArgs {
    #[arg(long, default_value_t = 0.9)]
    p_target: f64,
    #[arg(long, default_value_t = 0.05)]
    p_nontarget: f64,
    #[arg(long, default_value_t = 0.05)]
    p_spoof: f64,
    #[arg(long, default_value_t = 1.0)]
    c_miss: f64,
    #[arg(long, default_value_t = 10.0)]
    c_fa_nontarget: f64,
    #[arg(long, default_value_t = 20.0)]
    c_fa_spoof: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Join a trial key and score files into a canonical table
    Ingest {
        #[arg(long)]
        key: PathBuf,
        /// Score column as NAME=PATH; repeat in column order
        #[arg(long = "score", value_parser = parse_score_arg)]
        scores: Vec<(String, PathBuf)>,
        #[arg(long, value_enum, default_value = "sasv")]
        format: FormatArg,
        #[arg(long, value_enum, default_value = "other")]
        partition: PartitionArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate synthetic train/dev/eval tables
    Synth {
        #[arg(long, conflicts_with = "default_scenario", required_unless_present = "default_scenario")]
        config: Option<PathBuf>,
        #[arg(long)]
        default_scenario: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train, score and report every pathway of a run config
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the metric suite of one score column as JSON
    Eval {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "s")]
        column: String,
        #[command(flatten)]
        adcf: AdcfArgs,
    },
    /// Re-render the result tables of a finished run
    Report {
        #[arg(long)]
        run_dir: PathBuf,
        #[arg(long)]
        csv: bool,
    },
}

fn parse_score_arg(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => Ok((name.to_string(), PathBuf::from(path))),
        _ => Err(format!("expected NAME=PATH, got `{s}`")),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let stdout = &mut io::stdout().lock();
    match cli.command {
        Command::Ingest { key, scores, format, partition, out } => {
            let format = match format {
                FormatArg::Sasv => KeyFormat::SasvProtocol,
                FormatArg::Canonical => KeyFormat::CanonicalTsv,
            };
            let partition = match partition {
                PartitionArg::Train => Partition::Train,
                PartitionArg::Dev => Partition::Dev,
                PartitionArg::Eval => Partition::Eval,
                PartitionArg::Other => Partition::Other,
            };
            cmd_ingest(&IngestArgs { key, format, scores, partition, out }, stdout)?;
        }
        Command::Synth { config, default_scenario: _, seed, out } => {
            cmd_synth(&SynthArgs { config, seed, out_dir: out }, stdout)?;
        }
        Command::Run { config, seed, out } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(out) = out {
                cfg.out_dir = out;
            }
            cmd_run(&cfg, stdout)?;
        }
        Command::Eval { table, column, adcf } => {
            let cfg = ADCFConfig {
                prior_target: adcf.p_target,
                prior_nontarget: adcf.p_nontarget,
                prior_spoof: adcf.p_spoof,
                cost_miss: adcf.c_miss,
                cost_fa_nontarget: adcf.c_fa_nontarget,
                cost_fa_spoof: adcf.c_fa_spoof,
            };
            cmd_eval(&table, &column, &cfg, stdout)?;
        }
        Command::Report { run_dir, csv } => {
            let format = if csv { ReportFormat::Csv } else { ReportFormat::Text };
            cmd_report(&run_dir, format, stdout)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
