use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use medalign::pipeline::{self, PipelineConfig, Stage};

#[derive(Parser)]
#[command(
    name = "medalign",
    version,
    about = "Deterministic distant-supervision corpus builder, split auditor, and scorer for biomedical relation extraction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct PipelineArgs {
    /// Declarative JSON config file; values in the file win over flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Root seed for all derived per-stage randomness (required).
    #[arg(long)]
    seed: Option<u64>,
    /// Split mode: inductive or transductive.
    #[arg(long)]
    mode: Option<String>,
    /// Train,valid,test fractions (must sum to 1).
    #[arg(long, value_delimiter = ',', num_args = 3)]
    ratios: Option<Vec<f64>>,
    /// Target NA instance fraction per split.
    #[arg(long)]
    na_target: Option<f64>,
    /// Mention-pool pruning threshold.
    #[arg(long)]
    prune_threshold: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    mrconso: Option<PathBuf>,
    #[arg(long)]
    mrsty: Option<PathBuf>,
    #[arg(long)]
    mrrel: Option<PathBuf>,
    /// Entity-linked sentence corpus (newline-delimited JSON).
    #[arg(long)]
    sentences: Option<PathBuf>,
    /// Mention stoplist file (one surface per line); defaults to the bundled list.
    #[arg(long)]
    stoplist: Option<PathBuf>,
    /// Source vocabularies to keep (comma-separated).
    #[arg(long, value_delimiter = ',')]
    source_vocabs: Option<Vec<String>>,
    /// Upper bound on worker threads (execution is sequential; accepted for
    /// config portability).
    #[arg(long)]
    threads: Option<usize>,
}

/// Config-file counterpart of the flags; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    mode: Option<String>,
    ratios: Option<[f64; 3]>,
    na_target: Option<f64>,
    prune_threshold: Option<u64>,
    out_dir: Option<PathBuf>,
    mrconso: Option<PathBuf>,
    mrsty: Option<PathBuf>,
    mrrel: Option<PathBuf>,
    sentences: Option<PathBuf>,
    stoplist: Option<PathBuf>,
    source_vocabs: Option<Vec<String>>,
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the RRF inputs into typed intermediate tables.
    Parse(PipelineArgs),
    /// Build the canonical knowledge graph from parsed tables.
    BuildKg(PipelineArgs),
    /// Split the knowledge graph into train/valid/test triples.
    Split(PipelineArgs),
    /// Align split triples with sentences into labeled instances.
    Align(PipelineArgs),
    /// Emit the final dataset files and summary statistics.
    Emit(PipelineArgs),
    /// Run pipeline stages in dependency order.
    Run {
        #[command(flatten)]
        args: PipelineArgs,
        /// Stage to run: all, parse, kg, split, align, emit.
        #[arg(long, default_value = "all")]
        stage: String,
    },
    /// Audit train/eval triple files for direct and inverse-aware overlap.
    Audit {
        #[arg(long)]
        train: PathBuf,
        /// Evaluation split files (repeatable).
        #[arg(long = "eval", required = true)]
        evals: Vec<PathBuf>,
        /// Surface-to-CUI normalization map (tab-separated); identity if omitted.
        #[arg(long)]
        norm_map: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a prediction file against gold facts.
    Score {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Ranks for precision-at-k.
        #[arg(long = "at", value_delimiter = ',', default_value = "100,200,300")]
        ks: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize instance files (counts, bags, NA fraction).
    Stats {
        /// Instance files; split names are taken from file stems.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Merge defaults, flags, and the config file. The file wins over flags on
/// conflict, with a log line per override.
fn resolve_config(args: &PipelineArgs) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    let mut seed = args.seed;

    macro_rules! apply_flag {
        ($field:ident) => {
            if let Some(v) = &args.$field {
                cfg.$field = Some(v.clone());
            }
        };
    }
    if let Some(v) = &args.mode {
        cfg.mode = v.clone();
    }
    if let Some(v) = &args.ratios {
        cfg.ratios = [v[0], v[1], v[2]];
    }
    if let Some(v) = args.na_target {
        cfg.na_target = v;
    }
    if let Some(v) = args.prune_threshold {
        cfg.prune_threshold = v;
    }
    if let Some(v) = &args.out_dir {
        cfg.out_dir = v.clone();
    }
    apply_flag!(mrconso);
    apply_flag!(mrsty);
    apply_flag!(mrrel);
    apply_flag!(sentences);
    apply_flag!(stoplist);
    if let Some(v) = &args.source_vocabs {
        cfg.source_vocabs = v.clone();
    }
    if let Some(v) = args.threads {
        cfg.threads = v.max(1);
    }

    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let file: ConfigFile = serde_json::from_str(&text)
            .with_context(|| format!("invalid config file {}", path.display()))?;

        macro_rules! apply_file {
            ($field:ident, $flag:expr) => {
                if let Some(v) = file.$field {
                    if $flag.is_some() {
                        log::warn!(
                            "config file overrides --{} from the command line",
                            stringify!($field).replace('_', "-")
                        );
                    }
                    Some(v)
                } else {
                    cfg.$field
                }
            };
        }
        if let Some(v) = file.seed {
            if seed.is_some() {
                log::warn!("config file overrides --seed from the command line");
            }
            seed = Some(v);
        }
        if let Some(v) = file.mode {
            if args.mode.is_some() {
                log::warn!("config file overrides --mode from the command line");
            }
            cfg.mode = v;
        }
        if let Some(v) = file.ratios {
            if args.ratios.is_some() {
                log::warn!("config file overrides --ratios from the command line");
            }
            cfg.ratios = v;
        }
        if let Some(v) = file.na_target {
            if args.na_target.is_some() {
                log::warn!("config file overrides --na-target from the command line");
            }
            cfg.na_target = v;
        }
        if let Some(v) = file.prune_threshold {
            if args.prune_threshold.is_some() {
                log::warn!("config file overrides --prune-threshold from the command line");
            }
            cfg.prune_threshold = v;
        }
        if let Some(v) = file.out_dir {
            if args.out_dir.is_some() {
                log::warn!("config file overrides --out-dir from the command line");
            }
            cfg.out_dir = v;
        }
        cfg.mrconso = apply_file!(mrconso, args.mrconso);
        cfg.mrsty = apply_file!(mrsty, args.mrsty);
        cfg.mrrel = apply_file!(mrrel, args.mrrel);
        cfg.sentences = apply_file!(sentences, args.sentences);
        cfg.stoplist = apply_file!(stoplist, args.stoplist);
        if let Some(v) = file.source_vocabs {
            if args.source_vocabs.is_some() {
                log::warn!("config file overrides --source-vocabs from the command line");
            }
            cfg.source_vocabs = v;
        }
        if let Some(v) = file.threads {
            if args.threads.is_some() {
                log::warn!("config file overrides --threads from the command line");
            }
            cfg.threads = v.max(1);
        }
    }

    let Some(seed) = seed else {
        bail!("usage: --seed is required (or set `seed` in the config file)");
    };
    cfg.seed = seed;
    Ok(cfg)
}

fn stages_for(name: &str) -> Result<Vec<Stage>> {
    Ok(match name {
        "all" => Stage::ALL.to_vec(),
        "parse" => vec![Stage::Parse],
        "kg" | "build-kg" => vec![Stage::Kg],
        "split" => vec![Stage::Split],
        "align" => vec![Stage::Align],
        "emit" => vec![Stage::Emit],
        other => bail!("usage: unknown stage `{other}`"),
    })
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Parse(args) => pipeline::run_stages(&resolve_config(&args)?, &[Stage::Parse]),
        Command::BuildKg(args) => pipeline::run_stages(&resolve_config(&args)?, &[Stage::Kg]),
        Command::Split(args) => pipeline::run_stages(&resolve_config(&args)?, &[Stage::Split]),
        Command::Align(args) => pipeline::run_stages(&resolve_config(&args)?, &[Stage::Align]),
        Command::Emit(args) => pipeline::run_stages(&resolve_config(&args)?, &[Stage::Emit]),
        Command::Run { args, stage } => {
            pipeline::run_stages(&resolve_config(&args)?, &stages_for(&stage)?)
        }
        Command::Audit {
            train,
            evals,
            norm_map,
            out,
        } => {
            let report = pipeline::run_audit(&train, &evals, norm_map.as_deref(), out.as_deref())?;
            println!("{report:#}");
            Ok(())
        }
        Command::Score {
            predictions,
            gold,
            ks,
            out,
        } => {
            let report = pipeline::run_score(&predictions, &gold, &ks, out.as_deref())?;
            println!("{report:#}");
            Ok(())
        }
        Command::Stats { files, out } => {
            let named: Vec<(String, PathBuf)> = files
                .iter()
                .map(|p| {
                    (
                        p.file_stem()
                            .map(|s| s.to_string_lossy().into_owned())
                            .unwrap_or_else(|| p.display().to_string()),
                        p.clone(),
                    )
                })
                .collect();
            let report = pipeline::run_stats(&named, out.as_deref())?;
            println!("{report:#}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version output is a success, not a usage error.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.to_string().starts_with("usage:") {
                return ExitCode::from(1);
            }
            ExitCode::from(pipeline::exit_code(&e) as u8)
        }
    }
}
