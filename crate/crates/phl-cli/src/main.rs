use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use phl_cli::config::{ExperimentConfig, InequalityId};
use phl_cli::{corpus, experiment};

/// Numerical verification harness for multiparameter Hardy-space
/// inequalities on sampled fields.
#[derive(Parser)]
#[command(name = "phl", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Plain-text config file (`key = value` lines, `#` comments).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for reports / corpora.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Corpus seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Grid override, e.g. `n=256x256,L=16x16`.
    #[arg(long)]
    grid: Option<String>,
    /// Hardy exponent p in (0, 1].
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an atom corpus: binary fields plus a JSON-lines manifest.
    GenCorpus {
        #[command(flatten)]
        common: CommonFlags,
        /// Dimension of the corpus grid (1, 2, or 3).
        #[arg(long)]
        d: Option<usize>,
    },
    /// Run one inequality experiment and write `<out>/<id>.{csv,json}`.
    /// Exits nonzero when the ratio-spread gate fails.
    Verify {
        /// One of: hls, hardy-littlewood, cesaro-hardy, cesaro-lp,
        /// iterated-hilbert, uchiyama, majorization, counterexample,
        /// sq-vs-max.
        inequality: String,
        #[command(flatten)]
        common: CommonFlags,
        /// Fractional order alpha (hls).
        #[arg(long)]
        alpha: Option<f64>,
        /// Ratio-spread gate override.
        #[arg(long)]
        gate: Option<f64>,
    },
    /// Summarize the saved reports in the output directory.
    Report {
        /// Directory holding `<id>.json` reports.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn build_config(
    id: InequalityId,
    common: &CommonFlags,
    alpha: Option<f64>,
    gate: Option<f64>,
    d: Option<usize>,
) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(id);
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    if let Some(d) = d {
        cfg.d = d;
    }
    if let Some(grid) = &common.grid {
        cfg.apply_grid_flag(grid)?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(p) = common.p {
        cfg.p = p;
    }
    if let Some(alpha) = alpha {
        cfg.alpha = Some(alpha);
    }
    if let Some(gate) = gate {
        cfg.gate = gate;
    }
    cfg.finalize()?;
    Ok(cfg)
}

fn cmd_gen_corpus(common: CommonFlags, d: Option<usize>) -> Result<bool> {
    // The corpus generator shares the hls corpus defaults.
    let cfg = build_config(InequalityId::Hls, &common, None, None, d)?;
    let (manifest, count) = corpus::generate(&cfg, &common.out)?;
    println!("wrote {count} members to {}", manifest.display());
    Ok(true)
}

fn cmd_verify(
    inequality: String,
    common: CommonFlags,
    alpha: Option<f64>,
    gate: Option<f64>,
) -> Result<bool> {
    let id: InequalityId = inequality.parse()?;
    let cfg = build_config(id, &common, alpha, gate, None)?;
    let report = experiment::run_experiment(&cfg)?;
    let (csv, json) = report.write(&common.out)?;
    println!("{}", report.headline());
    println!("  csv:  {}", csv.display());
    println!("  json: {}", json.display());
    Ok(report.pass)
}

fn cmd_report(out: PathBuf) -> Result<bool> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&out)
        .with_context(|| format!("reading {}", out.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    entries.sort();
    if entries.is_empty() {
        println!("no reports in {}", out.display());
        return Ok(true);
    }
    let mut all_pass = true;
    println!(
        "{:<18} {:>7} {:>12} {:>12} {:>12} {:>10}  {}",
        "inequality", "members", "min", "median", "max", "spread", "pass"
    );
    for path in entries {
        let text = std::fs::read_to_string(&path)?;
        let v: serde_json::Value = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        let pass = v["pass"].as_bool().unwrap_or(false);
        all_pass &= pass;
        println!(
            "{:<18} {:>7} {:>12.4e} {:>12.4e} {:>12.4e} {:>10.3e}  {}",
            v["inequality"].as_str().unwrap_or("?"),
            v["summary"]["count"].as_u64().unwrap_or(0),
            v["summary"]["min"].as_f64().unwrap_or(f64::NAN),
            v["summary"]["median"].as_f64().unwrap_or(f64::NAN),
            v["summary"]["max"].as_f64().unwrap_or(f64::NAN),
            v["summary"]["spread"].as_f64().unwrap_or(f64::NAN),
            if pass { "ok" } else { "FAIL" }
        );
    }
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::GenCorpus { common, d } => cmd_gen_corpus(common, d),
        Command::Verify {
            inequality,
            common,
            alpha,
            gate,
        } => cmd_verify(inequality, common, alpha, gate),
        Command::Report { out } => cmd_report(out),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
