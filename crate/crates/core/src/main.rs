use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tempocom::calibrate::calibration_grid;
use tempocom::driver::{detect, estimate_initial, PhaseTimings, RunConfig, RunStats};
use tempocom::io::{self as tio, CommunityRecord, GroundTruth};
use tempocom::oracle::{brute_force_best, exh_baseline};
use tempocom::pruning::{build_groups, precompute, prune_all, pruned_fraction, write_heatmap};
use tempocom::refine::WalkParams;
use tempocom::spectral::{lambda2, DEFAULT_TOLERANCE};
use tempocom::synth::{generate, SynthConfig};
use tempocom::{Interval, NormalizationConfig, Result};

#[derive(Parser)]
#[command(name = "tempocom", version, about = "Lowest temporal-conductance community search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full search and write communities, verdicts and run metadata.
    Detect(DetectArgs),
    /// Write a synthetic graph with one planted community.
    Generate(GenerateArgs),
    /// Write the pruning heatmap CSV `start,length,status,bound`.
    Prune(PruneArgs),
    /// Print `start,end,lambda2,bound` for precomputed blocks or every interval.
    Bounds(BoundsArgs),
    /// Print the exact optimum of a small instance as one JSON line.
    Oracle(OracleArgs),
    /// Print empirical and predicted hash collision rates as CSV.
    HashCalibrate(CalibrateArgs),
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = 2)]
    scale_base: usize,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 3)]
    rows: usize,
    #[arg(long, default_value_t = 4)]
    bands: usize,
    #[arg(long, default_value_t = 10)]
    topk: usize,
    #[arg(long, default_value_t = 5)]
    probes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long = "t-len", default_value_t = 1000)]
    t_len: usize,
    #[arg(long, default_value_t = 5.0)]
    mu: f64,
    #[arg(long, default_value_t = 20)]
    planted_nodes: usize,
    #[arg(long, default_value_t = 10)]
    planted_span: usize,
    #[arg(long)]
    planted_start: Option<usize>,
    #[arg(long, default_value_t = 8.0)]
    contrast: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge-list path; the ground truth goes to `<out>.truth.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PruneArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = 2)]
    scale_base: usize,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Incumbent to prune against; estimated from probes when absent.
    #[arg(long)]
    phi_star: Option<f64>,
    #[arg(long, default_value_t = 5)]
    probes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Test member intervals directly instead of groups first.
    #[arg(long)]
    no_groups: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = 2)]
    scale_base: usize,
    /// Solve every interval directly instead of listing precomputed blocks.
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    /// Run the sweep-from-every-seed baseline instead of exact enumeration.
    #[arg(long)]
    exh: bool,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long = "t-len", default_value_t = 1000)]
    t_len: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunRecord<'a> {
    config: &'a RunConfig,
    phi_star: f64,
    pruned_fraction: f64,
    incumbent_history: &'a [f64],
    stats: &'a RunStats,
    timings: &'a PhaseTimings,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run_detect(a: DetectArgs) -> Result<()> {
    let g = tio::load(&a.input)?;
    let cfg = RunConfig {
        alpha: a.alpha,
        scale_base: a.scale_base,
        beta: a.beta,
        rows: a.rows,
        bands: a.bands,
        topk: a.topk,
        probes: a.probes,
        seed: a.seed,
        threads: a.threads,
        ..RunConfig::default()
    };
    let state = detect(&g, &cfg)?;
    fs::create_dir_all(&a.out)?;

    tio::write_communities(&g, &state.communities, BufWriter::new(fs::File::create(a.out.join("communities.jsonl"))?))?;

    write_heatmap(&state.verdicts, BufWriter::new(fs::File::create(a.out.join("verdicts.csv"))?))?;

    let record = RunRecord {
        config: &state.config,
        phi_star: state.phi_star,
        pruned_fraction: state.pruned_fraction(),
        incumbent_history: &state.incumbent_history,
        stats: &state.stats,
        timings: &state.timings,
    };
    fs::write(a.out.join("run.json"), serde_json::to_string_pretty(&record)? + "\n")?;
    if let Some(best) = state.best() {
        eprintln!("best phi {:.6} over {} with {} nodes", best.phi, best.interval, best.nodes.len());
    }
    Ok(())
}

fn run_generate(a: GenerateArgs) -> Result<()> {
    let cfg = SynthConfig {
        n: a.n,
        m: a.m,
        t_len: a.t_len,
        mu: a.mu,
        planted_nodes: a.planted_nodes,
        planted_span: a.planted_span,
        planted_start: a.planted_start,
        contrast: a.contrast,
        seed: a.seed,
    };
    let (g, planted) = generate(&cfg)?;
    tio::save(&g, &a.out)?;
    let truth = GroundTruth {
        nodes: planted.nodes.iter().map(|&u| g.label(u).to_string()).collect(),
        t: planted.interval.start,
        t_end: planted.interval.end,
    };
    let mut side = a.out.clone().into_os_string();
    side.push(".truth.json");
    fs::write(side, serde_json::to_string(&truth)? + "\n")?;
    Ok(())
}

fn run_prune(a: PruneArgs) -> Result<()> {
    let g = tio::load(&a.input)?;
    let cfg = RunConfig {
        alpha: a.alpha,
        scale_base: a.scale_base,
        beta: a.beta,
        probes: a.probes,
        seed: a.seed,
        ..RunConfig::default()
    };
    let norm = cfg.validate()?;
    let bt = precompute(&g, cfg.scale_base, cfg.eig_tol)?;
    let phi_star = match a.phi_star {
        Some(p) => p,
        None => estimate_initial(&g, &bt, &cfg)?.phi_star,
    };
    let groups = build_groups(g.timeline_len(), cfg.scale_base, cfg.beta)?;
    let verdicts = prune_all(&bt, &groups, phi_star, &norm, !a.no_groups)?;
    write_heatmap(&verdicts, sink(a.out.as_deref())?)?;
    eprintln!("phi* {phi_star:.6}, pruned fraction {:.4}", pruned_fraction(&verdicts));
    Ok(())
}

fn run_bounds(a: BoundsArgs) -> Result<()> {
    let g = tio::load(&a.input)?;
    let norm = NormalizationConfig::new(a.alpha)?;
    let mut out = sink(a.out.as_deref())?;
    writeln!(out, "start,end,lambda2,bound")?;
    if a.all {
        for iv in Interval::all(g.timeline_len()) {
            let l = lambda2(&g.aggregate(iv)?, a.tol)?.lambda2;
            writeln!(out, "{},{},{},{}", iv.start, iv.end, l, norm.eta(iv) * l / 2.0)?;
        }
    } else {
        let bt = precompute(&g, a.scale_base, a.tol)?;
        for b in bt.blocks() {
            let Some(e) = b.eig else { continue };
            let l = b.certified_lambda2().unwrap_or(0.0);
            writeln!(out, "{},{},{},{}", b.interval.start, b.interval.end, e.lambda2, norm.eta(b.interval) * l / 2.0)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn run_oracle(a: OracleArgs) -> Result<()> {
    let g = tio::load(&a.input)?;
    let norm = NormalizationConfig::new(a.alpha)?;
    let best = if a.exh { exh_baseline(&g, &norm, &WalkParams::default())? } else { brute_force_best(&g, &norm)? };
    println!("{}", serde_json::to_string(&CommunityRecord::from_community(&g, &best))?);
    Ok(())
}

fn run_calibrate(a: CalibrateArgs) -> Result<()> {
    let cells = calibration_grid(a.t_len, a.trials, a.seed)?;
    let mut out = sink(a.out.as_deref())?;
    writeln!(out, "jw,delta,t_len,rows,pivots,bands,trials,observed,expected,sigma")?;
    for c in cells {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            c.jw,
            c.delta,
            c.t_len,
            c.rows,
            c.pivots,
            c.bands,
            c.trials,
            c.observed,
            c.expected,
            c.sigma()
        )?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Detect(a) => run_detect(a),
        Command::Generate(a) => run_generate(a),
        Command::Prune(a) => run_prune(a),
        Command::Bounds(a) => run_bounds(a),
        Command::Oracle(a) => run_oracle(a),
        Command::HashCalibrate(a) => run_calibrate(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
