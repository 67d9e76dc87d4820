use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dmsearch::directions::DirectionFamily;
use dmsearch::harness::{run_experiment, run_single, summarize, verify_lemmas, ExperimentConfig};
use dmsearch::objective::MultiObjective;
use dmsearch::problems::{by_name, registry};
use dmsearch::trace::{RunTrace, SolverKind};
use dmsearch::{Error, Result};

#[derive(Parser)]
#[command(
    name = "dmsearch",
    version,
    about = "Direct multisearch runs, trace checks and scaling experiments"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// One run; writes trace.csv, entries.csv and summary.txt, then checks the trace.
    Solve(SolveArgs),
    /// Re-check a trace written by `solve`.
    Verify(VerifyArgs),
    /// Run an experiment grid and write scaling.csv and scaling.txt.
    Scaling(ScalingArgs),
    /// Print the registered problems.
    ListProblems,
}

#[derive(Args)]
struct Common {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop once mu <= epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    problem: Option<String>,
    /// dms, dms-minmax or minmax.
    #[arg(long)]
    solver: Option<String>,
    /// coordinate, rotated:L or random:COUNT:SEED.
    #[arg(long)]
    directions: Option<String>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Also write snapshots.csv with the archive every N iterations (DMS only).
    #[arg(long)]
    snapshot_every: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    entries: Option<PathBuf>,
    /// Defaults to the problem named in the trace header.
    #[arg(long)]
    problem: Option<String>,
}

#[derive(Args)]
struct ScalingArgs {
    #[command(flatten)]
    common: Common,
    /// Replaces the seed list.
    #[arg(long, value_delimiter = ',')]
    seed: Vec<u64>,
    /// Replaces the epsilon grid.
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<f64>,
}

fn load(config: &Option<PathBuf>) -> Result<ExperimentConfig> {
    match config {
        Some(p) => ExperimentConfig::from_file(p),
        None => Ok(ExperimentConfig::default()),
    }
}

fn solve(a: SolveArgs) -> Result<bool> {
    let mut cfg = load(&a.common.config)?;
    if let Some(p) = a.problem {
        cfg.problem = p;
    }
    if let Some(s) = a.solver {
        cfg.solver = SolverKind::parse(&s)?;
    }
    if let Some(d) = a.directions {
        cfg.directions = DirectionFamily::parse(&d)?;
    }
    if let Some(k) = a.max_iterations {
        cfg.max_iterations = k;
    }
    cfg.validate()?;
    let problem = by_name(&cfg.problem)?;
    let trace = run_single(&cfg, &problem, a.seed, a.epsilon)?;

    let out = &a.common.out_dir;
    fs::create_dir_all(out)?;
    trace.write_csv(BufWriter::new(File::create(out.join("trace.csv"))?))?;
    if !trace.entries.is_empty() {
        trace.write_entries_csv(BufWriter::new(File::create(out.join("entries.csv"))?))?;
        if let Some(every) = a.snapshot_every {
            trace.write_snapshots_csv(BufWriter::new(File::create(out.join("snapshots.csv"))?), every)?;
        }
    }
    let report = verify_lemmas(&trace, Some(&problem as &dyn MultiObjective))?;
    let text = format!("{}\n{}", summarize(&trace)?.to_text(), report.to_text());
    fs::write(out.join("summary.txt"), &text)?;
    print!("{text}");
    Ok(report.passed())
}

fn open(p: &Path) -> Result<BufReader<File>> {
    File::open(p)
        .map(BufReader::new)
        .map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn verify(a: VerifyArgs) -> Result<bool> {
    let entries = a.entries.as_deref().map(open).transpose()?;
    let trace = RunTrace::read_csv(open(&a.trace)?, entries)?;
    let name = a.problem.unwrap_or_else(|| trace.meta.problem.clone());
    // unknown problems still get the checks that need no gradients
    let problem = by_name(&name).ok();
    let report = verify_lemmas(&trace, problem.as_ref().map(|p| p as &dyn MultiObjective))?;
    print!("{}", report.to_text());
    Ok(report.passed())
}

fn scaling(a: ScalingArgs) -> Result<bool> {
    let mut cfg = load(&a.common.config)?;
    if !a.seed.is_empty() {
        cfg.seeds = a.seed;
    }
    if !a.epsilon.is_empty() {
        cfg.epsilon_grid = a.epsilon;
    }
    cfg.validate()?;
    let rep = run_experiment(&cfg)?;
    let out = &a.common.out_dir;
    fs::create_dir_all(out)?;
    rep.write_csv(BufWriter::new(File::create(out.join("scaling.csv"))?))?;
    let text = rep.to_text();
    fs::write(out.join("scaling.txt"), &text)?;
    print!("{text}");
    Ok(rep.passed())
}

fn main() -> ExitCode {
    let result = match Cli::parse().cmd {
        Cmd::Solve(a) => solve(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Scaling(a) => scaling(a),
        Cmd::ListProblems => {
            for (name, about) in registry() {
                println!("{name:<20} {about}");
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
