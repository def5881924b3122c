//! Command-line front end for the batch runner.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use lhz_qaoa::layout::ParityLayout;
use lhz_qaoa::rcc::CountMode;
use lhz_qaoa::runner::{self, Experiment, RunConfig, RunSummary};
use lhz_qaoa::sk::CouplingDist;
use lhz_qaoa::Exec;

#[derive(Parser)]
#[command(name = "lhz-qaoa", version, about = "Parity-encoded QAOA experiments on SK spin glasses")]
struct Cli {
    /// Worker threads (default: all cores; 1 runs sequentially).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the output directory of the file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimize the decoded energy instance by instance.
    OptimizeSt(Grid),
    /// Optimize the penalized energy instance by instance.
    OptimizePe(Grid),
    /// Evaluate Trotterized annealing schedules.
    Trotter(Grid),
    /// Optimize vanilla QAOA on the logical spins.
    Vanilla(Grid),
    /// Count non-vanishing averaged two-body terms.
    CountRcc(Grid),
    /// Scan the optimal single-layer angles against C.
    AngleScan(Grid),
    /// Exact ground-state energies.
    ExactSolution(Grid),
    /// Recompute aggregate.csv from a records file.
    Aggregate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a sampled instance as JSON.
    Instance {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "rademacher")]
        dist: CouplingDist,
    },
    /// Print the parity layout for n logical spins as JSON.
    Layout {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args)]
struct Grid {
    /// Problem sizes: a list `4,5,6` or an inclusive range `4..7`.
    #[arg(long, value_parser = parse_list)]
    n: IntList,
    /// Depths, same syntax as --n.
    #[arg(long, value_parser = parse_list)]
    p: Option<IntList>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "c-strength")]
    c_strength: Option<f64>,
    /// Annealing time per depth (comma separated) or one value for all.
    #[arg(long = "t-max", value_delimiter = ',')]
    t_max: Option<Vec<f64>>,
    #[arg(long)]
    mode: Option<CountMode>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    dist: Option<CouplingDist>,
    /// Constraint strengths for angle-scan (comma separated).
    #[arg(long = "c-values", value_delimiter = ',')]
    c_values: Option<Vec<f64>>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Clone)]
struct IntList(Vec<usize>);

fn parse_list(s: &str) -> Result<IntList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.parse().map_err(|e| format!("'{part}': {e}"))?;
            let b: usize = b.trim_start_matches('=').parse().map_err(|e| format!("'{part}': {e}"))?;
            if b < a {
                return Err(format!("empty range '{part}'"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|e| format!("'{part}': {e}"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(IntList(out))
}

impl Grid {
    fn into_config(self, experiment: Experiment) -> RunConfig {
        let mut cfg = RunConfig::new(experiment, self.n.0);
        if let Some(p) = self.p {
            cfg.p = p.0;
        }
        if let Some(v) = self.instances {
            cfg.instances = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.c_strength {
            cfg.c_strength = v;
        }
        if let Some(v) = self.t_max {
            cfg.t_max = v;
        }
        if let Some(v) = self.mode {
            cfg.mode = v;
        }
        if let Some(v) = self.restarts {
            cfg.restarts = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.dist {
            cfg.dist = v;
        }
        if let Some(v) = self.c_values {
            cfg.c_values = v;
        }
        cfg.out = self.out;
        cfg
    }
}

fn exec_for(threads: Option<usize>) -> Result<Exec> {
    if threads == Some(0) {
        bail!("--threads must be positive");
    }
    #[cfg(feature = "parallel")]
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(if threads == Some(1) {
        Exec::Sequential
    } else {
        Exec::Parallel
    })
}

fn report(summary: &RunSummary) {
    for a in &summary.aggregates {
        println!(
            "{} n={} p={} count={} mean={:.6} 3sem={:.6}",
            a.experiment, a.n, a.p, a.count, a.mean, a.three_sem
        );
    }
    for c in &summary.counts {
        println!("n={} p={} {} count={} upper_bound={:.6}", c.n, c.p, c.mode, c.count, c.upper_bound);
    }
    for r in &summary.angles {
        println!("C={} beta={:.6} gamma={:.6} omega={:.6}", r.c, r.beta, r.gamma, r.omega);
    }
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {}", summary.out_dir.display());
}

fn run_config(cfg: RunConfig, threads: Option<usize>) -> Result<()> {
    let exec = exec_for(threads.or(cfg.threads))?;
    let summary = runner::run(&cfg, exec)
        .with_context(|| format!("{} run failed; partial results in {}", cfg.experiment, cfg.out.display()))?;
    report(&summary);
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => {
            let mut cfg = RunConfig::from_toml_file(&config).with_context(|| format!("reading {}", config.display()))?;
            if let Some(out) = out {
                cfg.out = out;
            }
            run_config(cfg, cli.threads)
        }
        Command::OptimizeSt(g) => run_config(g.into_config(Experiment::OptimizeSt), cli.threads),
        Command::OptimizePe(g) => run_config(g.into_config(Experiment::OptimizePe), cli.threads),
        Command::Trotter(g) => run_config(g.into_config(Experiment::Trotter), cli.threads),
        Command::Vanilla(g) => run_config(g.into_config(Experiment::Vanilla), cli.threads),
        Command::CountRcc(g) => run_config(g.into_config(Experiment::CountRcc), cli.threads),
        Command::AngleScan(g) => run_config(g.into_config(Experiment::AngleScan), cli.threads),
        Command::ExactSolution(g) => run_config(g.into_config(Experiment::ExactSolution), cli.threads),
        Command::Aggregate { input, out } => {
            let rows = runner::aggregate_path(&input, &out).with_context(|| format!("aggregating {}", input.display()))?;
            println!("wrote {} groups to {}", rows.len(), out.display());
            Ok(())
        }
        Command::Instance { n, seed, dist } => {
            let inst = lhz_qaoa::sk::sample(n, dist, seed)?;
            println!("{}", serde_json::to_string_pretty(&inst)?);
            Ok(())
        }
        Command::Layout { n } => {
            println!("{}", serde_json::to_string_pretty(&ParityLayout::build(n)?.to_json())?);
            Ok(())
        }
    }
}
