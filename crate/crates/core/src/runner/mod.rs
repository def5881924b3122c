//! Batch experiments over instance grids.
//!
//! A [`RunConfig`] names an experiment and its grid. [`run`] executes it and
//! writes its files into the output directory:
//!
//! * per-instance experiments: `records.csv`, `aggregate.csv`
//! * `count_rcc`: `counts.csv` with `n,p,mode,count,upper_bound`
//! * `angle_scan`: `angle_scan.csv` with `C,beta,gamma,omega`
//!
//! plus `manifest.json` in every case. CSVs start with `# schema=1`. Rows are
//! ordered by `(n, p, instance)` whatever the worker count, and the manifest
//! is written even when the run stops early, with `complete: false`.
//!
//! An instance is sampled from `derive_seed(seed, [n, index])`, so the same
//! instances recur at every depth; optimizer starts use
//! `derive_seed(seed, [n, p, index])`.

mod config;
mod records;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

pub use config::{Experiment, RunConfig};
pub use records::{
    aggregate, aggregate_path, mean_sem, read_aggregate, read_csv, read_records, records_digest, write_aggregate,
    write_csv, write_records, AggregateRow, RunRecord, AGGREGATE_COLUMNS, RECORD_COLUMNS, SCHEMA_HEADER,
};

use crate::analytic::{angle_scan, AngleScanRow};
use crate::engine::{self, Backend, EngineOptions};
use crate::error::Result;
use crate::exec::Exec;
use crate::layout::ParityLayout;
use crate::optimizer::{optimize_instance_with, optimize_vanilla, InstanceOptions, Target};
use crate::rcc::{count_row, CountRow};
use crate::rng::derive_seed;
use crate::schedule::trotter;
use crate::sk::{ground_state, sample, SkInstance};

pub const RECORDS_FILE: &str = "records.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const COUNTS_FILE: &str = "counts.csv";
pub const ANGLE_SCAN_FILE: &str = "angle_scan.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub const COUNT_COLUMNS: [&str; 5] = ["n", "p", "mode", "count", "upper_bound"];
pub const ANGLE_SCAN_COLUMNS: [&str; 4] = ["C", "beta", "gamma", "omega"];

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema: u32,
    pub version: &'static str,
    pub experiment: Experiment,
    pub config: RunConfig,
    pub complete: bool,
    pub error: Option<String>,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
    pub rows: usize,
    /// Digest of the records with wall-clock times zeroed.
    pub records_digest: Option<String>,
}

/// Everything a run produced.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<AggregateRow>,
    pub counts: Vec<CountRow>,
    pub angles: Vec<AngleScanRow>,
    pub warnings: Vec<String>,
}

/// Seed an instance of size `n` is sampled from.
pub fn instance_seed(master: u64, n: usize, index: usize) -> u64 {
    derive_seed(master, &[n as u64, index as u64])
}

/// Seed of the optimizer's random starts for one grid cell.
pub fn start_seed(master: u64, n: usize, p: usize, index: usize) -> u64 {
    derive_seed(master, &[n as u64, p as u64, index as u64])
}

/// The instance at `index` of the size-`n` batch.
pub fn instance(cfg: &RunConfig, n: usize, index: usize) -> Result<SkInstance> {
    sample(n, cfg.dist, instance_seed(cfg.seed, n, index))
}

/// Runs the grid and writes its files. On failure the rows finished so far
/// are still written together with an incomplete manifest, and the error is
/// returned.
pub fn run(cfg: &RunConfig, exec: Exec) -> Result<RunSummary> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out)?;
    let mut summary = RunSummary {
        out_dir: cfg.out.clone(),
        ..Default::default()
    };
    let outcome = match cfg.experiment {
        Experiment::CountRcc => run_counts(cfg, exec, &mut summary),
        Experiment::AngleScan => {
            summary.angles = angle_scan(cfg.n[0], &cfg.c_values, exec);
            Ok(())
        }
        _ => run_records(cfg, exec, &mut summary),
    };
    let files = write_outputs(cfg, &mut summary)?;
    let manifest = Manifest {
        schema: 1,
        version: env!("CARGO_PKG_VERSION"),
        experiment: cfg.experiment,
        config: cfg.clone(),
        complete: outcome.is_ok(),
        error: outcome.as_ref().err().map(|e| e.to_string()),
        warnings: summary.warnings.clone(),
        files,
        rows: summary.records.len() + summary.counts.len() + summary.angles.len(),
        records_digest: if cfg.experiment.has_records() {
            Some(records_digest(&summary.records)?)
        } else {
            None
        },
    };
    std::fs::write(cfg.out.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    outcome.map(|()| summary)
}

fn write_outputs(cfg: &RunConfig, summary: &mut RunSummary) -> Result<Vec<String>> {
    let out = &cfg.out;
    let mut files = Vec::new();
    match cfg.experiment {
        Experiment::CountRcc => {
            write_csv(&out.join(COUNTS_FILE), &summary.counts, &COUNT_COLUMNS)?;
            files.push(COUNTS_FILE.to_owned());
        }
        Experiment::AngleScan => {
            write_csv(&out.join(ANGLE_SCAN_FILE), &summary.angles, &ANGLE_SCAN_COLUMNS)?;
            files.push(ANGLE_SCAN_FILE.to_owned());
        }
        _ => {
            summary.aggregates = aggregate(&summary.records);
            for &n in &cfg.n {
                for p in cfg.depths() {
                    if !summary.aggregates.iter().any(|a| a.n == n && a.p == p) {
                        summary.warnings.push(format!("no records for n={n}, p={p}; group omitted"));
                    }
                }
            }
            write_records(&out.join(RECORDS_FILE), &summary.records)?;
            write_aggregate(&out.join(AGGREGATE_FILE), &summary.aggregates)?;
            files.push(RECORDS_FILE.to_owned());
            files.push(AGGREGATE_FILE.to_owned());
        }
    }
    files.push(MANIFEST_FILE.to_owned());
    Ok(files)
}

fn run_counts(cfg: &RunConfig, exec: Exec, summary: &mut RunSummary) -> Result<()> {
    for &n in &cfg.n {
        for &p in &cfg.p {
            summary.counts.push(count_row(n, p, cfg.mode, exec)?);
        }
    }
    Ok(())
}

fn run_records(cfg: &RunConfig, exec: Exec, summary: &mut RunSummary) -> Result<()> {
    for &n in &cfg.n {
        let layout = if matches!(cfg.experiment, Experiment::Vanilla | Experiment::ExactSolution) {
            None
        } else {
            Some(ParityLayout::build(n)?)
        };
        for p in cfg.depths() {
            let results = exec.map_range(cfg.instances, |index| record(cfg, layout.as_ref(), n, p, index));
            for r in results {
                summary.records.push(r?);
            }
        }
    }
    Ok(())
}

/// Computes one record. Instance-level work is the parallel axis, so
/// everything inside runs sequentially.
pub fn record(cfg: &RunConfig, layout: Option<&ParityLayout>, n: usize, p: usize, index: usize) -> Result<RunRecord> {
    let start = Instant::now();
    let inst = instance(cfg, n, index)?;
    let eopts = EngineOptions {
        backend: Backend::Auto,
        exec: Exec::Sequential,
    };
    let mut rec = RunRecord {
        experiment: cfg.experiment,
        n,
        p,
        instance: index,
        seed: inst.seed(),
        schedule: "null".to_owned(),
        e_pe: None,
        e_st: 0.0,
        perf_st: 0.0,
        broken_constraints: None,
        evals: None,
        converged: None,
        wall_ms: 0.0,
    };
    match cfg.experiment {
        Experiment::OptimizeSt | Experiment::OptimizePe => {
            let layout = layout.expect("parity experiments build a layout");
            let target = if cfg.experiment == Experiment::OptimizeSt {
                Target::St
            } else {
                Target::Pe
            };
            let mut opts = InstanceOptions::new(cfg.restarts, start_seed(cfg.seed, n, p, index));
            opts.tol = cfg.tol;
            opts.exec = Exec::Sequential;
            let out = optimize_instance_with(layout, &inst, p, target, cfg.c_strength, &opts)?;
            rec.broken_constraints = Some(engine::broken_constraints_expectation(
                layout,
                &inst,
                &out.opt.best_schedule,
                &eopts,
            )?);
            rec.schedule = serde_json::to_string(&out.opt.best_schedule)?;
            rec.e_pe = Some(out.e_pe);
            rec.e_st = out.e_st;
            rec.evals = Some(out.opt.evals);
            rec.converged = Some(out.opt.converged);
        }
        Experiment::Trotter => {
            let layout = layout.expect("parity experiments build a layout");
            let s = trotter(p, cfg.t_max_for(p))?;
            rec.e_st = engine::energy_st_with(layout, &inst, &s, &eopts)?;
            rec.e_pe = Some(engine::energy_pe_with(layout, &inst, &s, cfg.c_strength, &eopts)?);
            rec.broken_constraints = Some(engine::broken_constraints_expectation(layout, &inst, &s, &eopts)?);
            rec.schedule = serde_json::to_string(&s)?;
        }
        Experiment::Vanilla => {
            let mut opts = InstanceOptions::new(cfg.restarts, start_seed(cfg.seed, n, p, index));
            opts.tol = cfg.tol;
            opts.exec = Exec::Sequential;
            let out = optimize_vanilla(&inst, p, &opts)?;
            rec.schedule = serde_json::json!({ "gammas": out.gammas, "betas": out.betas }).to_string();
            rec.e_st = out.energy;
            rec.evals = Some(out.evals);
            rec.converged = Some(out.converged);
        }
        Experiment::ExactSolution => {
            rec.e_st = ground_state(&inst)?.0;
        }
        Experiment::CountRcc | Experiment::AngleScan => unreachable!("not a per-instance experiment"),
    }
    rec.perf_st = engine::perf_from_energy(n, rec.e_st);
    rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(rec)
}

/// Aggregates a records file into `aggregate.csv` next to it.
pub fn aggregate_dir(dir: &Path) -> Result<Vec<AggregateRow>> {
    aggregate_path(&dir.join(RECORDS_FILE), &dir.join(AGGREGATE_FILE))
}
