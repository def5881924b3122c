use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rcc::CountMode;
use crate::schedule::DEFAULT_T_MAX;
use crate::sk::CouplingDist;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Instance-by-instance optimization of the decoded energy.
    OptimizeSt,
    /// Instance-by-instance optimization of the penalized energy.
    OptimizePe,
    /// Fixed Trotterized annealing schedules.
    Trotter,
    /// Optimized vanilla QAOA on the logical spins.
    Vanilla,
    /// Non-vanishing averaged term counts.
    CountRcc,
    /// Optimal single-layer angles against constraint strength.
    AngleScan,
    /// Exact ground-state energies.
    ExactSolution,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::OptimizeSt,
        Experiment::OptimizePe,
        Experiment::Trotter,
        Experiment::Vanilla,
        Experiment::CountRcc,
        Experiment::AngleScan,
        Experiment::ExactSolution,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::OptimizeSt => "optimize_st",
            Experiment::OptimizePe => "optimize_pe",
            Experiment::Trotter => "trotter",
            Experiment::Vanilla => "vanilla",
            Experiment::CountRcc => "count_rcc",
            Experiment::AngleScan => "angle_scan",
            Experiment::ExactSolution => "exact_solution",
        }
    }

    /// Whether the experiment produces per-instance records.
    pub fn has_records(self) -> bool {
        !matches!(self, Experiment::CountRcc | Experiment::AngleScan)
    }

    fn needs_layout(self) -> bool {
        !matches!(self, Experiment::Vanilla | Experiment::ExactSolution)
    }

    /// Whether the depth list is meaningful.
    pub fn uses_depth(self) -> bool {
        !matches!(self, Experiment::AngleScan | Experiment::ExactSolution)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().replace('-', "_");
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == key)
            .ok_or_else(|| invalid(format!("unknown experiment '{s}'")))
    }
}

fn default_p() -> Vec<usize> {
    vec![1]
}
fn default_instances() -> usize {
    200
}
fn default_c() -> f64 {
    3.0
}
fn default_t_max() -> Vec<f64> {
    DEFAULT_T_MAX.to_vec()
}
fn default_restarts() -> usize {
    4
}
fn default_tol() -> f64 {
    1e-6
}
fn default_c_values() -> Vec<f64> {
    (0..=40).map(|k| k as f64 * 0.25).collect()
}
fn default_out() -> PathBuf {
    PathBuf::from("results")
}

/// One experiment grid. Every field except `experiment` has a default, so a
/// TOML file only needs the keys it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub n: Vec<usize>,
    #[serde(default = "default_p")]
    pub p: Vec<usize>,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_c", alias = "C")]
    pub c_strength: f64,
    #[serde(default)]
    pub dist: CouplingDist,
    /// Annealing time per depth; a single entry applies to every depth.
    #[serde(default = "default_t_max")]
    pub t_max: Vec<f64>,
    /// Random starts on top of the seeded ones.
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub mode: CountMode,
    /// Constraint strengths for the angle scan.
    #[serde(default = "default_c_values")]
    pub c_values: Vec<f64>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(experiment: Experiment, n: Vec<usize>) -> Self {
        Self {
            experiment,
            n,
            p: default_p(),
            instances: default_instances(),
            seed: 0,
            c_strength: default_c(),
            dist: CouplingDist::default(),
            t_max: default_t_max(),
            restarts: default_restarts(),
            tol: default_tol(),
            mode: CountMode::default(),
            c_values: default_c_values(),
            out: default_out(),
            threads: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() {
            return Err(invalid("the n list is empty"));
        }
        let min_n = if self.experiment.needs_layout() { 3 } else { 2 };
        if let Some(&n) = self.n.iter().find(|&&n| n < min_n) {
            return Err(invalid(format!("{} needs n >= {min_n}, got {n}", self.experiment)));
        }
        if self.experiment.uses_depth() {
            if self.p.is_empty() {
                return Err(invalid("the p list is empty"));
            }
            if self.p.contains(&0) {
                return Err(invalid("depths must be positive"));
            }
        }
        if self.experiment.has_records() && self.instances == 0 {
            return Err(invalid("instances must be positive"));
        }
        if !(self.c_strength >= 0.0 && self.c_strength.is_finite()) {
            return Err(invalid(format!("C must be finite and >= 0, got {}", self.c_strength)));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads must be positive"));
        }
        if self.experiment == Experiment::Trotter {
            if self.t_max.is_empty() {
                return Err(invalid("the t_max table is empty"));
            }
            let max_p = self.p.iter().copied().max().unwrap_or(0);
            if self.t_max.len() > 1 && self.t_max.len() < max_p {
                return Err(invalid(format!(
                    "the t_max table has {} entries but p goes up to {max_p}",
                    self.t_max.len()
                )));
            }
        }
        if self.experiment == Experiment::AngleScan {
            if self.n.len() != 1 {
                return Err(invalid("angle_scan takes exactly one n"));
            }
            if self.c_values.is_empty() || self.c_values.iter().any(|c| !(*c >= 0.0 && c.is_finite())) {
                return Err(invalid("c_values must be a non-empty list of finite values >= 0"));
            }
        }
        Ok(())
    }

    /// Annealing time used at depth `p`.
    pub fn t_max_for(&self, p: usize) -> f64 {
        if self.t_max.len() == 1 {
            self.t_max[0]
        } else {
            self.t_max[p - 1]
        }
    }

    /// Depths actually run; the exact solution has none and is recorded at 0.
    pub fn depths(&self) -> Vec<usize> {
        if self.experiment.uses_depth() {
            self.p.clone()
        } else {
            vec![0]
        }
    }
}
