//! Multistart minimization of QAOA objectives over angle schedules.
//!
//! Every run starts from two seeded schedules (the Trotter ramp and a
//! single-layer optimum padded with identity layers) followed by `restarts`
//! random canonical schedules. Restart `r` draws from its own seed stream, so
//! adding restarts only adds starts. The best result is canonicalized and
//! re-evaluated.

mod local;

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::Serialize;

pub use local::{local_minimize, FnObjective, LocalOptions, LocalResult, Method, Objective};

use crate::analytic;
use crate::engine::{self, st_cost_diagonal, Backend, EngineOptions, ParityEvaluator, VanillaEvaluator, DENSE_CAP};
use crate::error::{invalid, Error, Result};
use crate::exec::Exec;
use crate::layout::ParityLayout;
use crate::rng;
use crate::schedule::{canonicalize, default_t_max, trotter, wrap_half_circle, AngleSchedule};
use crate::sk::SkInstance;

pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_TOL: f64 = 1e-8;

/// Which coordinates are treated as angles on a circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Domain {
    /// Every angle is pi-periodic; search is unconstrained and the result is
    /// shifted into the canonical box.
    #[default]
    Periodic,
    /// Gamma is confined to the canonical box (non-integer couplings); beta
    /// and omega stay periodic.
    GammaBoxed,
    /// Every angle is confined to the canonical box.
    Boxed,
}

impl Domain {
    fn bounds(self, p: usize) -> Vec<Option<(f64, f64)>> {
        let boxed = Some((-FRAC_PI_2, FRAC_PI_2));
        match self {
            Domain::Periodic => vec![None; 3 * p],
            Domain::GammaBoxed => (0..3 * p).map(|k| if k < p { boxed } else { None }).collect(),
            Domain::Boxed => vec![boxed; 3 * p],
        }
    }

    fn canonical(self, s: &AngleSchedule) -> AngleSchedule {
        match self {
            Domain::GammaBoxed => {
                let wrap = |v: &[f64]| v.iter().map(|&a| wrap_half_circle(a)).collect::<Vec<_>>();
                AngleSchedule::new(s.gammas().to_vec(), wrap(s.betas()), wrap(s.omegas()))
                    .expect("shifting angles keeps a schedule valid")
            }
            _ => canonicalize(s),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub method: Method,
    pub exec: Exec,
    pub domain: Domain,
    /// Seeded starts tried before the random ones; padded to depth `p`.
    pub seeds: Vec<AngleSchedule>,
    pub max_evals: Option<usize>,
}

impl MinimizeOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            tol: DEFAULT_TOL,
            method: Method::Auto,
            exec: Exec::default(),
            domain: Domain::default(),
            seeds: Vec::new(),
            max_evals: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptResult {
    pub best_schedule: AngleSchedule,
    pub best_value: f64,
    pub restarts_used: usize,
    pub evals: usize,
    pub converged: bool,
    /// Index of the winning start; seeded starts come first.
    pub best_start: usize,
}

/// The Trotter ramp and a padded single-layer schedule.
pub fn default_seeds(p: usize, p1: &AngleSchedule) -> Vec<AngleSchedule> {
    vec![
        trotter(p, default_t_max(p)).expect("default t_max is positive"),
        p1.padded(p),
    ]
}

fn random_start(seed: u64, r: usize, dim: usize) -> Vec<f64> {
    let mut g = rng::stream(seed, &[r as u64]);
    (0..dim).map(|_| FRAC_PI_2 - g.gen::<f64>() * PI).collect()
}

/// Multistart minimization of a schedule objective over `3p` angles.
pub fn minimize_with(obj: &dyn Objective, p: usize, opts: &MinimizeOptions) -> Result<OptResult> {
    if p == 0 {
        return Err(invalid("need at least one layer"));
    }
    if obj.dim() != 3 * p {
        return Err(invalid(format!("objective has {} parameters, expected {}", obj.dim(), 3 * p)));
    }
    if !(opts.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    if opts.restarts == 0 && opts.seeds.is_empty() {
        return Err(invalid("need at least one start"));
    }
    let mut starts: Vec<Vec<f64>> = opts.seeds.iter().map(|s| s.padded(p).to_vec()).collect();
    if let Some(bad) = starts.iter().find(|s| s.len() != 3 * p) {
        return Err(invalid(format!("seed schedule has {} layers, expected {p}", bad.len() / 3)));
    }
    starts.extend((0..opts.restarts).map(|r| random_start(opts.seed, r, 3 * p)));
    let mut local = LocalOptions::new(3 * p, opts.tol);
    local.method = opts.method;
    local.bounds = opts.domain.bounds(p);
    if let Some(m) = opts.max_evals {
        local.max_evals = m;
    }
    let idx: Vec<usize> = (0..starts.len()).collect();
    let results = opts.exec.try_map(&idx, |&k| {
        local_minimize(obj, &starts[k], &local).map_err(|e| Error::Objective {
            start: k,
            source: Box::new(e),
        })
    })?;
    let (best_start, best) = results
        .iter()
        .enumerate()
        .fold(None::<(usize, &LocalResult)>, |acc, (k, r)| match acc {
            Some((_, b)) if b.value <= r.value => acc,
            _ => Some((k, r)),
        })
        .expect("at least one start");
    let best_schedule = opts.domain.canonical(&AngleSchedule::from_vec(&best.x)?);
    let best_value = obj.value(&best_schedule.to_vec()).map_err(|e| Error::Objective {
        start: best_start,
        source: Box::new(e),
    })?;
    Ok(OptResult {
        best_schedule,
        best_value,
        restarts_used: starts.len(),
        evals: results.iter().map(|r| r.evals).sum::<usize>() + 1,
        converged: best.converged,
        best_start,
    })
}

/// Derivative-free multistart minimization of an arbitrary schedule
/// objective over the canonical box, seeded with the Trotter ramp and the
/// trivial single-layer schedule.
pub fn minimize<F>(objective: F, p: usize, restarts: usize, seed: u64, tol: f64) -> Result<OptResult>
where
    F: Fn(&AngleSchedule) -> Result<f64> + Sync,
{
    let obj = FnObjective::new(3 * p, |x: &[f64]| objective(&AngleSchedule::from_vec(x)?));
    let mut opts = MinimizeOptions::new(restarts, seed);
    opts.tol = tol;
    opts.method = Method::NelderMead;
    opts.domain = Domain::Boxed;
    opts.seeds = default_seeds(p, &AngleSchedule::trivial());
    minimize_with(&obj, p, &opts)
}

/// Which energy an instance is optimized for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// Mean line-decoding energy.
    St,
    /// Constraint-penalized energy.
    Pe,
}

/// Expectation of a fixed diagonal, with adjoint gradients.
pub struct DiagonalObjective<'a> {
    ev: &'a ParityEvaluator,
    cost: Vec<f64>,
    p: usize,
}

impl<'a> DiagonalObjective<'a> {
    pub fn new(ev: &'a ParityEvaluator, cost: Vec<f64>, p: usize) -> Self {
        Self { ev, cost, p }
    }
}

impl Objective for DiagonalObjective<'_> {
    fn dim(&self) -> usize {
        3 * self.p
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.ev.expectation(&AngleSchedule::from_vec(x)?, &self.cost))
    }

    fn value_and_gradient(&self, x: &[f64]) -> Option<Result<(f64, Vec<f64>)>> {
        Some(AngleSchedule::from_vec(x).map(|s| self.ev.value_and_gradient(&s, &self.cost)))
    }
}

/// Optimized schedule of one instance together with its energies.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceOutcome {
    pub opt: OptResult,
    pub e_pe: f64,
    pub e_st: f64,
    pub perf_st: f64,
}

#[derive(Debug, Clone)]
pub struct InstanceOptions {
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub method: Method,
    pub exec: Exec,
    /// Seeded starts; `None` uses the Trotter ramp and the single-layer
    /// optimum of the target.
    pub seeds: Option<Vec<AngleSchedule>>,
}

impl InstanceOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            tol: DEFAULT_TOL,
            method: Method::Auto,
            exec: Exec::default(),
            seeds: None,
        }
    }
}

/// Single-layer optimum used as a seed: the trivial angles for the decoding
/// cost, the averaged closed-form optimum for the penalized energy.
pub fn p1_seed(n: usize, target: Target, c: f64) -> AngleSchedule {
    match target {
        Target::St => AngleSchedule::trivial(),
        Target::Pe => {
            let (beta, gamma, omega) = analytic::optimal_angles_p1(n, c);
            AngleSchedule::single(gamma, beta, omega)
        }
    }
}

pub fn optimize_instance(
    layout: &ParityLayout,
    inst: &SkInstance,
    p: usize,
    target: Target,
    c: f64,
    restarts: usize,
    seed: u64,
) -> Result<InstanceOutcome> {
    optimize_instance_with(layout, inst, p, target, c, &InstanceOptions::new(restarts, seed))
}

pub fn optimize_instance_with(
    layout: &ParityLayout,
    inst: &SkInstance,
    p: usize,
    target: Target,
    c: f64,
    opts: &InstanceOptions,
) -> Result<InstanceOutcome> {
    if !(c >= 0.0) {
        return Err(invalid(format!("constraint strength must be >= 0, got {c}")));
    }
    let seeds = match &opts.seeds {
        Some(s) => s.clone(),
        None => default_seeds(p, &p1_seed(layout.n(), target, c)),
    };
    let mut mopts = MinimizeOptions::new(opts.restarts, opts.seed);
    mopts.tol = opts.tol;
    mopts.method = opts.method;
    mopts.exec = opts.exec;
    mopts.seeds = seeds;
    mopts.domain = if inst.has_integer_couplings() {
        Domain::Periodic
    } else {
        Domain::GammaBoxed
    };
    if layout.num_qubits() <= DENSE_CAP {
        let ev = ParityEvaluator::new(layout, inst)?;
        let st = st_cost_diagonal(layout, inst)?;
        let pe = ev.pe_cost(c);
        let cost = match target {
            Target::St => st.clone(),
            Target::Pe => pe.clone(),
        };
        let opt = minimize_with(&DiagonalObjective::new(&ev, cost, p), p, &mopts)?;
        let s = &opt.best_schedule;
        let e_st = ev.expectation(s, &st);
        let e_pe = ev.expectation(s, &pe);
        Ok(InstanceOutcome {
            perf_st: engine::perf_from_energy(layout.n(), e_st),
            e_st,
            e_pe,
            opt,
        })
    } else {
        // Beyond the dense cap every evaluation goes through per-term cones.
        let eopts = EngineOptions {
            backend: Backend::Rcc,
            exec: Exec::Sequential,
        };
        let obj = FnObjective::new(3 * p, |x: &[f64]| {
            let s = AngleSchedule::from_vec(x)?;
            match target {
                Target::St => engine::energy_st_with(layout, inst, &s, &eopts),
                Target::Pe => engine::energy_pe_with(layout, inst, &s, c, &eopts),
            }
        });
        let opt = minimize_with(&obj, p, &mopts)?;
        let s = &opt.best_schedule;
        let e_st = engine::energy_st_with(layout, inst, s, &eopts)?;
        let e_pe = engine::energy_pe_with(layout, inst, s, c, &eopts)?;
        Ok(InstanceOutcome {
            perf_st: engine::perf_from_energy(layout.n(), e_st),
            e_st,
            e_pe,
            opt,
        })
    }
}

/// Optimized vanilla QAOA angles of one instance.
#[derive(Debug, Clone, Serialize)]
pub struct VanillaOutcome {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub energy: f64,
    pub perf: f64,
    pub restarts_used: usize,
    pub evals: usize,
    pub converged: bool,
}

struct VanillaObjective<'a> {
    ev: &'a VanillaEvaluator,
    p: usize,
}

impl Objective for VanillaObjective<'_> {
    fn dim(&self) -> usize {
        2 * self.p
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.ev.energy(&x[..self.p], &x[self.p..])
    }

    fn value_and_gradient(&self, x: &[f64]) -> Option<Result<(f64, Vec<f64>)>> {
        Some(self.ev.energy_and_gradient(&x[..self.p], &x[self.p..]))
    }
}

/// Minimizes `<H_P>` over `p` vanilla layers. Seeds are linear ramps with
/// the problem angle scaled by `1/sqrt(n)` in all four sign combinations;
/// random starts draw the problem angle from `[-2, 2]/sqrt(n)` and the mixer
/// angle from the canonical range.
pub fn optimize_vanilla(inst: &SkInstance, p: usize, opts: &InstanceOptions) -> Result<VanillaOutcome> {
    if p == 0 {
        return Err(invalid("need at least one layer"));
    }
    let ev = VanillaEvaluator::new(inst)?;
    let obj = VanillaObjective { ev: &ev, p };
    let scale = (inst.n() as f64).sqrt().recip();
    let mut starts = Vec::new();
    for sg in [1.0, -1.0] {
        for sb in [1.0, -1.0] {
            let mut x: Vec<f64> = (0..p).map(|i| sg * 0.5 * scale * (i as f64 + 1.0) / p as f64).collect();
            x.extend((0..p).map(|i| sb * PI / 8.0 * (1.0 - i as f64 / p as f64)));
            starts.push(x);
        }
    }
    for r in 0..opts.restarts {
        let mut g = rng::stream(opts.seed, &[r as u64]);
        let mut x: Vec<f64> = (0..p).map(|_| (4.0 * g.gen::<f64>() - 2.0) * scale).collect();
        x.extend((0..p).map(|_| FRAC_PI_2 - g.gen::<f64>() * PI));
        starts.push(x);
    }
    let mut local = LocalOptions::new(2 * p, opts.tol);
    local.method = opts.method;
    let gamma_box = if inst.has_integer_couplings() {
        None
    } else {
        Some((-FRAC_PI_2, FRAC_PI_2))
    };
    for b in local.bounds.iter_mut().take(p) {
        *b = gamma_box;
    }
    let idx: Vec<usize> = (0..starts.len()).collect();
    let results = opts.exec.try_map(&idx, |&k| {
        local_minimize(&obj, &starts[k], &local).map_err(|e| Error::Objective {
            start: k,
            source: Box::new(e),
        })
    })?;
    let best = results
        .iter()
        .fold(None::<&LocalResult>, |acc, r| match acc {
            Some(b) if b.value <= r.value => acc,
            _ => Some(r),
        })
        .expect("at least one start");
    let wrap_gamma = gamma_box.is_none();
    let gammas: Vec<f64> = best.x[..p]
        .iter()
        .map(|&g| if wrap_gamma { wrap_half_circle(g) } else { g })
        .collect();
    let betas: Vec<f64> = best.x[p..].iter().map(|&b| wrap_half_circle(b)).collect();
    let energy = ev.energy(&gammas, &betas)?;
    Ok(VanillaOutcome {
        perf: engine::perf_from_energy(inst.n(), energy),
        energy,
        gammas,
        betas,
        restarts_used: starts.len(),
        evals: results.iter().map(|r| r.evals).sum::<usize>() + 1,
        converged: best.converged,
    })
}
