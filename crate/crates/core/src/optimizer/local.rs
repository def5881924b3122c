//! Local minimizers: Nelder–Mead and a projected limited-memory BFGS.

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// A function of a flat parameter vector.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> Result<f64>;

    /// Value and gradient when an analytic gradient is available.
    fn value_and_gradient(&self, _x: &[f64]) -> Option<Result<(f64, Vec<f64>)>> {
        None
    }
}

/// Wraps a closure as a derivative-free objective.
pub struct FnObjective<F> {
    dim: usize,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        (self.f)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// L-BFGS when the objective has an analytic gradient, else Nelder–Mead.
    #[default]
    Auto,
    NelderMead,
    /// L-BFGS, with central differences when no analytic gradient exists.
    Lbfgs,
}

#[derive(Debug, Clone)]
pub struct LocalOptions {
    pub method: Method,
    pub tol: f64,
    pub max_evals: usize,
    /// Central-difference step for objectives without a gradient.
    pub fd_step: f64,
    /// Per-coordinate box; `None` leaves a coordinate free.
    pub bounds: Vec<Option<(f64, f64)>>,
}

impl LocalOptions {
    pub fn new(dim: usize, tol: f64) -> Self {
        Self {
            method: Method::Auto,
            tol,
            max_evals: 2000 + 400 * dim,
            fd_step: 1e-5,
            bounds: vec![None; dim],
        }
    }
}

#[derive(Debug, Clone)]
pub struct LocalResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

pub fn local_minimize(obj: &dyn Objective, x0: &[f64], opts: &LocalOptions) -> Result<LocalResult> {
    let analytic = obj.value_and_gradient(x0).is_some();
    match opts.method {
        Method::NelderMead => nelder_mead(obj, x0, opts),
        Method::Lbfgs => lbfgs(obj, x0, opts),
        Method::Auto if analytic => lbfgs(obj, x0, opts),
        Method::Auto => nelder_mead(obj, x0, opts),
    }
}

fn project(x: &mut [f64], bounds: &[Option<(f64, f64)>]) {
    for (v, b) in x.iter_mut().zip(bounds) {
        if let Some((lo, hi)) = b {
            *v = v.clamp(*lo, *hi);
        }
    }
}

fn value_and_gradient(obj: &dyn Objective, x: &[f64], h: f64, evals: &mut usize) -> Result<(f64, Vec<f64>)> {
    if let Some(r) = obj.value_and_gradient(x) {
        *evals += 1;
        return r;
    }
    let f = obj.value(x)?;
    let mut g = vec![0.0; x.len()];
    let mut y = x.to_vec();
    for k in 0..x.len() {
        y[k] = x[k] + h;
        let plus = obj.value(&y)?;
        y[k] = x[k] - h;
        let minus = obj.value(&y)?;
        y[k] = x[k];
        g[k] = (plus - minus) / (2.0 * h);
    }
    *evals += 1 + 2 * x.len();
    Ok((f, g))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Gradient with components zeroed where a bound blocks descent.
fn projected_gradient(x: &[f64], g: &[f64], bounds: &[Option<(f64, f64)>]) -> Vec<f64> {
    x.iter()
        .zip(g)
        .zip(bounds)
        .map(|((&xi, &gi), b)| match b {
            Some((lo, _)) if xi <= *lo && gi > 0.0 => 0.0,
            Some((_, hi)) if xi >= *hi && gi < 0.0 => 0.0,
            _ => gi,
        })
        .collect()
}

fn lbfgs(obj: &dyn Objective, x0: &[f64], opts: &LocalOptions) -> Result<LocalResult> {
    const MEMORY: usize = 8;
    let gtol = 1e-2 * opts.tol.sqrt();
    let xtol = opts.tol.sqrt();
    let mut evals = 0;
    let mut x = x0.to_vec();
    project(&mut x, &opts.bounds);
    let (mut f, mut g) = value_and_gradient(obj, &x, opts.fd_step, &mut evals)?;
    let mut history: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let mut converged = false;
    while evals < opts.max_evals {
        let pg = projected_gradient(&x, &g, &opts.bounds);
        if inf_norm(&pg) <= gtol {
            converged = true;
            break;
        }
        // Two-loop recursion.
        let mut q = pg.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.last() {
            let scale = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|v| *v *= scale);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        if dot(&d, &pg) >= 0.0 {
            history.clear();
            d = pg.iter().map(|v| -v).collect();
        }
        let mut step = if history.is_empty() {
            (0.1 / inf_norm(&d)).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..40 {
            let mut xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            project(&mut xn, &opts.bounds);
            let dx: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            let fn_ = obj.value(&xn)?;
            evals += 1;
            if fn_ <= f + 1e-4 * dot(&g, &dx) {
                accepted = Some((xn, dx, fn_));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, dx, _)) = accepted else {
            if history.is_empty() {
                // No descent even along the steepest direction.
                converged = inf_norm(&pg) <= gtol.sqrt();
                break;
            }
            history.clear();
            continue;
        };
        let (fn_, gn) = value_and_gradient(obj, &xn, opts.fd_step, &mut evals)?;
        let dg: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&dx, &dg);
        if sy > 1e-12 * dot(&dx, &dx).sqrt() * dot(&dg, &dg).sqrt() && sy > 0.0 {
            history.push((dx.clone(), dg, 1.0 / sy));
            if history.len() > MEMORY {
                history.remove(0);
            }
        }
        let small_change = (f - fn_).abs() <= opts.tol * (1.0 + f.abs()) && inf_norm(&dx) <= xtol;
        x = xn;
        f = fn_;
        g = gn;
        if small_change {
            converged = true;
            break;
        }
    }
    Ok(LocalResult {
        x,
        value: f,
        evals,
        converged,
    })
}

fn nelder_mead(obj: &dyn Objective, x0: &[f64], opts: &LocalOptions) -> Result<LocalResult> {
    let dim = x0.len();
    let xtol = opts.tol.sqrt();
    let eval = |x: &mut Vec<f64>, evals: &mut usize| -> Result<f64> {
        project(x, &opts.bounds);
        *evals += 1;
        obj.value(x)
    };
    let mut evals = 0;
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let mut start = x0.to_vec();
    let f0 = eval(&mut start, &mut evals)?;
    simplex.push((start.clone(), f0));
    for k in 0..dim {
        let mut v = start.clone();
        v[k] += 0.25;
        if let Some((_, hi)) = opts.bounds[k] {
            if v[k] > hi {
                v[k] = start[k] - 0.25;
            }
        }
        let f = eval(&mut v, &mut evals)?;
        simplex.push((v, f));
    }
    let mut converged = false;
    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let spread = simplex
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if (worst - best).abs() <= opts.tol * (1.0 + best.abs()) && spread <= xtol {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|(v, _)| v[k]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let mut xr = along(1.0);
        let fr = eval(&mut xr, &mut evals)?;
        if fr < best {
            let mut xe = along(2.0);
            let fe = eval(&mut xe, &mut evals)?;
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
        } else {
            let (mut xc, t) = if fr < worst { (along(0.5), fr) } else { (along(-0.5), worst) };
            let fc = eval(&mut xc, &mut evals)?;
            if fc < t {
                simplex[dim] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for (v, f) in simplex.iter_mut().skip(1) {
                    let mut shrunk: Vec<f64> = v.iter().zip(&x_best).map(|(a, b)| b + 0.5 * (a - b)).collect();
                    *f = eval(&mut shrunk, &mut evals)?;
                    *v = shrunk;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Ok(LocalResult {
        x,
        value,
        evals,
        converged,
    })
}
