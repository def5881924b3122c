//! Closed-form instance averages for a single layer, assuming every cone has
//! the bulk shape, and the optimal single-layer angles they imply.
//!
//! Argument order here is `(beta, gamma, omega)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::optimizer::{local_minimize, FnObjective, LocalOptions, Method};
use crate::schedule::wrap_half_circle;
use crate::sk::pair_count;

/// Ground-state energy density of the SK model in the large-`n` limit.
pub const PARISI_CONSTANT: f64 = 0.7632;

/// Spectral gap of a non-degenerate problem with couplings in {-1, +1}.
pub const RADEMACHER_GAP: f64 = 2.0;

const GRID: usize = 64;
const REFINED_CANDIDATES: usize = 16;

/// `E_J[J <Z>]` for a bulk qubit: `cos^4(2 omega) sin(2 beta) sin(2 gamma)`.
pub fn onsite_avg_p1(beta: f64, gamma: f64, omega: f64) -> f64 {
    (2.0 * omega).cos().powi(4) * (2.0 * beta).sin() * (2.0 * gamma).sin()
}

/// `E_J[<prod Z>]` for a bulk plaquette.
pub fn plaquette_avg_p1(beta: f64, gamma: f64, omega: f64) -> f64 {
    let (sb, cb) = (2.0 * beta).sin_cos();
    let cg = (2.0 * gamma).cos();
    let (so, co) = (2.0 * omega).sin_cos();
    4.0 * cg * so * co.powi(3) * sb * cb * (cb * cb - cg * cg * co * co * sb * sb)
}

fn plaquette_count(n: usize) -> f64 {
    ((n - 1) * (n - 2) / 2) as f64
}

/// `K onsite - C P plaquette`.
pub fn e_pe_avg_p1(n: usize, c: f64, beta: f64, gamma: f64, omega: f64) -> f64 {
    assert!(n >= 3, "the parity layout needs n >= 3");
    pair_count(n) as f64 * onsite_avg_p1(beta, gamma, omega) - c * plaquette_count(n) * plaquette_avg_p1(beta, gamma, omega)
}

/// `2 (K / n) onsite`; the averaged two-body part vanishes at one layer.
pub fn e_st_avg_p1(n: usize, beta: f64, gamma: f64, omega: f64) -> f64 {
    2.0 * pair_count(n) as f64 / n as f64 * onsite_avg_p1(beta, gamma, omega)
}

/// `n^{-1/2} - n^{-3/2}`.
pub fn perf_st_p1(n: usize) -> f64 {
    let nf = n as f64;
    nf.powf(-0.5) - nf.powf(-1.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct P1Averages {
    pub onsite: f64,
    pub plaquette: f64,
    pub e_pe: f64,
    pub e_st: f64,
}

pub fn p1_averages(n: usize, c: f64, beta: f64, gamma: f64, omega: f64) -> P1Averages {
    P1Averages {
        onsite: onsite_avg_p1(beta, gamma, omega),
        plaquette: plaquette_avg_p1(beta, gamma, omega),
        e_pe: e_pe_avg_p1(n, c, beta, gamma, omega),
        e_st: e_st_avg_p1(n, beta, gamma, omega),
    }
}

fn wrap3((b, g, o): (f64, f64, f64)) -> (f64, f64, f64) {
    (wrap_half_circle(b), wrap_half_circle(g), wrap_half_circle(o))
}

/// Images of `(beta, gamma, omega)` under the exact symmetries of the
/// closed forms, each shifted into the canonical box. The group is generated
/// by time reversal, `(beta + pi/2, -gamma, omega + pi/2)`,
/// `(beta, pi/2 - gamma, -omega)` and `(pi/2 - beta, gamma, -omega)`.
pub fn p1_symmetry_orbit(beta: f64, gamma: f64, omega: f64) -> Vec<(f64, f64, f64)> {
    let gens: [fn((f64, f64, f64)) -> (f64, f64, f64); 4] = [
        |(b, g, o)| (-b, -g, -o),
        |(b, g, o)| (b + FRAC_PI_2, -g, o + FRAC_PI_2),
        |(b, g, o)| (b, FRAC_PI_2 - g, -o),
        |(b, g, o)| (FRAC_PI_2 - b, g, -o),
    ];
    let same = |a: &(f64, f64, f64), b: &(f64, f64, f64)| {
        let d = |x: f64, y: f64| {
            let t = (x - y).rem_euclid(PI);
            t.min(PI - t)
        };
        d(a.0, b.0) < 1e-9 && d(a.1, b.1) < 1e-9 && d(a.2, b.2) < 1e-9
    };
    let mut orbit = vec![wrap3((beta, gamma, omega))];
    let mut k = 0;
    while k < orbit.len() {
        for g in gens {
            let img = wrap3(g(orbit[k]));
            if !orbit.iter().any(|o| same(o, &img)) {
                orbit.push(img);
            }
        }
        k += 1;
    }
    orbit
}

/// Orbit representative with the smallest `(|omega|, |gamma|, |beta|)`,
/// preferring `beta >= 0` among equals.
fn representative(orbit: &[(f64, f64, f64)]) -> (f64, f64, f64) {
    let key = |t: &(f64, f64, f64)| [t.2.abs(), t.1.abs(), t.0.abs(), if t.0 >= 0.0 { 0.0 } else { 1.0 }];
    let mut best = orbit[0];
    for cand in &orbit[1..] {
        let (a, b) = (key(cand), key(&best));
        for (x, y) in a.iter().zip(&b) {
            if (x - y).abs() > 1e-9 {
                if x < y {
                    best = *cand;
                }
                break;
            }
        }
    }
    best
}

/// Global minimizer of the averaged penalized energy over the canonical box.
/// A `64^3` grid seeds local refinements; the result is the symmetry-orbit
/// representative with the smallest `(|omega|, |gamma|, |beta|)`.
pub fn optimal_angles_p1(n: usize, c: f64) -> (f64, f64, f64) {
    let scale = pair_count(n) as f64;
    let f = |b: f64, g: f64, o: f64| e_pe_avg_p1(n, c, b, g, o) / scale;
    let axis: Vec<f64> = (0..GRID).map(|k| -FRAC_PI_2 + (k as f64 + 0.5) * PI / GRID as f64).collect();
    let mut grid: Vec<(f64, [f64; 3])> = Vec::with_capacity(GRID.pow(3));
    for &b in &axis {
        for &g in &axis {
            for &o in &axis {
                grid.push((f(b, g, o), [b, g, o]));
            }
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    let obj = FnObjective::new(3, |x: &[f64]| Ok(f(x[0], x[1], x[2])));
    let mut opts = LocalOptions::new(3, 1e-16);
    opts.method = Method::Lbfgs;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (_, x0) in grid.iter().take(REFINED_CANDIDATES) {
        let r = local_minimize(&obj, x0, &opts).expect("closed form never fails");
        if best.as_ref().map_or(true, |(v, _)| r.value < *v) {
            best = Some((r.value, r.x));
        }
    }
    let (mut value, mut x) = best.expect("grid is non-empty");
    // Snap coordinates that sit next to a multiple of pi/4 when that does not
    // raise the value, so symmetric optima come out exact.
    for k in 0..3 {
        let snapped = (x[k] / FRAC_PI_4).round() * FRAC_PI_4;
        if (snapped - x[k]).abs() < 1e-6 {
            let mut y = x.clone();
            y[k] = snapped;
            let v = f(y[0], y[1], y[2]);
            if v <= value + 1e-14 {
                x = y;
                value = v;
            }
        }
    }
    representative(&p1_symmetry_orbit(x[0], x[1], x[2]))
}

/// One row of the optimal-angle scan over constraint strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleScanRow {
    #[serde(rename = "C")]
    pub c: f64,
    pub beta: f64,
    pub gamma: f64,
    pub omega: f64,
}

pub fn angle_scan(n: usize, strengths: &[f64], exec: Exec) -> Vec<AngleScanRow> {
    exec.map(strengths, |&c| {
        let (beta, gamma, omega) = optimal_angles_p1(n, c);
        AngleScanRow { c, beta, gamma, omega }
    })
}
