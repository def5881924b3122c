//! Layered angle schedules `(gamma, beta, omega)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Total evolution time per depth for the Trotter ramp, `p = 1..=9`.
pub const DEFAULT_T_MAX: [f64; 9] = [0.8, 1.4, 2.0, 2.6, 3.2, 3.8, 4.4, 5.0, 5.6];

/// Default `t_max` for depth `p`; beyond the table the ramp keeps its slope of
/// 0.6 per layer.
pub fn default_t_max(p: usize) -> f64 {
    assert!(p >= 1);
    DEFAULT_T_MAX
        .get(p - 1)
        .copied()
        .unwrap_or_else(|| DEFAULT_T_MAX[8] + 0.6 * (p - 9) as f64)
}

/// Angles for `p` layers. Layer `l` applies the constraint gates with
/// `omegas[l]`, then the local Z phases with `gammas[l]`, then the X mixer with
/// `betas[l]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSchedule {
    #[serde(rename = "gamma")]
    gammas: Vec<f64>,
    #[serde(rename = "beta")]
    betas: Vec<f64>,
    #[serde(rename = "omega")]
    omegas: Vec<f64>,
}

impl AngleSchedule {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>, omegas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() || gammas.len() != omegas.len() {
            return Err(invalid(format!(
                "schedule needs three equal non-empty angle lists, got {}/{}/{}",
                gammas.len(),
                betas.len(),
                omegas.len()
            )));
        }
        if gammas.iter().chain(&betas).chain(&omegas).any(|a| !a.is_finite()) {
            return Err(invalid("angles must be finite"));
        }
        Ok(Self {
            gammas,
            betas,
            omegas,
        })
    }

    pub fn zeros(p: usize) -> Self {
        Self {
            gammas: vec![0.0; p],
            betas: vec![0.0; p],
            omegas: vec![0.0; p],
        }
    }

    /// Single layer `(gamma, beta, omega)`.
    pub fn single(gamma: f64, beta: f64, omega: f64) -> Self {
        Self {
            gammas: vec![gamma],
            betas: vec![beta],
            omegas: vec![omega],
        }
    }

    /// The local-rotation schedule `gamma = -pi/4, beta = pi/4, omega = 0`.
    pub fn trivial() -> Self {
        Self::single(-PI / 4.0, PI / 4.0, 0.0)
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Layer `l` as `(gamma, beta, omega)`.
    pub fn layer(&self, l: usize) -> (f64, f64, f64) {
        (self.gammas[l], self.betas[l], self.omegas[l])
    }

    /// Flat parameter vector `[gammas.., betas.., omegas..]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(3 * self.p());
        v.extend_from_slice(&self.gammas);
        v.extend_from_slice(&self.betas);
        v.extend_from_slice(&self.omegas);
        v
    }

    pub fn from_vec(x: &[f64]) -> Result<Self> {
        if x.is_empty() || x.len() % 3 != 0 {
            return Err(invalid(format!("parameter vector of length {} is not 3p", x.len())));
        }
        let p = x.len() / 3;
        Self::new(x[..p].to_vec(), x[p..2 * p].to_vec(), x[2 * p..].to_vec())
    }

    /// Extends to `p` layers with zero angles; the extra layers act as identity.
    pub fn padded(&self, p: usize) -> Self {
        let pad = |v: &[f64]| {
            let mut v = v.to_vec();
            v.resize(p.max(v.len()), 0.0);
            v
        };
        Self {
            gammas: pad(&self.gammas),
            betas: pad(&self.betas),
            omegas: pad(&self.omegas),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.to_vec().iter().all(|&a| a > -FRAC_PI_2 && a <= FRAC_PI_2)
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            gammas: self.gammas.iter().map(|&a| f(a)).collect(),
            betas: self.betas.iter().map(|&a| f(a)).collect(),
            omegas: self.omegas.iter().map(|&a| f(a)).collect(),
        }
    }
}

/// Shifts `x` by a multiple of pi into `(-pi/2, pi/2]`.
pub fn wrap_half_circle(x: f64) -> f64 {
    let k = ((x - FRAC_PI_2) / PI).ceil();
    let y = x - k * PI;
    // Round-off can leave y a hair outside the interval.
    if y <= -FRAC_PI_2 {
        y + PI
    } else if y > FRAC_PI_2 {
        y - PI
    } else {
        y
    }
}

/// Every angle shifted into `(-pi/2, pi/2]`. Exact for beta and omega; for
/// gamma it relies on integer couplings.
pub fn canonicalize(s: &AngleSchedule) -> AngleSchedule {
    s.map(wrap_half_circle)
}

/// Negates every angle.
pub fn time_reverse(s: &AngleSchedule) -> AngleSchedule {
    s.map(|a| -a)
}

/// Linear annealing ramp with `p` layers and total time `t_max`.
pub fn trotter(p: usize, t_max: f64) -> Result<AngleSchedule> {
    if p == 0 {
        return Err(invalid("trotter schedule needs p >= 1"));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(invalid(format!("t_max must be positive, got {t_max}")));
    }
    let dt = t_max / p as f64;
    let frac = |i: usize| (i as f64 + 0.5) / p as f64;
    AngleSchedule::new(
        (0..p).map(|i| frac(i) * dt).collect(),
        (0..p).map(|i| -(1.0 - frac(i)) * dt).collect(),
        (0..p).map(|i| -frac(i) * dt).collect(),
    )
}
