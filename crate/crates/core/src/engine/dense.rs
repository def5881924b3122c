//! Full-register evaluation with cached diagonals and adjoint gradients.
//!
//! Both parity and vanilla QAOA are layered circuits of the form
//! `prod_l exp(-i beta_l sum X) exp(-i sum_g theta_{l,g} D_g)` with fixed
//! diagonal generators `D_g`, so one forward/backward routine serves both.

use super::kernels::{self, Generator, C64};
use super::{check_instance, check_register};
use crate::error::Result;
use crate::layout::ParityLayout;
use crate::schedule::AngleSchedule;
use crate::sk::SkInstance;

/// Angles of one layer: one per generator, then the mixer angle.
pub(crate) struct LayerAngles<'a> {
    pub thetas: &'a [f64],
    pub beta: f64,
}

pub(crate) fn forward(m: usize, gens: &[Generator<'_>], layers: &[LayerAngles<'_>]) -> Vec<C64> {
    let mut amps = kernels::plus_state(m);
    for layer in layers {
        let pairs: Vec<(f64, &Generator<'_>)> = layer.thetas.iter().copied().zip(gens).collect();
        kernels::apply_phase(&mut amps, &pairs);
        kernels::apply_mixer_all(&mut amps, m, layer.beta);
    }
    amps
}

/// Forward states are kept for the backward sweep while they fit in this many
/// bytes; above it they are recomputed by running the layers in reverse.
const STORED_STATE_BYTES: usize = 1 << 30;

/// `<cost>` and its derivatives. Returns `(value, d/dtheta[l][g], d/dbeta[l])`.
pub(crate) fn value_and_gradient(
    m: usize,
    gens: &[Generator<'_>],
    layers: &[LayerAngles<'_>],
    cost: &[f64],
) -> (f64, Vec<Vec<f64>>, Vec<f64>) {
    value_and_gradient_within(m, gens, layers, cost, STORED_STATE_BYTES)
}

fn value_and_gradient_within(
    m: usize,
    gens: &[Generator<'_>],
    layers: &[LayerAngles<'_>],
    cost: &[f64],
    budget: usize,
) -> (f64, Vec<Vec<f64>>, Vec<f64>) {
    let p = layers.len();
    let store = (p << m) * std::mem::size_of::<C64>() <= budget;
    // States right after each layer's phase, before its mixer.
    let mut stored: Vec<Vec<C64>> = Vec::new();
    let mut psi = kernels::plus_state(m);
    for layer in layers {
        let pairs: Vec<(f64, &Generator<'_>)> = layer.thetas.iter().copied().zip(gens).collect();
        kernels::apply_phase(&mut psi, &pairs);
        if store {
            stored.push(psi.clone());
        }
        kernels::apply_mixer_all(&mut psi, m, layer.beta);
    }
    let value = kernels::expect_diagonal(&psi, cost);
    let mut lam: Vec<C64> = psi.iter().zip(cost).map(|(a, c)| a * c).collect();
    let mut dtheta = vec![vec![0.0; gens.len()]; p];
    let mut dbeta = vec![0.0; p];
    for l in (0..p).rev() {
        let layer = &layers[l];
        kernels::apply_mixer_all(&mut lam, m, -layer.beta);
        let pre = match stored.pop() {
            Some(state) => state,
            None => {
                kernels::apply_mixer_all(&mut psi, m, -layer.beta);
                std::mem::take(&mut psi)
            }
        };
        // The mixer commutes with sum X, so the pre-mixer pair gives d/dbeta.
        dbeta[l] = 2.0 * kernels::im_inner_mixer(&lam, &pre, m);
        for (g, gen) in gens.iter().enumerate() {
            dtheta[l][g] = 2.0 * kernels::im_inner_diagonal(&lam, &pre, gen.values);
        }
        if l > 0 {
            let pairs: Vec<(f64, &Generator<'_>)> = layer.thetas.iter().map(|t| -t).zip(gens).collect();
            kernels::apply_phase(&mut lam, &pairs);
            if !store {
                psi = pre;
                kernels::apply_phase(&mut psi, &pairs);
            }
        }
    }
    (value, dtheta, dbeta)
}

/// Reusable full-register evaluator for one instance.
pub struct ParityEvaluator {
    m: usize,
    hz: Vec<f64>,
    hc: Vec<f64>,
}

impl ParityEvaluator {
    pub fn new(layout: &ParityLayout, inst: &SkInstance) -> Result<Self> {
        check_instance(layout, inst)?;
        let m = layout.num_qubits();
        check_register(m)?;
        let weights: Vec<(usize, f64)> = inst.couplings().iter().copied().enumerate().collect();
        let hz = kernels::local_field_diagonal(m, &weights);
        let masks: Vec<(usize, f64)> = layout
            .plaquettes()
            .iter()
            .map(|p| (p.members.iter().fold(0, |acc, q| acc | 1 << q), 1.0))
            .collect();
        let hc = kernels::zstring_diagonal(m, &masks);
        Ok(Self { m, hz, hc })
    }

    pub fn num_qubits(&self) -> usize {
        self.m
    }

    /// Diagonal of `sum_q J_q Z_q - C sum_plaquettes prod Z`.
    pub fn pe_cost(&self, c: f64) -> Vec<f64> {
        self.hz.iter().zip(&self.hc).map(|(z, p)| z - c * p).collect()
    }

    fn generators(&self) -> [Generator<'_>; 2] {
        [Generator::new(&self.hc), Generator::new(&self.hz)]
    }

    fn layer_thetas(s: &AngleSchedule) -> Vec<[f64; 2]> {
        (0..s.p()).map(|l| [s.omegas()[l], s.gammas()[l]]).collect()
    }

    pub fn state(&self, s: &AngleSchedule) -> Vec<C64> {
        let thetas = Self::layer_thetas(s);
        let layers: Vec<LayerAngles<'_>> = thetas
            .iter()
            .zip(s.betas())
            .map(|(t, &beta)| LayerAngles { thetas: t, beta })
            .collect();
        forward(self.m, &self.generators(), &layers)
    }

    /// `<psi(s)| diag(cost) |psi(s)>`.
    pub fn expectation(&self, s: &AngleSchedule, cost: &[f64]) -> f64 {
        kernels::expect_diagonal(&self.state(s), cost)
    }

    /// Value and gradient in the flat `[gammas, betas, omegas]` order.
    pub fn value_and_gradient(&self, s: &AngleSchedule, cost: &[f64]) -> (f64, Vec<f64>) {
        let thetas = Self::layer_thetas(s);
        let layers: Vec<LayerAngles<'_>> = thetas
            .iter()
            .zip(s.betas())
            .map(|(t, &beta)| LayerAngles { thetas: t, beta })
            .collect();
        let (value, dtheta, dbeta) = value_and_gradient(self.m, &self.generators(), &layers, cost);
        let p = s.p();
        let mut grad = Vec::with_capacity(3 * p);
        grad.extend(dtheta.iter().map(|d| d[1]));
        grad.extend(dbeta);
        grad.extend(dtheta.iter().map(|d| d[0]));
        (value, grad)
    }
}

/// Diagonal of the line-decoding cost over the full register.
pub fn st_cost_diagonal(layout: &ParityLayout, inst: &SkInstance) -> Result<Vec<f64>> {
    check_instance(layout, inst)?;
    check_register(layout.num_qubits())?;
    let terms: Vec<(usize, f64)> = super::st_terms(layout, inst)
        .iter()
        .map(|t| (t.support.iter().fold(0, |acc, q| acc | 1 << q), t.coefficient))
        .collect();
    Ok(kernels::zstring_diagonal(layout.num_qubits(), &terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{energy_pe, energy_st};
    use crate::sk::{sample, CouplingDist};
    use approx::assert_abs_diff_eq;

    fn schedule() -> AngleSchedule {
        AngleSchedule::new(vec![0.3, -0.7], vec![0.9, 0.2], vec![-0.4, 0.6]).unwrap()
    }

    #[test]
    fn matches_term_evaluation() {
        let layout = ParityLayout::build(5).unwrap();
        let inst = sample(5, CouplingDist::Gaussian, 21).unwrap();
        let ev = ParityEvaluator::new(&layout, &inst).unwrap();
        let s = schedule();
        assert_abs_diff_eq!(
            ev.expectation(&s, &ev.pe_cost(2.5)),
            energy_pe(&layout, &inst, &s, 2.5).unwrap(),
            epsilon = 1e-10
        );
        let st = st_cost_diagonal(&layout, &inst).unwrap();
        assert_abs_diff_eq!(ev.expectation(&s, &st), energy_st(&layout, &inst, &s).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn st_diagonal_matches_bitstring_cost() {
        let layout = ParityLayout::build(5).unwrap();
        let inst = sample(5, CouplingDist::Rademacher, 2).unwrap();
        let d = st_cost_diagonal(&layout, &inst).unwrap();
        for x in (0..d.len()).step_by(37) {
            let pc = crate::layout::ParityConfig::from_mask(layout.num_qubits(), x as u64);
            assert_abs_diff_eq!(d[x], layout.st_cost_of_bitstring(&inst, &pc).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let layout = ParityLayout::build(5).unwrap();
        let inst = sample(5, CouplingDist::Rademacher, 8).unwrap();
        let ev = ParityEvaluator::new(&layout, &inst).unwrap();
        let cost = ev.pe_cost(3.0);
        let s = schedule();
        let (v, g) = ev.value_and_gradient(&s, &cost);
        assert_abs_diff_eq!(v, ev.expectation(&s, &cost), epsilon = 1e-12);
        let x = s.to_vec();
        let h = 1e-5;
        for k in 0..x.len() {
            let mut a = x.clone();
            let mut b = x.clone();
            a[k] += h;
            b[k] -= h;
            let fd = (ev.expectation(&AngleSchedule::from_vec(&a).unwrap(), &cost)
                - ev.expectation(&AngleSchedule::from_vec(&b).unwrap(), &cost))
                / (2.0 * h);
            assert_abs_diff_eq!(g[k], fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn recomputed_states_give_the_same_gradient() {
        let layout = ParityLayout::build(5).unwrap();
        let inst = sample(5, CouplingDist::Gaussian, 3).unwrap();
        let ev = ParityEvaluator::new(&layout, &inst).unwrap();
        let cost = ev.pe_cost(1.5);
        let s = AngleSchedule::new(vec![0.3, -0.7, 1.1], vec![0.9, 0.2, -0.5], vec![-0.4, 0.6, 0.1]).unwrap();
        let thetas = ParityEvaluator::layer_thetas(&s);
        let layers: Vec<LayerAngles<'_>> = thetas
            .iter()
            .zip(s.betas())
            .map(|(t, &beta)| LayerAngles { thetas: t, beta })
            .collect();
        let gens = ev.generators();
        let stored = value_and_gradient_within(ev.m, &gens, &layers, &cost, usize::MAX);
        let recomputed = value_and_gradient_within(ev.m, &gens, &layers, &cost, 0);
        assert_abs_diff_eq!(stored.0, recomputed.0, epsilon = 1e-12);
        for (a, b) in stored.2.iter().zip(&recomputed.2) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        for (a, b) in stored.1.iter().flatten().zip(recomputed.1.iter().flatten()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }
}
