//! Vanilla QAOA on the `n` logical qubits: `exp(-i gamma' H_P)` followed by
//! `exp(-i beta' sum X)` per layer.

use super::dense::{forward, value_and_gradient, LayerAngles};
use super::kernels::{self, Generator};
use crate::error::{invalid, Error, Result};
use crate::sk::{pairs, SkInstance};

/// Largest logical register simulated densely.
pub const VANILLA_CAP: usize = 24;

pub struct VanillaEvaluator {
    n: usize,
    hp: Vec<f64>,
}

impl VanillaEvaluator {
    pub fn new(inst: &SkInstance) -> Result<Self> {
        let n = inst.n();
        if n > VANILLA_CAP {
            return Err(Error::Resource {
                qubits: n,
                cap: VANILLA_CAP,
            });
        }
        let terms: Vec<(usize, f64)> = pairs(n)
            .zip(inst.couplings())
            .map(|((i, j), &c)| (1 << i | 1 << j, c))
            .collect();
        Ok(Self {
            n,
            hp: kernels::zstring_diagonal(n, &terms),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Diagonal of `H_P` over the logical basis.
    pub fn cost(&self) -> &[f64] {
        &self.hp
    }

    fn check(gammas: &[f64], betas: &[f64]) -> Result<()> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(invalid(format!(
                "vanilla schedule needs equal non-empty angle lists, got {}/{}",
                gammas.len(),
                betas.len()
            )));
        }
        Ok(())
    }

    /// `<H_P>` after the layers.
    pub fn energy(&self, gammas: &[f64], betas: &[f64]) -> Result<f64> {
        Self::check(gammas, betas)?;
        let layers: Vec<LayerAngles<'_>> = gammas
            .iter()
            .zip(betas)
            .map(|(g, &beta)| LayerAngles {
                thetas: std::slice::from_ref(g),
                beta,
            })
            .collect();
        let amps = forward(self.n, &[Generator::new(&self.hp)], &layers);
        Ok(kernels::expect_diagonal(&amps, &self.hp))
    }

    /// `<H_P>` and its gradient in `[gammas.., betas..]` order.
    pub fn energy_and_gradient(&self, gammas: &[f64], betas: &[f64]) -> Result<(f64, Vec<f64>)> {
        Self::check(gammas, betas)?;
        let layers: Vec<LayerAngles<'_>> = gammas
            .iter()
            .zip(betas)
            .map(|(g, &beta)| LayerAngles {
                thetas: std::slice::from_ref(g),
                beta,
            })
            .collect();
        let (v, dtheta, dbeta) = value_and_gradient(self.n, &[Generator::new(&self.hp)], &layers, &self.hp);
        let mut grad: Vec<f64> = dtheta.iter().map(|d| d[0]).collect();
        grad.extend(dbeta);
        Ok((v, grad))
    }

    pub fn perf(&self, gammas: &[f64], betas: &[f64]) -> Result<f64> {
        Ok(super::perf_from_energy(self.n, self.energy(gammas, betas)?))
    }
}

/// `-<H_P> / n^{3/2}` for vanilla QAOA.
pub fn vanilla_perf(inst: &SkInstance, gammas: &[f64], betas: &[f64]) -> Result<f64> {
    VanillaEvaluator::new(inst)?.perf(gammas, betas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sk::{sample, CouplingDist};
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_angles_give_zero() {
        let inst = sample(6, CouplingDist::Rademacher, 1).unwrap();
        assert_eq!(vanilla_perf(&inst, &[0.0], &[0.0]).unwrap(), 0.0);
        assert!(vanilla_perf(&inst, &[0.1, 0.2], &[0.0]).is_err());
    }

    #[test]
    fn gradient_matches_central_differences() {
        let inst = sample(6, CouplingDist::Gaussian, 4).unwrap();
        let ev = VanillaEvaluator::new(&inst).unwrap();
        let (g, b) = (vec![0.2, -0.5], vec![0.7, 0.1]);
        let (_, grad) = ev.energy_and_gradient(&g, &b).unwrap();
        let h = 1e-5;
        for k in 0..4 {
            let mut x: Vec<f64> = g.iter().chain(&b).copied().collect();
            x[k] += h;
            let plus = ev.energy(&x[..2], &x[2..]).unwrap();
            x[k] -= 2.0 * h;
            let minus = ev.energy(&x[..2], &x[2..]).unwrap();
            assert_abs_diff_eq!(grad[k], (plus - minus) / (2.0 * h), epsilon = 1e-6);
        }
    }

    #[test]
    fn refuses_large_registers() {
        let inst = SkInstance::uniform(25, 1.0).unwrap();
        assert!(matches!(VanillaEvaluator::new(&inst), Err(Error::Resource { .. })));
    }
}
