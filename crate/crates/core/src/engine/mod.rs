//! Exact expectation values for parity QAOA and vanilla QAOA.
//!
//! A parity layer applies the plaquette phases `exp(-i Omega Z_a Z_b Z_c [Z_d])`,
//! then the local phases `exp(-i gamma J_q Z_q)`, then `exp(-i beta X_q)` on
//! every qubit, starting from `|+>`. Two backends evaluate Hamiltonian terms:
//! the full register, or each term over its own reverse causal cone.

mod dense;
pub(crate) mod kernels;
mod vanilla;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::exec::{ordered_sum, Exec};
use crate::layout::{ParityConfig, ParityLayout, QubitId};
use crate::rcc::{self, LayerGates, Rcc};
use crate::schedule::AngleSchedule;
use crate::sk::SkInstance;

pub use dense::{st_cost_diagonal, ParityEvaluator};
pub use kernels::C64;
pub use vanilla::{vanilla_perf, VanillaEvaluator};

/// Largest register the dense backend will allocate.
pub const DENSE_CAP: usize = 28;

/// Largest number of couplings averaged over exactly inside one cone.
pub const MAX_AVERAGED_COUPLINGS: usize = 22;

fn check_register(m: usize) -> Result<()> {
    if m > DENSE_CAP {
        return Err(Error::Resource {
            qubits: m,
            cap: DENSE_CAP,
        });
    }
    Ok(())
}

/// Dense state over an explicit, ascending list of parity qubits. Local bit
/// `k` of a basis index refers to `qubits[k]`; a set bit is Z = -1.
#[derive(Debug, Clone)]
pub struct StateVector {
    qubits: Vec<QubitId>,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|+>` on the given qubits.
    pub fn plus(qubits: &[QubitId]) -> Result<Self> {
        let qubits = sorted_register(qubits)?;
        check_register(qubits.len())?;
        let amps = kernels::plus_state(qubits.len());
        Ok(Self { qubits, amps })
    }

    /// Computational basis state of a full parity string.
    pub fn basis(pc: &ParityConfig) -> Result<Self> {
        check_register(pc.len())?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << pc.len()];
        amps[pc.to_mask() as usize] = C64::new(1.0, 0.0);
        Ok(Self {
            qubits: (0..pc.len()).collect(),
            amps,
        })
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.qubits
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        kernels::norm_sqr(&self.amps).sqrt()
    }

    /// Local bit mask of a set of qubits.
    pub fn local_mask(&self, support: &[QubitId]) -> Result<usize> {
        support.iter().try_fold(0usize, |mask, q| {
            let k = self
                .qubits
                .binary_search(q)
                .map_err(|_| invalid(format!("qubit {q} is not in the register")))?;
            Ok(mask ^ 1 << k)
        })
    }
}

fn sorted_register(qubits: &[QubitId]) -> Result<Vec<QubitId>> {
    let mut q = qubits.to_vec();
    q.sort_unstable();
    q.dedup();
    if q.len() != qubits.len() {
        return Err(invalid("register lists a qubit twice"));
    }
    Ok(q)
}

/// `coefficient * prod_{q in support} Z_q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZObservable {
    pub support: Vec<QubitId>,
    pub coefficient: f64,
}

impl ZObservable {
    pub fn new(support: Vec<QubitId>, coefficient: f64) -> Self {
        Self { support, coefficient }
    }
}

/// `<psi| obs |psi>`, including the coefficient.
pub fn expect(state: &StateVector, obs: &ZObservable) -> Result<f64> {
    let mask = state.local_mask(&obs.support)?;
    let v: f64 = state
        .amps
        .iter()
        .enumerate()
        .map(|(x, a)| a.norm_sqr() * kernels::z_sign(x, mask))
        .sum();
    Ok(obs.coefficient * v)
}

/// Gates of each layer expressed on a local register.
struct LocalLayer {
    plaquette_masks: Vec<usize>,
    zphase: Vec<(usize, f64)>,
    xrot: Vec<usize>,
}

fn same_diagonal(a: &LocalLayer, b: &LocalLayer) -> bool {
    a.plaquette_masks == b.plaquette_masks && a.zphase == b.zphase
}

fn run_layers(m: usize, layers: &[LocalLayer], s: &AngleSchedule) -> Vec<C64> {
    let mut amps = kernels::plus_state(m);
    let mut cached: Option<(usize, Vec<f64>, Vec<f64>)> = None;
    for (l, layer) in layers.iter().enumerate() {
        let (gamma, beta, omega) = s.layer(l);
        let fresh = match &cached {
            Some((prev, _, _)) => !same_diagonal(&layers[*prev], layer),
            None => true,
        };
        if fresh {
            let terms: Vec<(usize, f64)> = layer.plaquette_masks.iter().map(|&m| (m, 1.0)).collect();
            let hc = kernels::zstring_diagonal(m, &terms);
            let hz = kernels::local_field_diagonal(m, &layer.zphase);
            cached = Some((l, hc, hz));
        }
        let (_, hc, hz) = cached.as_ref().unwrap();
        let gc = kernels::Generator::new(hc);
        let gz = kernels::Generator::new(hz);
        kernels::apply_phase(&mut amps, &[(omega, &gc), (gamma, &gz)]);
        kernels::apply_mixer(&mut amps, m, &layer.xrot, beta);
    }
    amps
}

fn local_layer(layout: &ParityLayout, inst: &SkInstance, reg: &[QubitId], gates: &LayerGates) -> LocalLayer {
    let idx = |q: &QubitId| reg.binary_search(q).expect("gate qubit is in the register");
    LocalLayer {
        plaquette_masks: gates
            .plaquettes
            .iter()
            .map(|&p| layout.plaquettes()[p].members.iter().fold(0, |m, q| m | 1 << idx(q)))
            .collect(),
        zphase: gates
            .zphase
            .iter()
            .map(|q| (idx(q), inst.couplings()[*q]))
            .collect(),
        xrot: gates.xrot.iter().map(idx).collect(),
    }
}

fn check_instance(layout: &ParityLayout, inst: &SkInstance) -> Result<()> {
    if layout.n() != inst.n() {
        return Err(invalid(format!(
            "instance has n = {} but the layout has n = {}",
            inst.n(),
            layout.n()
        )));
    }
    Ok(())
}

/// Evolves `|+>` through the schedule.
///
/// Without arguments the whole register is simulated. With `qubit_subset`
/// only that register is simulated and only gates supported inside it act.
/// With `gate_filter` the register is the cone's qubit set and only the
/// cone's gates act; a given subset must then equal that qubit set.
pub fn evolve(
    layout: &ParityLayout,
    inst: &SkInstance,
    s: &AngleSchedule,
    qubit_subset: Option<&[QubitId]>,
    gate_filter: Option<&Rcc>,
) -> Result<StateVector> {
    check_instance(layout, inst)?;
    let k = layout.num_qubits();
    let (reg, gates): (Vec<QubitId>, Vec<LayerGates>) = match (qubit_subset, gate_filter) {
        (subset, Some(cone)) => {
            if let Some(sub) = subset {
                if sorted_register(sub)? != cone.qubit_set() {
                    return Err(invalid("qubit subset differs from the cone's qubit set"));
                }
            }
            if cone.depth() != s.p() {
                return Err(invalid(format!(
                    "cone has depth {} but the schedule has {} layers",
                    cone.depth(),
                    s.p()
                )));
            }
            (cone.qubit_set().to_vec(), cone.layers().to_vec())
        }
        (subset, None) => {
            let reg = match subset {
                Some(sub) => sorted_register(sub)?,
                None => (0..k).collect(),
            };
            if let Some(&q) = reg.iter().find(|&&q| q >= k) {
                return Err(invalid(format!("qubit {q} outside a layout of {k} qubits")));
            }
            let inside = |p: &usize| {
                layout.plaquettes()[*p]
                    .members
                    .iter()
                    .all(|q| reg.binary_search(q).is_ok())
            };
            let layer = LayerGates {
                plaquettes: (0..layout.num_plaquettes()).filter(inside).collect(),
                zphase: reg.clone(),
                xrot: reg.clone(),
            };
            (reg, vec![layer; s.p()])
        }
    };
    check_register(reg.len())?;
    let local: Vec<LocalLayer> = gates.iter().map(|g| local_layer(layout, inst, &reg, g)).collect();
    let amps = run_layers(reg.len(), &local, s);
    Ok(StateVector { qubits: reg, amps })
}

/// How Hamiltonian terms are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// One dense simulation of the whole register.
    Full,
    /// Each term over its own reverse causal cone.
    Rcc,
    /// Full when the register fits under the cap, otherwise per-cone.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EngineOptions {
    pub backend: Backend,
    pub exec: Exec,
}

impl EngineOptions {
    pub fn with_backend(backend: Backend) -> Self {
        Self {
            backend,
            ..Self::default()
        }
    }
}

/// Local terms `J_q Z_q`, in qubit order.
pub fn onsite_terms(layout: &ParityLayout, inst: &SkInstance) -> Vec<ZObservable> {
    (0..layout.num_qubits())
        .map(|q| ZObservable::new(vec![q], inst.couplings()[q]))
        .collect()
}

/// Terms of `sum_q J_q Z_q - C sum_plaquettes prod Z`.
pub fn pe_terms(layout: &ParityLayout, inst: &SkInstance, c: f64) -> Vec<ZObservable> {
    let mut terms = onsite_terms(layout, inst);
    terms.extend(
        layout
            .plaquettes()
            .iter()
            .map(|p| ZObservable::new(p.members.clone(), -c)),
    );
    terms
}

/// Terms of the line-decoding cost split into one- and two-body parts:
/// `(2/n) J_ij Z_ij` for every qubit, then `(1/n) J_ij Z_it Z_tj` for every
/// line `t` and pair `i < j` not containing `t`.
pub fn st_terms(layout: &ParityLayout, inst: &SkInstance) -> Vec<ZObservable> {
    let n = layout.n();
    let nf = n as f64;
    let mut terms: Vec<ZObservable> = (0..layout.num_qubits())
        .map(|q| ZObservable::new(vec![q], 2.0 * inst.couplings()[q] / nf))
        .collect();
    for t in 0..n {
        for i in (0..n).filter(|&i| i != t) {
            for j in (i + 1..n).filter(|&j| j != t) {
                terms.push(ZObservable::new(
                    vec![layout.qubit(i, t), layout.qubit(t, j)],
                    inst.coupling(i, j) / nf,
                ));
            }
        }
    }
    terms
}

fn use_full(layout: &ParityLayout, backend: Backend) -> Result<bool> {
    match backend {
        Backend::Full => {
            check_register(layout.num_qubits())?;
            Ok(true)
        }
        Backend::Rcc => Ok(false),
        Backend::Auto => Ok(layout.num_qubits() <= DENSE_CAP),
    }
}

/// Value of every term (coefficient included) on the evolved state.
pub fn term_values(
    layout: &ParityLayout,
    inst: &SkInstance,
    s: &AngleSchedule,
    terms: &[ZObservable],
    opts: &EngineOptions,
) -> Result<Vec<f64>> {
    check_instance(layout, inst)?;
    if use_full(layout, opts.backend)? {
        let state = evolve(layout, inst, s, None, None)?;
        // Every Z-string expectation at once from the transformed probabilities.
        let mut w: Vec<f64> = state.amps.iter().map(|a| a.norm_sqr()).collect();
        kernels::walsh_hadamard(&mut w);
        terms
            .iter()
            .map(|t| Ok(t.coefficient * w[state.local_mask(&t.support)?]))
            .collect()
    } else {
        opts.exec.try_map(terms, |t| {
            let cone = rcc::extract(layout, &t.support, s.p())?;
            let state = evolve(layout, inst, s, None, Some(&cone))?;
            expect(&state, t)
        })
    }
}

/// `<sum_q J_q Z_q - C sum_plaquettes prod Z>`.
pub fn energy_pe(layout: &ParityLayout, inst: &SkInstance, s: &AngleSchedule, c: f64) -> Result<f64> {
    energy_pe_with(layout, inst, s, c, &EngineOptions::default())
}

pub fn energy_pe_with(
    layout: &ParityLayout,
    inst: &SkInstance,
    s: &AngleSchedule,
    c: f64,
    opts: &EngineOptions,
) -> Result<f64> {
    if !(c >= 0.0) {
        return Err(invalid(format!("constraint strength must be >= 0, got {c}")));
    }
    Ok(ordered_sum(&term_values(layout, inst, s, &pe_terms(layout, inst, c), opts)?))
}

/// Expected mean logical energy of decoding along all qubit lines.
pub fn energy_st(layout: &ParityLayout, inst: &SkInstance, s: &AngleSchedule) -> Result<f64> {
    energy_st_with(layout, inst, s, &EngineOptions::default())
}

pub fn energy_st_with(layout: &ParityLayout, inst: &SkInstance, s: &AngleSchedule, opts: &EngineOptions) -> Result<f64> {
    Ok(ordered_sum(&term_values(layout, inst, s, &st_terms(layout, inst), opts)?))
}

/// `-energy_st / n^{3/2}`.
pub fn perf_st(layout: &ParityLayout, inst: &SkInstance, s: &AngleSchedule) -> Result<f64> {
    Ok(perf_from_energy(layout.n(), energy_st(layout, inst, s)?))
}

pub fn perf_st_with(layout: &ParityLayout, inst: &SkInstance, s: &AngleSchedule, opts: &EngineOptions) -> Result<f64> {
    Ok(perf_from_energy(layout.n(), energy_st_with(layout, inst, s, opts)?))
}

/// `-e / n^{3/2}`.
pub fn perf_from_energy(n: usize, e: f64) -> f64 {
    -e / (n as f64).powf(1.5)
}

/// Expected number of violated plaquettes.
pub fn broken_constraints_expectation(
    layout: &ParityLayout,
    inst: &SkInstance,
    s: &AngleSchedule,
    opts: &EngineOptions,
) -> Result<f64> {
    let terms: Vec<ZObservable> = layout
        .plaquettes()
        .iter()
        .map(|p| ZObservable::new(p.members.clone(), 1.0))
        .collect();
    let vals = term_values(layout, inst, s, &terms, opts)?;
    Ok(vals.iter().map(|v| (1.0 - v) / 2.0).sum())
}

/// Exact Rademacher average `E_J[J_c <Z_S>]` (or `E_J[<Z_S>]` without a
/// weight qubit), enumerating only the couplings inside the cone of `S`.
pub fn cone_average(layout: &ParityLayout, support: &[QubitId], weight: Option<QubitId>, s: &AngleSchedule) -> Result<f64> {
    let cone = rcc::extract(layout, support, s.p())?;
    if let Some(c) = weight {
        if !cone.depends_on(c) {
            return Ok(0.0);
        }
    }
    let free = cone.j_support();
    if free.len() > MAX_AVERAGED_COUPLINGS {
        return Err(Error::TooLarge {
            what: "couplings in the cone",
            actual: free.len(),
            limit: MAX_AVERAGED_COUPLINGS,
        });
    }
    let obs = ZObservable::new(support.to_vec(), 1.0);
    let mut couplings = vec![1.0; layout.num_qubits()];
    let mut total = 0.0;
    for assignment in 0u64..1 << free.len() {
        for (b, &q) in free.iter().enumerate() {
            couplings[q] = if assignment >> b & 1 == 1 { -1.0 } else { 1.0 };
        }
        let inst = SkInstance::from_couplings(layout.n(), couplings.clone(), 0)?;
        let state = evolve(layout, &inst, s, None, Some(&cone))?;
        let factor = weight.map_or(1.0, |c| couplings[c]);
        total += factor * expect(&state, &obs)?;
    }
    Ok(total / (1u64 << free.len()) as f64)
}

/// Rademacher average of the constraint-penalized energy, term by term.
pub fn averaged_energy_pe(layout: &ParityLayout, s: &AngleSchedule, c: f64, exec: Exec) -> Result<f64> {
    let onsite = exec.try_map_range(layout.num_qubits(), |q| cone_average(layout, &[q], Some(q), s))?;
    let plaq = exec.try_map(layout.plaquettes(), |p| cone_average(layout, &p.members, None, s))?;
    Ok(ordered_sum(&onsite) - c * ordered_sum(&plaq))
}

/// Rademacher average of the line-decoding cost, term by term.
pub fn averaged_energy_st(layout: &ParityLayout, s: &AngleSchedule, exec: Exec) -> Result<f64> {
    let inst = SkInstance::uniform(layout.n(), 1.0)?;
    let terms = st_terms(layout, &inst);
    let vals = exec.try_map(&terms, |t| {
        // Uniform couplings make every coefficient the bare weight; the
        // weighting coupling is the pair the term's support closes to.
        let weight = match t.support[..] {
            [q] => q,
            [a, b] => {
                let (i, t1) = layout.pair(a);
                let (t2, j) = layout.pair(b);
                let (x, y) = closing_pair(i, t1, t2, j);
                layout.qubit(x, y)
            }
            _ => unreachable!("decoding terms are one- or two-body"),
        };
        Ok::<_, Error>(t.coefficient * cone_average(layout, &t.support, Some(weight), s)?)
    })?;
    Ok(ordered_sum(&vals))
}

/// Given qubits `(a, b)` and `(c, d)` sharing exactly one index, the pair of
/// the two other indices.
fn closing_pair(a: usize, b: usize, c: usize, d: usize) -> (usize, usize) {
    let shared = if a == c || a == d { a } else { b };
    let x = if a == shared { b } else { a };
    let y = if c == shared { d } else { c };
    (x.min(y), x.max(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::time_reverse;
    use crate::sk::{sample, CouplingDist};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn random_schedule(p: usize, seed: u64) -> AngleSchedule {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut v = || (0..p).map(|_| rng.gen_range(-1.5..1.5)).collect::<Vec<f64>>();
        AngleSchedule::new(v(), v(), v()).unwrap()
    }

    #[test]
    fn zero_schedule_is_plus() {
        let layout = ParityLayout::build(4).unwrap();
        let inst = sample(4, CouplingDist::Rademacher, 1).unwrap();
        let st = evolve(&layout, &inst, &AngleSchedule::zeros(2), None, None).unwrap();
        let amp = 1.0 / 8.0;
        assert!(st.amplitudes().iter().all(|a| (a.re - amp).abs() < 1e-15 && a.im == 0.0));
        assert_eq!(energy_pe(&layout, &inst, &AngleSchedule::zeros(2), 3.0).unwrap(), 0.0);
        assert_eq!(perf_st(&layout, &inst, &AngleSchedule::zeros(1)).unwrap(), 0.0);
    }

    #[test]
    fn product_state_single_qubit_law() {
        let layout = ParityLayout::build(5).unwrap();
        let inst = sample(5, CouplingDist::Gaussian, 9).unwrap();
        let (g, b) = (0.37, -0.81);
        let s = AngleSchedule::single(g, b, 0.0);
        let st = evolve(&layout, &inst, &s, None, None).unwrap();
        for q in 0..layout.num_qubits() {
            let v = expect(&st, &ZObservable::new(vec![q], 1.0)).unwrap();
            let j = inst.couplings()[q];
            assert_abs_diff_eq!(v, (2.0 * b).sin() * (2.0 * g * j).sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn trivial_angles_onsite_part() {
        let layout = ParityLayout::build(4).unwrap();
        let s = AngleSchedule::trivial();
        for inst in crate::sk::enumerate_all(4).unwrap().step_by(7) {
            let vals = term_values(&layout, &inst, &s, &onsite_terms(&layout, &inst), &EngineOptions::default()).unwrap();
            assert_abs_diff_eq!(ordered_sum(&vals), -6.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn basis_state_expectations() {
        let layout = ParityLayout::build(4).unwrap();
        let cfg = crate::sk::LogicalConfig::new(vec![1, -1, -1, 1]).unwrap();
        let pc = layout.encode(&cfg).unwrap();
        let st = StateVector::basis(&pc).unwrap();
        for q in 0..layout.num_qubits() {
            let (i, j) = layout.pair(q);
            let v = expect(&st, &ZObservable::new(vec![q], 1.0)).unwrap();
            assert_eq!(v, f64::from(cfg.get(i) * cfg.get(j)));
        }
    }

    #[test]
    fn expect_matches_naive_loop() {
        let layout = ParityLayout::build(4).unwrap();
        let inst = sample(4, CouplingDist::Rademacher, 3).unwrap();
        let st = evolve(&layout, &inst, &random_schedule(2, 5), None, None).unwrap();
        let obs = ZObservable::new(vec![0, 3, 5], 0.5);
        let mut naive = 0.0;
        for (x, a) in st.amplitudes().iter().enumerate() {
            let mut sign = 1.0;
            for &q in &obs.support {
                if x >> q & 1 == 1 {
                    sign = -sign;
                }
            }
            naive += sign * (a.re * a.re + a.im * a.im);
        }
        assert_abs_diff_eq!(expect(&st, &obs).unwrap(), 0.5 * naive, epsilon = 1e-12);
        assert!(expect(&st, &ZObservable::new(vec![99], 1.0)).is_err());
    }

    #[test]
    fn norm_is_preserved() {
        let layout = ParityLayout::build(5).unwrap();
        let inst = sample(5, CouplingDist::Rademacher, 11).unwrap();
        let st = evolve(&layout, &inst, &random_schedule(3, 2), None, None).unwrap();
        assert_abs_diff_eq!(st.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn backends_agree() {
        let layout = ParityLayout::build(6).unwrap();
        let inst = sample(6, CouplingDist::Rademacher, 4).unwrap();
        let s = random_schedule(2, 8);
        let full = energy_pe_with(&layout, &inst, &s, 3.0, &EngineOptions::with_backend(Backend::Full)).unwrap();
        let cone = energy_pe_with(&layout, &inst, &s, 3.0, &EngineOptions::with_backend(Backend::Rcc)).unwrap();
        assert_abs_diff_eq!(full, cone, epsilon = 1e-10);
    }

    #[test]
    fn filter_consistency_is_checked() {
        let layout = ParityLayout::build(5).unwrap();
        let inst = sample(5, CouplingDist::Rademacher, 4).unwrap();
        let cone = rcc::extract(&layout, &[2], 1).unwrap();
        let s = AngleSchedule::trivial();
        assert!(evolve(&layout, &inst, &s, Some(&[0, 1]), Some(&cone)).is_err());
        assert!(evolve(&layout, &inst, &s.padded(2), None, Some(&cone)).is_err());
        assert!(evolve(&layout, &inst, &s, Some(cone.qubit_set()), Some(&cone)).is_ok());
    }

    #[test]
    fn time_reversal() {
        let layout = ParityLayout::build(5).unwrap();
        let inst = sample(5, CouplingDist::Gaussian, 6).unwrap();
        let s = random_schedule(2, 3);
        let a = energy_pe(&layout, &inst, &s, 1.5).unwrap();
        let b = energy_pe(&layout, &inst, &time_reverse(&s), 1.5).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-10);
    }

    #[test]
    fn cone_average_of_trivial_onsite() {
        let layout = ParityLayout::build(6).unwrap();
        let v = cone_average(&layout, &[layout.qubit(1, 3)], Some(layout.qubit(1, 3)), &AngleSchedule::trivial()).unwrap();
        assert_abs_diff_eq!(v, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn closing_pairs() {
        assert_eq!(closing_pair(1, 4, 4, 7), (1, 7));
        assert_eq!(closing_pair(2, 5, 0, 2), (0, 5));
        assert_eq!(closing_pair(3, 6, 1, 6), (1, 3));
    }

    #[test]
    fn oversized_register_is_refused() {
        let layout = ParityLayout::build(9).unwrap();
        let inst = sample(9, CouplingDist::Rademacher, 1).unwrap();
        let err = energy_st_with(&layout, &inst, &AngleSchedule::trivial(), &EngineOptions::with_backend(Backend::Full));
        assert!(matches!(err, Err(Error::Resource { qubits: 36, .. })));
    }
}
