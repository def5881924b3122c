//! Reverse causal cones of Z-string observables.
//!
//! A cone is found by a backward pass over the layers. The active set starts
//! as the observable's support. In each reverse layer every active qubit keeps
//! its X rotation and its Z phase, every plaquette touching the active set is
//! kept, and the active set grows by the kept plaquettes' members. Only kept
//! gates can influence the expectation value.
//!
//! The counting routines decide whether an instance-averaged two-body term
//! `E_J[J_ij <Z_it Z_tj>]` can be nonzero, either from the coupling support of
//! the cone alone or, more strictly, by also asking whether the qubit set
//! `{it, tj, ij}` is a product of in-cone plaquettes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::Exec;
use crate::gf2::{Basis, BitVec};
use crate::layout::{ParityLayout, QubitId};
use crate::sk::pair_count;

/// Largest `n` accepted by [`count_nonvanishing_pairs`].
pub const MAX_PAIR_COUNT_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    XRot(QubitId),
    ZPhase(QubitId),
    /// Plaquette id.
    Plaquette(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Gate {
    /// Zero-based layer index.
    pub layer: usize,
    pub kind: GateKind,
}

/// Gates of one layer that survive in a cone, each list ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LayerGates {
    pub plaquettes: Vec<usize>,
    pub zphase: Vec<QubitId>,
    pub xrot: Vec<QubitId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rcc {
    observable_support: Vec<QubitId>,
    layers: Vec<LayerGates>,
    qubit_set: Vec<QubitId>,
    j_support: Vec<QubitId>,
}

impl Rcc {
    pub fn observable_support(&self) -> &[QubitId] {
        &self.observable_support
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Kept gates of layer `l` (forward order, zero-based).
    pub fn layer(&self, l: usize) -> &LayerGates {
        &self.layers[l]
    }

    pub fn layers(&self) -> &[LayerGates] {
        &self.layers
    }

    /// Kept gates in forward application order: per layer the plaquette
    /// gates, then the Z phases, then the X rotations.
    pub fn gates(&self) -> Vec<Gate> {
        let mut out = Vec::new();
        for (layer, g) in self.layers.iter().enumerate() {
            let kinds = g
                .plaquettes
                .iter()
                .map(|&p| GateKind::Plaquette(p))
                .chain(g.zphase.iter().map(|&q| GateKind::ZPhase(q)))
                .chain(g.xrot.iter().map(|&q| GateKind::XRot(q)));
            out.extend(kinds.map(|kind| Gate { layer, kind }));
        }
        out
    }

    /// All qubits touched by the cone, ascending.
    pub fn qubit_set(&self) -> &[QubitId] {
        &self.qubit_set
    }

    /// Qubits whose coupling enters a kept Z phase, ascending.
    pub fn j_support(&self) -> &[QubitId] {
        &self.j_support
    }

    pub fn depends_on(&self, q: QubitId) -> bool {
        self.j_support.binary_search(&q).is_ok()
    }

    /// Plaquettes kept in any layer, ascending.
    pub fn retained_plaquettes(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.layers.iter().flat_map(|l| l.plaquettes.iter().copied()).collect();
        set.into_iter().collect()
    }
}

/// Backward light-cone pass for the Z-string on `support` at depth `p`.
pub fn extract(layout: &ParityLayout, support: &[QubitId], p: usize) -> Result<Rcc> {
    if support.is_empty() {
        return Err(invalid("observable support must be non-empty"));
    }
    if let Some(&q) = support.iter().find(|&&q| q >= layout.num_qubits()) {
        return Err(invalid(format!("qubit {q} outside a layout of {} qubits", layout.num_qubits())));
    }
    let observable: BTreeSet<QubitId> = support.iter().copied().collect();
    let mut active = observable.clone();
    let mut j_support = BTreeSet::new();
    let mut layers = vec![LayerGates::default(); p];
    for l in (0..p).rev() {
        let touched: BTreeSet<usize> = active
            .iter()
            .flat_map(|&q| layout.incident_plaquettes(q).iter().copied())
            .collect();
        let current: Vec<QubitId> = active.iter().copied().collect();
        j_support.extend(current.iter().copied());
        for &pid in &touched {
            active.extend(layout.plaquettes()[pid].members.iter().copied());
        }
        layers[l] = LayerGates {
            plaquettes: touched.into_iter().collect(),
            zphase: current.clone(),
            xrot: current,
        };
    }
    Ok(Rcc {
        observable_support: observable.into_iter().collect(),
        layers,
        qubit_set: active.into_iter().collect(),
        j_support: j_support.into_iter().collect(),
    })
}

/// Which criterion decides that an averaged two-body term vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// Vanishes when the coupling is outside the cone's coupling support.
    SupportOnly,
    /// Additionally vanishes when observable plus coupling qubit is not a
    /// product of in-cone plaquettes.
    #[default]
    Completable,
}

impl CountMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CountMode::SupportOnly => "support_only",
            CountMode::Completable => "completable",
        }
    }
}

impl fmt::Display for CountMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CountMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "support_only" | "support" => Ok(CountMode::SupportOnly),
            "completable" => Ok(CountMode::Completable),
            other => Err(invalid(format!("unknown counting mode '{other}'"))),
        }
    }
}

/// Whether the Z-string on `targets` is a product of the given plaquettes.
fn is_completable(layout: &ParityLayout, plaquettes: &[usize], targets: &[QubitId]) -> bool {
    // Work in a local coordinate system over the qubits involved.
    let mut local: Vec<QubitId> = plaquettes
        .iter()
        .flat_map(|&p| layout.plaquettes()[p].members.iter().copied())
        .chain(targets.iter().copied())
        .collect();
    local.sort_unstable();
    local.dedup();
    let idx = |q: QubitId| local.binary_search(&q).expect("qubit is in the local frame");
    let mut basis = Basis::new(local.len());
    for &p in plaquettes {
        basis.insert(&BitVec::from_indices(
            local.len(),
            layout.plaquettes()[p].members.iter().map(|&q| idx(q)),
        ));
    }
    basis.contains(&BitVec::from_indices(local.len(), targets.iter().map(|&q| idx(q))))
}

/// True when `E_J[J_c <Z_S>]` is provably zero at depth `p`: the coupling of
/// qubit `coupling` is outside the cone's support, or `S` plus that qubit is
/// not a product of in-cone plaquettes.
pub fn is_vanishing_avg(layout: &ParityLayout, support: &[QubitId], coupling: (usize, usize), p: usize) -> Result<bool> {
    let (i, j) = coupling;
    if !(i < j && j < layout.n()) {
        return Err(invalid(format!("coupling pair ({i}, {j}) is not a pair of n = {}", layout.n())));
    }
    let c = layout.qubit(i, j);
    let rcc = extract(layout, support, p)?;
    if !rcc.depends_on(c) {
        return Ok(true);
    }
    // Symmetric difference of the observable with the coupling qubit.
    let mut targets: Vec<QubitId> = rcc.observable_support().to_vec();
    match targets.binary_search(&c) {
        Ok(k) => {
            targets.remove(k);
        }
        Err(k) => targets.insert(k, c),
    }
    Ok(!is_completable(layout, &rcc.retained_plaquettes(), &targets))
}

/// Per-qubit cones at a fixed depth. Cones of a union of supports are the
/// union of the per-qubit cones, so two-body cones are assembled from these.
struct SingleCones {
    j_support: Vec<Vec<QubitId>>,
    plaquettes: Vec<Vec<usize>>,
}

impl SingleCones {
    fn new(layout: &ParityLayout, p: usize, exec: Exec) -> Self {
        let cones = exec.map_range(layout.num_qubits(), |q| {
            let r = extract(layout, &[q], p).expect("single-qubit support is valid");
            let plaqs = r.retained_plaquettes();
            (r.j_support, plaqs)
        });
        let (j_support, plaquettes) = cones.into_iter().unzip();
        Self { j_support, plaquettes }
    }

    fn depends_on(&self, a: QubitId, b: QubitId, c: QubitId) -> bool {
        self.j_support[a].binary_search(&c).is_ok() || self.j_support[b].binary_search(&c).is_ok()
    }

    fn plaquettes(&self, a: QubitId, b: QubitId) -> Vec<usize> {
        let mut v: Vec<usize> = self.plaquettes[a].iter().chain(&self.plaquettes[b]).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

fn check_count_args(n: usize, p: usize) -> Result<()> {
    if n < 3 {
        return Err(invalid(format!("counting needs n >= 3, got {n}")));
    }
    if p == 0 {
        return Err(invalid("counting needs p >= 1"));
    }
    Ok(())
}

/// The two-body terms of line `t`: `(it, tj, ij)` qubit triples, `i < j`.
fn line_triples(layout: &ParityLayout, t: usize) -> Vec<(QubitId, QubitId, QubitId)> {
    let n = layout.n();
    let mut out = Vec::new();
    for i in (0..n).filter(|&i| i != t) {
        for j in (i + 1..n).filter(|&j| j != t) {
            out.push((layout.qubit(i, t), layout.qubit(t, j), layout.qubit(i, j)));
        }
    }
    out
}

/// Number of triples `(t, i < j)` whose averaged two-body term is not
/// provably zero at depth `p`.
pub fn count_nonvanishing_2body(n: usize, p: usize, mode: CountMode) -> Result<u64> {
    count_nonvanishing_2body_with(n, p, mode, Exec::default())
}

pub fn count_nonvanishing_2body_with(n: usize, p: usize, mode: CountMode, exec: Exec) -> Result<u64> {
    check_count_args(n, p)?;
    let layout = ParityLayout::build(n)?;
    let cones = SingleCones::new(&layout, p, exec);
    let per_line = exec.map_range(n, |t| {
        line_triples(&layout, t)
            .into_iter()
            .filter(|&(a, b, c)| {
                cones.depends_on(a, b, c)
                    && match mode {
                        CountMode::SupportOnly => true,
                        CountMode::Completable => is_completable(&layout, &cones.plaquettes(a, b), &[a, b, c]),
                    }
            })
            .count() as u64
    });
    Ok(per_line.iter().sum())
}

/// `n^{-1/2} - n^{-3/2} + count / n^{5/2}`.
pub fn upper_bound_perf(n: usize, p: usize, mode: CountMode) -> Result<f64> {
    let count = count_nonvanishing_2body(n, p, mode)?;
    Ok(upper_bound_from_count(n, count))
}

pub fn upper_bound_from_count(n: usize, count: u64) -> f64 {
    let nf = n as f64;
    nf.powf(-0.5) - nf.powf(-1.5) + count as f64 / nf.powf(2.5)
}

/// Number of ordered pairs of two-body triples where each of the two
/// couplings lies in the coupling support of at least one of the two cones.
pub fn count_nonvanishing_pairs(n: usize, p: usize) -> Result<u64> {
    count_nonvanishing_pairs_with(n, p, Exec::default())
}

pub fn count_nonvanishing_pairs_with(n: usize, p: usize, exec: Exec) -> Result<u64> {
    check_count_args(n, p)?;
    if n > MAX_PAIR_COUNT_N {
        return Err(Error::TooLarge {
            what: "n for pair counting",
            actual: n,
            limit: MAX_PAIR_COUNT_N,
        });
    }
    let layout = ParityLayout::build(n)?;
    let k = pair_count(n);
    let cones = SingleCones::new(&layout, p, exec);
    let triples: Vec<_> = (0..n).flat_map(|t| line_triples(&layout, t)).collect();
    let supports: Vec<BitVec> = triples
        .iter()
        .map(|&(a, b, _)| BitVec::from_indices(k, union_sorted(&cones.j_support[a], &cones.j_support[b])))
        .collect();
    let per_first = exec.map_range(triples.len(), |x| {
        let (_, _, c1) = triples[x];
        let s1 = &supports[x];
        triples
            .iter()
            .zip(&supports)
            .filter(|(&(_, _, c2), s2)| (s1.get(c1) || s2.get(c1)) && (s1.get(c2) || s2.get(c2)))
            .count() as u64
    });
    Ok(per_first.iter().sum())
}

fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// One row of the counting report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub n: usize,
    pub p: usize,
    pub mode: CountMode,
    pub count: u64,
    pub upper_bound: f64,
}

pub fn count_row(n: usize, p: usize, mode: CountMode, exec: Exec) -> Result<CountRow> {
    let count = count_nonvanishing_2body_with(n, p, mode, exec)?;
    Ok(CountRow {
        n,
        p,
        mode,
        count,
        upper_bound: upper_bound_from_count(n, count),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_depth_cone_is_the_support() {
        let layout = ParityLayout::build(5).unwrap();
        let r = extract(&layout, &[3, 1], 0).unwrap();
        assert!(r.gates().is_empty());
        assert_eq!(r.qubit_set(), &[1, 3]);
        assert!(r.j_support().is_empty());
    }

    #[test]
    fn bulk_cone_sizes() {
        let layout = ParityLayout::build(12).unwrap();
        let q = layout.qubit(4, 9);
        for p in 1..=2 {
            let r = extract(&layout, &[q], p).unwrap();
            assert_eq!(r.qubit_set().len(), (2 * p + 1).pow(2));
        }
        let r1 = extract(&layout, &[q], 1).unwrap();
        assert_eq!(r1.j_support(), &[q]);
        let layout = ParityLayout::build(16).unwrap();
        let pid = layout.plaquette_id((4, 11)).unwrap();
        let members = layout.plaquettes()[pid].members.clone();
        for p in 1..=2 {
            let r = extract(&layout, &members, p).unwrap();
            assert_eq!(r.qubit_set().len(), (2 * p + 2).pow(2));
        }
    }

    #[test]
    fn gates_are_in_forward_order() {
        let layout = ParityLayout::build(8).unwrap();
        let r = extract(&layout, &[layout.qubit(2, 5)], 3).unwrap();
        let gates = r.gates();
        assert!(gates.windows(2).all(|w| w[0].layer <= w[1].layer));
        // Deeper layers (earlier in time) keep at least as many gates.
        for l in 1..3 {
            assert!(r.layer(l - 1).xrot.len() >= r.layer(l).xrot.len());
        }
        assert_eq!(r.layer(2).xrot, vec![layout.qubit(2, 5)]);
    }

    #[test]
    fn completion_witness() {
        let layout = ParityLayout::build(10).unwrap();
        let obs = [layout.qubit(2, 7), layout.qubit(7, 8)];
        assert!(is_vanishing_avg(&layout, &obs, (2, 8), 2).unwrap());
        assert!(!is_vanishing_avg(&layout, &obs, (2, 8), 3).unwrap());
        // At p = 2 the coupling is in the support; only the completion test rules it out.
        let r = extract(&layout, &obs, 2).unwrap();
        assert!(r.depends_on(layout.qubit(2, 8)));
    }

    #[test]
    fn coupling_outside_cone_vanishes() {
        let layout = ParityLayout::build(10).unwrap();
        let obs = [layout.qubit(0, 1)];
        assert!(is_vanishing_avg(&layout, &obs, (7, 9), 1).unwrap());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("support_only".parse::<CountMode>().unwrap(), CountMode::SupportOnly);
        assert_eq!("completable".parse::<CountMode>().unwrap(), CountMode::Completable);
        assert!("x".parse::<CountMode>().is_err());
        assert_eq!(CountMode::default(), CountMode::Completable);
    }

    #[test]
    fn pair_count_refuses_large_n() {
        assert!(matches!(count_nonvanishing_pairs(21, 2), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn span_membership_matches_subset_search() {
        let layout = ParityLayout::build(7).unwrap();
        let q = layout.qubit(2, 4);
        let r = extract(&layout, &[q], 1).unwrap();
        let plaqs = r.retained_plaquettes();
        assert!(plaqs.len() <= 12);
        let k = layout.num_qubits();
        let vecs: Vec<BitVec> = plaqs.iter().map(|&p| layout.plaquette_vector(p)).collect();
        for target_q in (0..k).filter(|&x| x != q) {
            let target = [q, target_q];
            let mut tv = BitVec::zeros(k);
            for &t in &target {
                tv.flip(t);
            }
            let brute = (0u32..1 << vecs.len()).any(|mask| {
                let mut acc = BitVec::zeros(k);
                for (b, v) in vecs.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        acc.xor_assign(v);
                    }
                }
                acc == tv
            });
            let mut t = target.to_vec();
            t.sort_unstable();
            assert_eq!(is_completable(&layout, &plaqs, &t), brute, "target qubit {target_q}");
        }
    }
}
