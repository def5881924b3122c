//! The LHZ triangle: one parity qubit per logical pair, plaquette constraints
//! forming a cycle basis, and the qubit lines used for decoding.
//!
//! Parity qubit `(i, j)` has id [`pair_index`]`(n, i, j)`. Plaquette `(i, j)`,
//! `0 <= i < j <= n - 2`, couples `(i, j), (i, j+1), (i+1, j+1)` and, when
//! `j > i + 1`, also `(i+1, j)`; with `j = i + 1` the fourth member would be the
//! diagonal, so the plaquette is a triangle. Grid position of qubit `(i, j)` is
//! row `j - i - 1`, column `i`; the triangles sit on row 0.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::gf2::{self, BitVec};
use crate::sk::{logical_energy, pair_count, pair_index, pairs, LogicalConfig, SkInstance};

pub type QubitId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaquetteKind {
    Square,
    Triangle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Plaquette {
    /// Logical pair of the plaquette's leftmost qubit.
    pub label: (usize, usize),
    pub kind: PlaquetteKind,
    pub members: Vec<QubitId>,
}

#[derive(Debug, Clone)]
pub struct ParityLayout {
    n: usize,
    qubits: Vec<(usize, usize)>,
    plaquettes: Vec<Plaquette>,
    lines: Vec<Vec<QubitId>>,
    /// Plaquette ids containing each qubit, ascending.
    incident: Vec<Vec<usize>>,
}

impl ParityLayout {
    pub fn build(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(invalid(format!("the parity layout needs n >= 3, got {n}")));
        }
        let qubits: Vec<_> = pairs(n).collect();
        let mut plaquettes = Vec::with_capacity((n - 1) * (n - 2) / 2);
        for i in 0..n - 2 {
            for j in i + 1..n - 1 {
                let mut members = vec![
                    pair_index(n, i, j),
                    pair_index(n, i, j + 1),
                    pair_index(n, i + 1, j + 1),
                ];
                let kind = if j == i + 1 {
                    PlaquetteKind::Triangle
                } else {
                    members.push(pair_index(n, i + 1, j));
                    PlaquetteKind::Square
                };
                plaquettes.push(Plaquette {
                    label: (i, j),
                    kind,
                    members,
                });
            }
        }
        let lines = (0..n)
            .map(|t| {
                (0..n)
                    .filter(|&k| k != t)
                    .map(|k| pair_index(n, k.min(t), k.max(t)))
                    .collect()
            })
            .collect();
        let mut incident = vec![Vec::new(); qubits.len()];
        for (pid, p) in plaquettes.iter().enumerate() {
            for &q in &p.members {
                incident[q].push(pid);
            }
        }
        Ok(Self {
            n,
            qubits,
            plaquettes,
            lines,
            incident,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of parity qubits `K`.
    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    /// Number of plaquettes `P`.
    pub fn num_plaquettes(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn qubits(&self) -> &[(usize, usize)] {
        &self.qubits
    }

    pub fn pair(&self, q: QubitId) -> (usize, usize) {
        self.qubits[q]
    }

    pub fn qubit(&self, i: usize, j: usize) -> QubitId {
        assert!(i != j, "no parity qubit on the diagonal");
        pair_index(self.n, i.min(j), i.max(j))
    }

    /// Grid position `(row, col)`.
    pub fn position(&self, q: QubitId) -> (usize, usize) {
        let (i, j) = self.qubits[q];
        (j - i - 1, i)
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    pub fn plaquette_id(&self, label: (usize, usize)) -> Option<usize> {
        let (i, j) = label;
        if !(i < j && j + 2 <= self.n) {
            return None;
        }
        // Labels are enumerated row by row in i, so this mirrors pair_index on n - 1.
        Some(pair_index(self.n - 1, i, j))
    }

    pub fn incident_plaquettes(&self, q: QubitId) -> &[usize] {
        &self.incident[q]
    }

    /// Qubit line `t`: the qubits sharing logical index `t`, ordered by the
    /// other index.
    pub fn line(&self, t: usize) -> &[QubitId] {
        &self.lines[t]
    }

    pub fn lines(&self) -> &[Vec<QubitId>] {
        &self.lines
    }

    /// GF(2) indicator of a plaquette over the `K` qubits.
    pub fn plaquette_vector(&self, pid: usize) -> BitVec {
        BitVec::from_indices(self.num_qubits(), self.plaquettes[pid].members.iter().copied())
    }

    /// Rank over GF(2) of all plaquette indicators.
    pub fn plaquette_rank(&self) -> usize {
        let vecs: Vec<_> = (0..self.num_plaquettes()).map(|p| self.plaquette_vector(p)).collect();
        gf2::rank(self.num_qubits(), &vecs)
    }

    fn check_config(&self, pc: &ParityConfig) -> Result<()> {
        if pc.len() != self.num_qubits() {
            return Err(invalid(format!(
                "parity string has {} bits, layout has {}",
                pc.len(),
                self.num_qubits()
            )));
        }
        Ok(())
    }

    fn check_instance(&self, inst: &SkInstance) -> Result<()> {
        if inst.n() != self.n {
            return Err(invalid(format!(
                "instance has n = {}, layout has n = {}",
                inst.n(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn encode(&self, cfg: &LogicalConfig) -> Result<ParityConfig> {
        if cfg.len() != self.n {
            return Err(invalid(format!(
                "configuration has {} spins, layout has n = {}",
                cfg.len(),
                self.n
            )));
        }
        let z = cfg.bits();
        Ok(ParityConfig {
            bits: self.qubits.iter().map(|&(i, j)| z[i] * z[j]).collect(),
        })
    }

    /// Decodes along qubit line `t` with `z_t = +1`.
    pub fn decode(&self, pc: &ParityConfig, t: usize) -> Result<LogicalConfig> {
        self.check_config(pc)?;
        if t >= self.n {
            return Err(invalid(format!("line {t} out of range for n = {}", self.n)));
        }
        let bits = (0..self.n)
            .map(|i| if i == t { 1 } else { pc.get(self.qubit(i, t)) })
            .collect();
        LogicalConfig::new(bits)
    }

    /// Mean logical energy of decoding `pc` along all `n` qubit lines.
    pub fn st_cost_of_bitstring(&self, inst: &SkInstance, pc: &ParityConfig) -> Result<f64> {
        self.check_config(pc)?;
        self.check_instance(inst)?;
        let n = self.n;
        let line_bit = |i: usize, t: usize| if i == t { 1.0 } else { f64::from(pc.get(self.qubit(i, t))) };
        let total: f64 = (0..n)
            .map(|t| {
                pairs(n)
                    .zip(inst.couplings())
                    .map(|((i, j), &c)| c * line_bit(i, t) * line_bit(j, t))
                    .sum::<f64>()
            })
            .sum();
        Ok(total / n as f64)
    }

    /// Number of plaquettes whose member product is -1.
    pub fn broken_constraints(&self, pc: &ParityConfig) -> Result<usize> {
        self.check_config(pc)?;
        Ok(self
            .plaquettes
            .iter()
            .filter(|p| p.members.iter().map(|&q| pc.get(q)).product::<i8>() < 0)
            .count())
    }

    /// Layout dump for debugging and plotting.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "qubits": self.qubits,
            "positions": (0..self.num_qubits()).map(|q| self.position(q)).collect::<Vec<_>>(),
            "plaquettes": self.plaquettes,
            "lines": self.lines,
        })
    }
}

/// Parity bitstring, entries in {-1, +1}, indexed by qubit id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParityConfig {
    bits: Vec<i8>,
}

impl ParityConfig {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if bits.iter().any(|&b| b != 1 && b != -1) {
            return Err(invalid("parity bits must be +1 or -1"));
        }
        Ok(Self { bits })
    }

    /// Qubit `q` is -1 iff bit `q` of `mask` is set (the computational basis
    /// state `|mask>` of the register).
    pub fn from_mask(k: usize, mask: u64) -> Self {
        Self {
            bits: (0..k).map(|q| if mask >> q & 1 == 1 { -1 } else { 1 }).collect(),
        }
    }

    pub fn to_mask(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b < 0)
            .fold(0, |m, (q, _)| m | 1 << q)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, q: QubitId) -> i8 {
        self.bits[q]
    }

    pub fn bits(&self) -> &[i8] {
        &self.bits
    }

    pub fn flipped(&self, q: QubitId) -> Self {
        let mut bits = self.bits.clone();
        bits[q] = -bits[q];
        Self { bits }
    }
}

/// Sanity helper used by tests and the runner: `K = n(n-1)/2`.
pub fn expected_qubits(n: usize) -> usize {
    pair_count(n)
}

/// Decoding followed by scoring along every line, the reference definition of
/// the spanning-tree cost.
pub fn st_cost_by_decoding(layout: &ParityLayout, inst: &SkInstance, pc: &ParityConfig) -> Result<f64> {
    let mut total = 0.0;
    for t in 0..layout.n() {
        total += logical_energy(inst, &layout.decode(pc, t)?)?;
    }
    Ok(total / layout.n() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sk::{ground_state, sample, CouplingDist};
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn sizes() {
        let l = ParityLayout::build(6).unwrap();
        assert_eq!(l.num_qubits(), 15);
        assert_eq!(l.num_plaquettes(), 10);
        let tri = l.plaquettes().iter().filter(|p| p.kind == PlaquetteKind::Triangle).count();
        assert_eq!(tri, 4);
        assert_eq!(l.num_plaquettes() - tri, 6);
        let l3 = ParityLayout::build(3).unwrap();
        assert_eq!((l3.num_qubits(), l3.num_plaquettes()), (3, 1));
        assert_eq!(l3.plaquettes()[0].kind, PlaquetteKind::Triangle);
        assert!(ParityLayout::build(2).is_err());
    }

    #[test]
    fn structural_invariants() {
        for n in 3..12 {
            let l = ParityLayout::build(n).unwrap();
            assert_eq!(l.num_plaquettes(), (n - 1) * (n - 2) / 2);
            assert_eq!(l.plaquette_rank(), l.num_plaquettes());
            for (pid, p) in l.plaquettes().iter().enumerate() {
                assert_eq!(l.plaquette_id(p.label), Some(pid));
                let expect = if p.kind == PlaquetteKind::Square { 4 } else { 3 };
                assert_eq!(p.members.len(), expect);
                if p.kind == PlaquetteKind::Triangle {
                    assert!(p.members.iter().any(|&q| l.position(q).0 == 0));
                    assert_eq!(l.position(p.members[0]).0, 0);
                }
                // Even incidence of every logical index.
                let mut count = vec![0usize; n];
                for &q in &p.members {
                    let (i, j) = l.pair(q);
                    count[i] += 1;
                    count[j] += 1;
                }
                assert!(count.iter().all(|c| c % 2 == 0), "plaquette {:?}", p.label);
            }
            for q in 0..l.num_qubits() {
                let (i, j) = l.pair(q);
                let on: Vec<usize> = (0..n).filter(|&t| l.line(t).contains(&q)).collect();
                assert_eq!(on, vec![i, j]);
            }
            for t in 0..n {
                assert_eq!(l.line(t).len(), n - 1);
                for u in t + 1..n {
                    let common: Vec<_> = l.line(t).iter().filter(|q| l.line(u).contains(q)).collect();
                    assert_eq!(common, vec![&l.qubit(t, u)]);
                }
            }
        }
    }

    #[test]
    fn encode_decode_examples() {
        let l = ParityLayout::build(5).unwrap();
        let up = l.encode(&LogicalConfig::all_up(5)).unwrap();
        assert!(up.bits().iter().all(|&b| b == 1));
        for t in 0..5 {
            assert_eq!(l.decode(&up, t).unwrap(), LogicalConfig::all_up(5));
        }
        let mut rng = crate::rng::stream(1, &[]);
        for _ in 0..20 {
            let cfg = LogicalConfig::from_mask(5, rng.gen_range(0..32));
            let pc = l.encode(&cfg).unwrap();
            assert_eq!(pc, l.encode(&cfg.negated()).unwrap());
            assert_eq!(l.broken_constraints(&pc).unwrap(), 0);
            for p in l.plaquettes() {
                assert_eq!(p.members.iter().map(|&q| pc.get(q)).product::<i8>(), 1);
            }
        }
        assert!(l.decode(&up, 5).is_err());
        assert!(l.encode(&LogicalConfig::all_up(4)).is_err());
    }

    #[test]
    fn round_trip_n6() {
        let l = ParityLayout::build(6).unwrap();
        for mask in 0..64 {
            let cfg = LogicalConfig::from_mask(6, mask);
            let pc = l.encode(&cfg).unwrap();
            for t in 0..6 {
                assert_eq!(l.decode(&pc, t).unwrap(), cfg.normalized_at(t));
            }
        }
    }

    #[test]
    fn broken_string_decodes_inconsistently() {
        let l = ParityLayout::build(5).unwrap();
        let pc = l.encode(&LogicalConfig::from_mask(5, 0b01101)).unwrap();
        let q = l.qubit(1, 3);
        let bad = pc.flipped(q);
        assert!(l.broken_constraints(&bad).unwrap() > 0);
        // Line 1 and line 0 read (1,3) differently relative to their anchors.
        let a = l.decode(&bad, 1).unwrap();
        let b = l.decode(&bad, 0).unwrap();
        assert_ne!(a.normalized_at(0), b);
    }

    #[test]
    fn single_flip_breaks_incident_plaquettes() {
        let l = ParityLayout::build(7).unwrap();
        let pc = l.encode(&LogicalConfig::from_mask(7, 0b1010011)).unwrap();
        for q in 0..l.num_qubits() {
            assert_eq!(
                l.broken_constraints(&pc.flipped(q)).unwrap(),
                l.incident_plaquettes(q).len()
            );
        }
        // A bulk qubit sits in four plaquettes.
        assert_eq!(l.incident_plaquettes(l.qubit(2, 5)).len(), 4);
    }

    #[test]
    fn st_cost_examples() {
        let l = ParityLayout::build(4).unwrap();
        let inst = SkInstance::uniform(4, 1.0).unwrap();
        let up = ParityConfig::from_mask(6, 0);
        assert_eq!(l.st_cost_of_bitstring(&inst, &up).unwrap(), 6.0);

        let l5 = ParityLayout::build(5).unwrap();
        for seed in 0..10 {
            let inst = sample(5, CouplingDist::Rademacher, seed).unwrap();
            let (e0, g) = ground_state(&inst).unwrap();
            assert_eq!(l5.st_cost_of_bitstring(&inst, &l5.encode(&g).unwrap()).unwrap(), e0);
            for mask in [0u64, 0x3ff, 0b1011001110, 0b0100110001] {
                let pc = ParityConfig::from_mask(10, mask);
                let a = l5.st_cost_of_bitstring(&inst, &pc).unwrap();
                let b = st_cost_by_decoding(&l5, &inst, &pc).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_strings_break_half_the_constraints() {
        let l = ParityLayout::build(6).unwrap();
        let mut rng = crate::rng::stream(42, &[]);
        let samples = 10_000;
        let total: usize = (0..samples)
            .map(|_| {
                let pc = ParityConfig::from_mask(15, rng.gen_range(0..1 << 15));
                l.broken_constraints(&pc).unwrap()
            })
            .sum();
        let mean = total as f64 / samples as f64;
        let half = l.num_plaquettes() as f64 / 2.0;
        assert!((mean - half).abs() < 0.05 * half, "mean {mean}");
    }

    #[test]
    fn json_dump_has_all_sections() {
        let v = ParityLayout::build(4).unwrap().to_json();
        assert_eq!(v["qubits"].as_array().unwrap().len(), 6);
        assert_eq!(v["plaquettes"].as_array().unwrap().len(), 3);
        assert_eq!(v["plaquettes"][0]["kind"], "triangle");
        assert_eq!(v["lines"].as_array().unwrap().len(), 4);
        assert_eq!(v["positions"][0], serde_json::json!([0, 0]));
    }

    proptest! {
        #[test]
        fn encoded_strings_score_their_logical_energy(seed in 0u64..500, mask in 0u64..128) {
            let l = ParityLayout::build(7).unwrap();
            let inst = sample(7, CouplingDist::Gaussian, seed).unwrap();
            let cfg = LogicalConfig::from_mask(7, mask);
            let st = l.st_cost_of_bitstring(&inst, &l.encode(&cfg).unwrap()).unwrap();
            prop_assert!((st - logical_energy(&inst, &cfg).unwrap()).abs() < 1e-12);
        }
    }
}
