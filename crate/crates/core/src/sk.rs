//! Sherrington–Kirkpatrick instances: sampling, exhaustive enumeration, the
//! logical energy and exact ground states.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;

/// Largest coupling count for which [`enumerate_all`] is allowed.
pub const MAX_ENUMERATED_COUPLINGS: usize = 24;
/// Largest logical size accepted by the exhaustive ground-state search.
pub const MAX_GROUND_STATE_SPINS: usize = 24;

/// Number of pairs `i < j` over `n` spins.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of pair `(i, j)`, `i < j`, in lexicographic pair order.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// All pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingDist {
    /// Uniform on {-1, +1}.
    #[default]
    Rademacher,
    /// Standard normal.
    Gaussian,
}

impl std::str::FromStr for CouplingDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rademacher" | "pm1" => Ok(CouplingDist::Rademacher),
            "gaussian" | "normal" => Ok(CouplingDist::Gaussian),
            other => Err(invalid(format!("unknown coupling distribution '{other}'"))),
        }
    }
}

/// An all-to-all spin glass `H = sum_{i<j} J_ij z_i z_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkInstance {
    n: usize,
    /// Couplings in lexicographic pair order.
    couplings: Vec<f64>,
    seed: u64,
}

impl SkInstance {
    pub fn from_couplings(n: usize, couplings: Vec<f64>, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("an instance needs n >= 2 spins, got {n}")));
        }
        if couplings.len() != pair_count(n) {
            return Err(invalid(format!(
                "expected {} couplings for n = {n}, got {}",
                pair_count(n),
                couplings.len()
            )));
        }
        if couplings.iter().any(|j| !j.is_finite()) {
            return Err(invalid("couplings must be finite"));
        }
        Ok(Self { n, couplings, seed })
    }

    /// Every coupling set to `value`.
    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Self::from_couplings(n, vec![value; pair_count(n)], 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// `J_ij` for any ordering of distinct `i, j`.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.couplings[pair_index(self.n, a, b)]
    }

    /// True when every coupling is an integer, so all energies are integers.
    pub fn has_integer_couplings(&self) -> bool {
        self.couplings.iter().all(|j| j.fract() == 0.0 && j.abs() < 1e6)
    }

    pub fn is_rademacher(&self) -> bool {
        self.couplings.iter().all(|&j| j == 1.0 || j == -1.0)
    }
}

/// Samples an instance; a pure function of `(n, dist, seed)`.
pub fn sample(n: usize, dist: CouplingDist, seed: u64) -> Result<SkInstance> {
    if n < 2 {
        return Err(invalid(format!("an instance needs n >= 2 spins, got {n}")));
    }
    let mut rng = rng::stream(seed, &[n as u64]);
    let couplings = (0..pair_count(n))
        .map(|_| match dist {
            CouplingDist::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            CouplingDist::Gaussian => rng.sample::<f64, _>(StandardNormal),
        })
        .collect();
    SkInstance::from_couplings(n, couplings, seed)
}

/// Every Rademacher instance on `n` spins, exactly once. Instance `b` has
/// `J = -1` on pair `k` iff bit `k` of `b` is set.
pub fn enumerate_all(n: usize) -> Result<impl ExactSizeIterator<Item = SkInstance>> {
    if n < 2 {
        return Err(invalid(format!("an instance needs n >= 2 spins, got {n}")));
    }
    let k = pair_count(n);
    if k > MAX_ENUMERATED_COUPLINGS {
        return Err(Error::TooLarge {
            what: "coupling count",
            actual: k,
            limit: MAX_ENUMERATED_COUPLINGS,
        });
    }
    Ok((0u32..1 << k).map(move |b| {
        let couplings = (0..k)
            .map(|q| if b >> q & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        SkInstance {
            n,
            couplings,
            seed: 0,
        }
    }))
}

/// Spin configuration with entries in {-1, +1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogicalConfig {
    bits: Vec<i8>,
}

impl LogicalConfig {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if bits.iter().any(|&b| b != 1 && b != -1) {
            return Err(invalid("spin values must be +1 or -1"));
        }
        Ok(Self { bits })
    }

    pub fn all_up(n: usize) -> Self {
        Self { bits: vec![1; n] }
    }

    /// Spin `k` is -1 iff bit `k` of `mask` is set.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self {
            bits: (0..n).map(|k| if mask >> k & 1 == 1 { -1 } else { 1 }).collect(),
        }
    }

    pub fn to_mask(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b < 0)
            .fold(0, |m, (k, _)| m | 1 << k)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[i8] {
        &self.bits
    }

    pub fn get(&self, k: usize) -> i8 {
        self.bits[k]
    }

    pub fn negated(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| -b).collect(),
        }
    }

    /// Flips the global sign so that spin `t` is +1.
    pub fn normalized_at(&self, t: usize) -> Self {
        if self.bits[t] > 0 {
            self.clone()
        } else {
            self.negated()
        }
    }
}

fn check_len(inst: &SkInstance, cfg: &LogicalConfig) -> Result<()> {
    if cfg.len() != inst.n {
        return Err(invalid(format!(
            "configuration has {} spins, instance has {}",
            cfg.len(),
            inst.n
        )));
    }
    Ok(())
}

/// `sum_{i<j} J_ij z_i z_j`.
pub fn logical_energy(inst: &SkInstance, cfg: &LogicalConfig) -> Result<f64> {
    check_len(inst, cfg)?;
    let z = cfg.bits();
    Ok(pairs(inst.n)
        .zip(&inst.couplings)
        .map(|((i, j), &c)| c * f64::from(z[i] * z[j]))
        .sum())
}

/// Energy of the configuration encoded by `mask` (bit set = spin down).
pub(crate) fn energy_of_mask(inst: &SkInstance, mask: u64) -> f64 {
    pairs(inst.n)
        .zip(&inst.couplings)
        .map(|((i, j), &c)| if (mask >> i ^ mask >> j) & 1 == 1 { -c } else { c })
        .sum()
}

/// Lexicographic order on spin vectors with -1 < +1.
fn lex_less(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    diff != 0 && a >> diff.trailing_zeros() & 1 == 1
}

/// Exact ground state with spin 0 fixed to +1; ties go to the
/// lexicographically smallest spin vector (-1 < +1).
pub fn ground_state(inst: &SkInstance) -> Result<(f64, LogicalConfig)> {
    let n = inst.n;
    if n > MAX_GROUND_STATE_SPINS {
        return Err(Error::TooLarge {
            what: "logical spin count",
            actual: n,
            limit: MAX_GROUND_STATE_SPINS,
        });
    }
    // Gray-code walk over spins 1..n with incremental local fields.
    let mut z = vec![1.0f64; n];
    let mut field: Vec<f64> = (0..n)
        .map(|k| (0..n).filter(|&m| m != k).map(|m| inst.coupling(k, m)).sum())
        .collect();
    let mut energy = energy_of_mask(inst, 0);
    let mut mask = 0u64;
    let mut best = (energy, mask);
    for step in 1u64..1 << (n - 1) {
        let k = step.trailing_zeros() as usize + 1;
        energy -= 2.0 * z[k] * field[k];
        for m in 0..n {
            if m != k {
                field[m] -= 2.0 * inst.coupling(k, m) * z[k];
            }
        }
        z[k] = -z[k];
        mask ^= 1 << k;
        if energy < best.0 || (energy == best.0 && lex_less(mask, best.1)) {
            best = (energy, mask);
        }
    }
    // Re-sum the winner so the reported energy carries no walk round-off.
    let cfg = LogicalConfig::from_mask(n, best.1);
    let e = logical_energy(inst, &cfg)?;
    Ok((e, cfg))
}

/// `J'_ij = s_i s_j J_ij`.
pub fn gauge_transform(inst: &SkInstance, s: &LogicalConfig) -> Result<SkInstance> {
    check_len(inst, s)?;
    let z = s.bits();
    let couplings = pairs(inst.n)
        .zip(&inst.couplings)
        .map(|((i, j), &c)| c * f64::from(z[i] * z[j]))
        .collect();
    Ok(SkInstance {
        n: inst.n,
        couplings,
        seed: inst.seed,
    })
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    couplings: Vec<(usize, usize, f64)>,
    seed: u64,
}

impl Serialize for SkInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InstanceFile {
            n: self.n,
            couplings: pairs(self.n)
                .zip(&self.couplings)
                .map(|((i, j), &c)| (i, j, c))
                .collect(),
            seed: self.seed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SkInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = InstanceFile::deserialize(d)?;
        let n = file.n;
        let mut couplings = vec![None; pair_count(n)];
        for (i, j, c) in file.couplings {
            if !(i < j && j < n) {
                return Err(D::Error::custom(format!("pair ({i}, {j}) invalid for n = {n}")));
            }
            let slot = &mut couplings[pair_index(n, i, j)];
            if slot.replace(c).is_some() {
                return Err(D::Error::custom(format!("pair ({i}, {j}) listed twice")));
            }
        }
        let couplings = couplings
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| D::Error::custom("missing couplings"))?;
        SkInstance::from_couplings(n, couplings, file.seed).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Index-naive double loop, independent of the pair-order bookkeeping.
    fn naive_energy(inst: &SkInstance, z: &[i8]) -> f64 {
        let mut e = 0.0;
        for i in 0..inst.n() {
            for j in 0..inst.n() {
                if i < j {
                    e += inst.coupling(j, i) * z[i] as f64 * z[j] as f64;
                }
            }
        }
        e
    }

    /// Full enumeration, no gauge fixing.
    fn brute_ground(inst: &SkInstance) -> f64 {
        (0u64..1 << inst.n())
            .map(|m| naive_energy(inst, LogicalConfig::from_mask(inst.n(), m).bits()))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn pair_indexing_is_lexicographic() {
        for n in 2..9 {
            for (k, (i, j)) in pairs(n).enumerate() {
                assert_eq!(pair_index(n, i, j), k);
            }
        }
    }

    #[test]
    fn sample_counts_and_determinism() {
        let a = sample(4, CouplingDist::Rademacher, 7).unwrap();
        assert_eq!(a.couplings().len(), 6);
        assert!(a.is_rademacher());
        assert_eq!(sample(6, CouplingDist::Rademacher, 99).unwrap().couplings().len(), 15);
        assert_eq!(a, sample(4, CouplingDist::Rademacher, 7).unwrap());
        let g = sample(5, CouplingDist::Gaussian, 3).unwrap();
        assert_eq!(g, sample(5, CouplingDist::Gaussian, 3).unwrap());
        assert!(!g.is_rademacher());
        assert!(matches!(
            sample(1, CouplingDist::Rademacher, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn enumeration_sizes_and_zero_mean() {
        for (n, count) in [(3, 8), (4, 64), (5, 1024)] {
            let all: Vec<_> = enumerate_all(n).unwrap().collect();
            assert_eq!(all.len(), count);
            for q in 0..pair_count(n) {
                let s: f64 = all.iter().map(|i| i.couplings()[q]).sum();
                assert_eq!(s, 0.0);
            }
        }
        let distinct: std::collections::HashSet<Vec<i64>> = enumerate_all(4)
            .unwrap()
            .map(|i| i.couplings().iter().map(|&c| c as i64).collect())
            .collect();
        assert_eq!(distinct.len(), 64);
        assert!(matches!(enumerate_all(8), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn energy_examples() {
        let inst = SkInstance::uniform(4, 1.0).unwrap();
        assert_eq!(logical_energy(&inst, &LogicalConfig::all_up(4)).unwrap(), 6.0);
        assert!(logical_energy(&inst, &LogicalConfig::all_up(3)).is_err());
        let r = sample(5, CouplingDist::Gaussian, 11).unwrap();
        for m in 0..32 {
            let cfg = LogicalConfig::from_mask(5, m);
            let e = logical_energy(&r, &cfg).unwrap();
            assert!((e - naive_energy(&r, cfg.bits())).abs() < 1e-12);
            assert_eq!(e, logical_energy(&r, &cfg.negated()).unwrap());
        }
    }

    #[test]
    fn ground_state_examples() {
        let inst = SkInstance::from_couplings(2, vec![-1.0], 0).unwrap();
        let (e, cfg) = ground_state(&inst).unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(cfg.bits(), &[1, 1]);

        let tri = SkInstance::uniform(3, 1.0).unwrap();
        assert_eq!(ground_state(&tri).unwrap().0, -1.0);
        // Three minimizers with z0 = +1: (+,-,+), (+,+,-), (+,-,-).
        assert_eq!(ground_state(&tri).unwrap().1.bits(), &[1, -1, -1]);

        for seed in 0..20 {
            let inst = sample(4, CouplingDist::Rademacher, seed).unwrap();
            assert_eq!(ground_state(&inst).unwrap().0, brute_ground(&inst));
        }
        for seed in 0..5 {
            let inst = sample(7, CouplingDist::Gaussian, seed).unwrap();
            assert!((ground_state(&inst).unwrap().0 - brute_ground(&inst)).abs() < 1e-9);
        }
    }

    #[test]
    fn gauge_examples() {
        let inst = sample(5, CouplingDist::Rademacher, 5).unwrap();
        assert_eq!(gauge_transform(&inst, &LogicalConfig::all_up(5)).unwrap(), inst);
        let s = LogicalConfig::from_mask(5, 0b10110);
        let once = gauge_transform(&inst, &s).unwrap();
        assert_eq!(gauge_transform(&once, &s).unwrap(), inst);
        assert_eq!(brute_ground(&inst), brute_ground(&once));
        assert_eq!(ground_state(&inst).unwrap().0, ground_state(&once).unwrap().0);
    }

    #[test]
    fn gauge_preserves_energy_multiset() {
        for n in 2..=5 {
            for inst in enumerate_all(n).unwrap().step_by(7) {
                for smask in 0..1u64 << n {
                    let s = LogicalConfig::from_mask(n, smask);
                    let g = gauge_transform(&inst, &s).unwrap();
                    let mut a: Vec<i64> = (0..1u64 << n).map(|m| energy_of_mask(&inst, m) as i64).collect();
                    let mut b: Vec<i64> = (0..1u64 << n).map(|m| energy_of_mask(&g, m) as i64).collect();
                    a.sort_unstable();
                    b.sort_unstable();
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let inst = sample(4, CouplingDist::Rademacher, 1).unwrap();
        let text = serde_json::to_string(&inst).unwrap();
        assert!(text.starts_with(r#"{"n":4,"couplings":[[0,1,"#));
        assert_eq!(serde_json::from_str::<SkInstance>(&text).unwrap(), inst);
        let bad = r#"{"n":3,"couplings":[[0,1,1.0],[0,1,1.0],[1,2,1.0]],"seed":0}"#;
        assert!(serde_json::from_str::<SkInstance>(bad).is_err());
        let short = r#"{"n":3,"couplings":[[0,1,1.0]],"seed":0}"#;
        assert!(serde_json::from_str::<SkInstance>(short).is_err());
    }

    proptest! {
        #[test]
        fn ground_state_bounds_random_configs(seed in 0u64..1000, masks in prop::collection::vec(0u64..256, 100)) {
            let inst = sample(8, CouplingDist::Rademacher, seed).unwrap();
            let (e0, cfg) = ground_state(&inst).unwrap();
            prop_assert_eq!(cfg.get(0), 1);
            prop_assert_eq!(e0, logical_energy(&inst, &cfg).unwrap());
            for m in masks {
                prop_assert!(e0 <= logical_energy(&inst, &LogicalConfig::from_mask(8, m)).unwrap());
            }
        }
    }
}
