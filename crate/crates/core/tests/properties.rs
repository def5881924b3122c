//! Invariants checked on random instances, configurations and angles.

use std::f64::consts::PI;

use lhz_qaoa::engine::{self, energy_pe, energy_st, EngineOptions, StateVector};
use lhz_qaoa::layout::{ParityConfig, ParityLayout};
use lhz_qaoa::schedule::{canonicalize, time_reverse, AngleSchedule};
use lhz_qaoa::sk::{gauge_transform, logical_energy, sample, CouplingDist, LogicalConfig};
use lhz_qaoa::Exec;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn angles(p: usize) -> impl Strategy<Value = AngleSchedule> {
    prop::collection::vec(-PI..PI, 3 * p).prop_map(|v| AngleSchedule::from_vec(&v).unwrap())
}

fn shifted(s: &AngleSchedule, dg: f64, db: f64, dom: f64) -> AngleSchedule {
    AngleSchedule::new(
        s.gammas().iter().map(|g| g + dg).collect(),
        s.betas().iter().map(|b| b + db).collect(),
        s.omegas().iter().map(|o| o + dom).collect(),
    )
    .unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * (1.0 + a.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauge_flips_leave_energies_unchanged(
        n in 3usize..=5, seed in any::<u64>(), mask in any::<u64>(), s in angles(2),
    ) {
        let layout = ParityLayout::build(n).unwrap();
        let inst = sample(n, CouplingDist::Rademacher, seed).unwrap();
        let flip = LogicalConfig::from_mask(n, mask & ((1 << n) - 1));
        let gauged = gauge_transform(&inst, &flip).unwrap();
        prop_assert!(close(energy_st(&layout, &inst, &s).unwrap(), energy_st(&layout, &gauged, &s).unwrap()));
        prop_assert!(close(
            energy_pe(&layout, &inst, &s, 3.0).unwrap(),
            energy_pe(&layout, &gauged, &s, 3.0).unwrap()
        ));
    }

    #[test]
    fn time_reversal_preserves_energies(n in 3usize..=5, seed in any::<u64>(), s in angles(2)) {
        let layout = ParityLayout::build(n).unwrap();
        let inst = sample(n, CouplingDist::Rademacher, seed).unwrap();
        let r = time_reverse(&s);
        prop_assert!(close(energy_st(&layout, &inst, &s).unwrap(), energy_st(&layout, &inst, &r).unwrap()));
        prop_assert!(close(energy_pe(&layout, &inst, &s, 2.0).unwrap(), energy_pe(&layout, &inst, &r, 2.0).unwrap()));
    }

    #[test]
    fn angles_are_pi_periodic(
        n in 3usize..=5, seed in any::<u64>(), s in angles(2), k in -2i32..=2, which in 0usize..3,
    ) {
        let layout = ParityLayout::build(n).unwrap();
        let inst = sample(n, CouplingDist::Rademacher, seed).unwrap();
        let d = k as f64 * PI;
        let t = match which {
            0 => shifted(&s, d, 0.0, 0.0),
            1 => shifted(&s, 0.0, d, 0.0),
            _ => shifted(&s, 0.0, 0.0, d),
        };
        prop_assert!(close(energy_pe(&layout, &inst, &s, 3.0).unwrap(), energy_pe(&layout, &inst, &t, 3.0).unwrap()));
        prop_assert!(close(energy_st(&layout, &inst, &s).unwrap(), energy_st(&layout, &inst, &canonicalize(&t)).unwrap()));
    }

    #[test]
    fn evolution_conserves_norm(n in 3usize..=6, seed in any::<u64>(), s in angles(3)) {
        let layout = ParityLayout::build(n).unwrap();
        let inst = sample(n, CouplingDist::Gaussian, seed).unwrap();
        let state = engine::evolve(&layout, &inst, &s, None, None).unwrap();
        prop_assert!((state.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn encode_decode_round_trips(n in 3usize..=9, mask in any::<u64>(), t in 0usize..9) {
        let layout = ParityLayout::build(n).unwrap();
        let cfg = LogicalConfig::from_mask(n, mask & ((1 << n) - 1));
        let pc = layout.encode(&cfg).unwrap();
        prop_assert_eq!(layout.broken_constraints(&pc).unwrap(), 0);
        let t = t % n;
        prop_assert_eq!(layout.decode(&pc, t).unwrap(), cfg.normalized_at(t));
        let inst = sample(n, CouplingDist::Rademacher, mask).unwrap();
        prop_assert!(close(layout.st_cost_of_bitstring(&inst, &pc).unwrap(), logical_energy(&inst, &cfg).unwrap()));
    }

    #[test]
    fn decoded_cost_matches_line_decoding(n in 3usize..=7, mask in any::<u64>(), seed in any::<u64>()) {
        let layout = ParityLayout::build(n).unwrap();
        let k = layout.num_qubits();
        let pc = ParityConfig::from_mask(k, mask & ((1u64 << k) - 1));
        let inst = sample(n, CouplingDist::Gaussian, seed).unwrap();
        prop_assert!(close(
            layout.st_cost_of_bitstring(&inst, &pc).unwrap(),
            lhz_qaoa::layout::st_cost_by_decoding(&layout, &inst, &pc).unwrap()
        ));
    }

    #[test]
    fn canonical_schedules_keep_energy(seed in any::<u64>(), s in angles(2), shifts in prop::collection::vec(-3i32..=3, 6)) {
        let layout = ParityLayout::build(4).unwrap();
        let inst = sample(4, CouplingDist::Rademacher, seed).unwrap();
        let mut v = s.to_vec();
        for (x, k) in v.iter_mut().zip(&shifts) {
            *x += *k as f64 * PI;
        }
        let c = canonicalize(&AngleSchedule::from_vec(&v).unwrap());
        prop_assert!(c.is_canonical());
        prop_assert!(close(energy_pe(&layout, &inst, &s, 3.0).unwrap(), energy_pe(&layout, &inst, &c, 3.0).unwrap()));
    }

    #[test]
    fn execution_policies_agree(n in 3usize..=6, seed in any::<u64>(), s in angles(2)) {
        let layout = ParityLayout::build(n).unwrap();
        let inst = sample(n, CouplingDist::Gaussian, seed).unwrap();
        let seq = EngineOptions { exec: Exec::Sequential, ..Default::default() };
        let par = EngineOptions { exec: Exec::Parallel, ..Default::default() };
        prop_assert_eq!(
            engine::energy_pe_with(&layout, &inst, &s, 3.0, &seq).unwrap(),
            engine::energy_pe_with(&layout, &inst, &s, 3.0, &par).unwrap()
        );
    }
}

#[test]
fn plaquettes_are_independent() {
    for n in 3..=12 {
        let layout = ParityLayout::build(n).unwrap();
        let k = n * (n - 1) / 2;
        assert_eq!(layout.num_plaquettes(), k - n + 1);
        assert_eq!(layout.plaquette_rank(), layout.num_plaquettes(), "n={n}");
    }
}

#[test]
fn basis_states_are_normalized() {
    let layout = ParityLayout::build(5).unwrap();
    let pc = layout.encode(&LogicalConfig::from_mask(5, 0b10110)).unwrap();
    let state = StateVector::basis(&pc).unwrap();
    assert!((state.norm() - 1.0).abs() < 1e-15);
}
