//! Property tests for the state, optics, measurement, gate and scenario
//! invariants. Random states and circuits are drawn from seeds chosen by
//! proptest, so a failing case shrinks to a small seed and size.

use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use lofock::fock::{FockSpace, PureState};
use lofock::gates::{
    cnot_dual_rail, cnot_polarization_branches, csign, logical_amplitudes, logical_state, ns_gate,
    DualRailQubit, NsParameters, PolarizationQubit,
};
use lofock::interferometer::{apply_element, Element};
use lofock::measurement::{
    detect_with_model, outcome_distribution, qnd_photon_presence, sample_outcome, seeded_rng,
    split_branches, DetectorModel,
};
use lofock::random::{random_amplitudes, random_circuit, random_fock_state, random_logical_state};
use lofock::scenario::{Experiment, Scenario};
use lofock::teleport::{
    make_csign_resource, make_resource, teleport_branches, teleported_csign_branches,
};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

/// Superposition of up to three photon-number sectors on `modes` modes.
fn mixed_sector_state(seed: u64, modes: usize, max_photons: usize) -> PureState {
    let mut rng = seeded_rng(seed);
    let space = FockSpace::new(modes, max_photons).unwrap();
    let mut s = PureState::zero(space);
    for _ in 0..3 {
        let n = rng.random_range(0..=max_photons);
        let part = random_fock_state(&mut rng, modes, n, 3).unwrap();
        let terms: Vec<_> = part.terms().map(|(o, a)| (o.clone(), *a)).collect();
        s = s
            .add(&PureState::from_terms(space, terms).unwrap())
            .unwrap();
    }
    s.normalize().unwrap().0
}

fn sector_weights(s: &PureState) -> BTreeMap<usize, f64> {
    let mut w = BTreeMap::new();
    for (o, a) in s.terms() {
        *w.entry(o.total()).or_insert(0.0) += a.norm_sqr();
    }
    w
}

fn random_element(seed: u64, modes: usize) -> Element {
    let mut rng = seeded_rng(seed ^ 0x5eed);
    if modes >= 2 && rng.random_bool(0.7) {
        let i = rng.random_range(0..modes);
        let j = (i + rng.random_range(1..modes)) % modes;
        Element::beamsplitter(
            rng.random_range(-3.2..3.2),
            rng.random_range(-3.2..3.2),
            i,
            j,
        )
    } else {
        Element::phaseshift(rng.random_range(-3.2..3.2), rng.random_range(0..modes))
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn basis_index_round_trip(modes in 1usize..=6, cutoff in 0usize..=6) {
        let space = FockSpace::new(modes, cutoff).unwrap();
        for (i, occ) in space.basis().enumerate() {
            prop_assert_eq!(space.index_of(&occ).unwrap(), i);
            prop_assert_eq!(space.occupation_at(i).unwrap(), occ);
        }
        prop_assert_eq!(space.occupation_at(space.dimension()), None);
    }

    #[test]
    fn tensor_is_associative(seed: u64, ma in 1usize..3, mb in 1usize..3, mc in 1usize..3) {
        let a = mixed_sector_state(seed, ma, 2);
        let b = mixed_sector_state(seed.wrapping_add(1), mb, 2);
        let c = mixed_sector_state(seed.wrapping_add(2), mc, 2);
        let left = a.tensor(&b).unwrap().tensor(&c).unwrap();
        let right = a.tensor(&b.tensor(&c).unwrap()).unwrap();
        prop_assert_eq!(left.support_len(), right.support_len());
        for (o, x) in left.terms() {
            prop_assert!((x - right.amplitude(o.counts())).norm() < 1e-12);
        }
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(seed: u64, modes in 1usize..5) {
        let a = mixed_sector_state(seed, modes, 3);
        let b = mixed_sector_state(seed.wrapping_add(7), modes, 3);
        let ab = a.inner_product(&b).unwrap();
        let ba = b.inner_product(&a).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-12);
    }

    #[test]
    fn elements_preserve_norm_and_photon_sectors(seed: u64, modes in 1usize..5) {
        let s = mixed_sector_state(seed, modes, 3);
        let e = random_element(seed, modes);
        let out = apply_element(&s, &e).unwrap();
        prop_assert!((out.norm_sqr() - s.norm_sqr()).abs() < 1e-12);
        let (before, after) = (sector_weights(&s), sector_weights(&out));
        for (n, w) in &after {
            prop_assert!((w - before.get(n).copied().unwrap_or(0.0)).abs() < 1e-12, "sector {}", n);
        }
    }

    #[test]
    fn sequential_and_permanent_kernels_agree(seed: u64, modes in 2usize..=5, photons in 1usize..=4) {
        let mut rng = seeded_rng(seed);
        let circuit = random_circuit(&mut rng, modes, 12).unwrap();
        let s = random_fock_state(&mut rng, modes, photons, 4).unwrap();
        let a = circuit.apply(&s).unwrap();
        let b = circuit.apply_via_permanent(&s).unwrap();
        for occ in s.space().basis() {
            prop_assert!((a.amplitude(occ.counts()) - b.amplitude(occ.counts())).norm() < 1e-10);
        }
    }

    #[test]
    fn outcome_probabilities_sum_to_norm(seed: u64, modes in 1usize..=5, pick in 1usize..=5) {
        let s = mixed_sector_state(seed, modes, 4).scaled(Complex64::new(0.6, 0.0));
        let measured: Vec<usize> = (0..modes.min(pick)).collect();
        let total: f64 = outcome_distribution(&s, &measured).unwrap().iter().map(|(_, p)| p).sum();
        prop_assert!((total - s.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn measuring_other_modes_does_not_change_marginals(seed: u64) {
        let s = mixed_sector_state(seed, 4, 3);
        let direct: BTreeMap<Vec<usize>, f64> = outcome_distribution(&s, &[2, 3])
            .unwrap()
            .into_iter()
            .map(|(p, w)| (p.counts, w))
            .collect();
        // Measure modes 0 and 1 first, then 2 and 3 in each branch.
        let mut staged: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (_, branch) in split_branches(&s, &[0, 1]).unwrap() {
            for (p, w) in outcome_distribution(&branch, &[0, 1]).unwrap() {
                *staged.entry(p.counts).or_insert(0.0) += w;
            }
        }
        prop_assert_eq!(direct.len(), staged.len());
        for (k, w) in &direct {
            prop_assert!((w - staged[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn qnd_check_is_idempotent(seed: u64) {
        let s = mixed_sector_state(seed, 3, 2);
        for branch in qnd_photon_presence(&s, [0, 1]).unwrap() {
            let again = qnd_photon_presence(&branch.post_state, [0, 1]).unwrap();
            prop_assert_eq!(again.len(), 1);
            prop_assert_eq!(again[0].presence, branch.presence);
            prop_assert!((again[0].probability - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ideal_detector_equals_plain_sampling(seed: u64, draw: u64) {
        let s = mixed_sector_state(seed, 3, 3);
        let a = sample_outcome(&s, &[0, 2], &mut seeded_rng(draw)).unwrap();
        let b = detect_with_model(&s, &[0, 2], &DetectorModel::ideal(), &mut seeded_rng(draw)).unwrap();
        prop_assert_eq!(a, b);
    }
}

fn two_qubit_amplitudes(seed: u64) -> Vec<Complex64> {
    random_amplitudes(&mut seeded_rng(seed), 4)
}

fn dual_rail_state(amps: &[Complex64]) -> PureState {
    let q = [DualRailQubit::at(0), DualRailQubit::at(1)];
    let terms: Vec<(Vec<u8>, Complex64)> = amps
        .iter()
        .enumerate()
        .map(|(x, a)| (vec![(x >> 1) as u8, (x & 1) as u8], *a))
        .collect();
    logical_state(4, &q, &terms).unwrap()
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn ns_herald_probability_is_input_independent(seed: u64) {
        let a = random_amplitudes(&mut seeded_rng(seed), 3);
        let space = FockSpace::new(1, 2).unwrap();
        let s = PureState::from_terms(space, [([0], a[0]), ([1], a[1]), ([2], a[2])]).unwrap();
        let r = ns_gate(&s, 0, &NsParameters::FROZEN).unwrap();
        prop_assert!((r.success_probability - 0.25).abs() < 1e-9);
        // Input photons plus the ancilla photon equal output plus herald.
        prop_assert_eq!(r.herald_pattern.total(), 1);
        for (o, _) in r.output_state.terms() {
            prop_assert!(o.total() <= 2);
            prop_assert!(a[o.total()].norm() > 0.0);
        }
    }

    #[test]
    fn csign_is_symmetric_under_exchange(seed: u64) {
        let amps = two_qubit_amplitudes(seed);
        let q = [DualRailQubit::at(0), DualRailQubit::at(1)];
        let ab = csign(&dual_rail_state(&amps), &q[0], &q[1], &NsParameters::FROZEN).unwrap();
        let ba = csign(&dual_rail_state(&amps), &q[1], &q[0], &NsParameters::FROZEN).unwrap();
        let (x, y) = (logical_amplitudes(&ab.output_state, &q), logical_amplitudes(&ba.output_state, &q));
        for k in 0..4 {
            prop_assert!((x[k] - y[k]).norm() < 1e-9);
        }
        prop_assert!((ab.success_probability - ba.success_probability).abs() < 1e-12);
        prop_assert_eq!(ab.output_state.photon_numbers(), [2].into());
    }

    #[test]
    fn conjugated_csign_acts_as_cnot(seed: u64) {
        let amps = two_qubit_amplitudes(seed);
        let q = [DualRailQubit::at(0), DualRailQubit::at(1)];
        let r = cnot_dual_rail(&dual_rail_state(&amps), &q[0], &q[1], &NsParameters::FROZEN).unwrap();
        let out = logical_amplitudes(&r.output_state, &q);
        let want = [amps[0], amps[1], amps[3], amps[2]];
        for k in 0..4 {
            prop_assert!((out[k] - want[k]).norm() < 1e-9);
        }
    }

    #[test]
    fn polarization_cnot_success_is_a_quarter(seed: u64) {
        let q = [PolarizationQubit::at(0), PolarizationQubit::at(1)];
        let s = random_logical_state(&mut seeded_rng(seed), 4, &q).unwrap();
        let branches = cnot_polarization_branches(&s, &q[0], &q[1]).unwrap();
        let p: f64 = branches.iter().filter(|b| b.accepted).map(|b| b.probability).sum();
        prop_assert!((p - 0.25).abs() < 1e-9);
        // Two input photons plus two ancilla photons.
        for b in &branches {
            for n in b.state.photon_numbers() {
                prop_assert_eq!(n + b.pattern.total(), 4);
            }
        }
    }

    #[test]
    fn teleportation_success_and_heralded_failure(seed: u64, n in 1usize..=3) {
        let q = DualRailQubit::at(0);
        let s = random_logical_state(&mut seeded_rng(seed), 2, &[q]).unwrap();
        let branches = teleport_branches(&s, &q, &make_resource(n).unwrap()).unwrap();
        let p: f64 = branches.iter().filter(|b| b.success()).map(|b| b.probability).sum();
        prop_assert!((p - n as f64 / (n + 1) as f64).abs() < 1e-9);
        for b in branches.iter().filter(|b| !b.success()) {
            prop_assert_eq!(b.measured_values().len(), 1);
        }
    }
}

proptest! {
    #![proptest_config(config(4))]

    #[test]
    fn teleported_csign_success_factorizes(seed: u64, n in 1usize..=2) {
        let q = [DualRailQubit::at(0), DualRailQubit::at(1)];
        let amps = two_qubit_amplitudes(seed);
        let resource = make_csign_resource(n, &NsParameters::FROZEN).unwrap();
        let branches = teleported_csign_branches(&dual_rail_state(&amps), &q[0], &q[1], &resource).unwrap();
        let p: f64 = branches.iter().filter(|b| b.success()).map(|b| b.probability).sum();
        let single = n as f64 / (n + 1) as f64;
        prop_assert!((p - single * single).abs() < 1e-9);
    }
}

fn experiment_strategy() -> impl Strategy<Value = Experiment> {
    prop_oneof![
        (1usize..5000, any::<bool>())
            .prop_map(|(inputs, solve)| Experiment::NsDemo { inputs, solve }),
        (0usize..50).prop_map(|superpositions| Experiment::CsignDemo { superpositions }),
        (0usize..50).prop_map(|superpositions| Experiment::CnotDemo { superpositions }),
        (2usize..500, 1e-3f64..10.0)
            .prop_map(|(points, theta_max)| Experiment::HomScan { points, theta_max }),
        proptest::collection::vec(1usize..=3, 1..4).prop_map(|ns| Experiment::TeleportScan { ns }),
        (1usize..100, 0.0f64..=1.0, 1usize..100_000).prop_map(
            |(cycles, per_cycle_loss, trajectories)| {
                Experiment::MemoryScan {
                    cycles,
                    per_cycle_loss,
                    trajectories,
                }
            }
        ),
        (1usize..1000, 2usize..=8, 1usize..=6, 1usize..100).prop_map(
            |(circuits, max_modes, max_photons, depth)| {
                Experiment::KernelCrosscheck {
                    circuits,
                    max_modes,
                    max_photons,
                    depth,
                }
            }
        ),
    ]
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn scenarios_round_trip(name in "[A-Za-z0-9_.-]{1,24}", seed: u64, experiment in experiment_strategy()) {
        let s = Scenario::new(name, seed, experiment);
        prop_assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
    }
}
