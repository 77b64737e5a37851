//! Teleportation gates built on the `n`-photon resource
//!
//! `|t_n⟩ = Σⱼ |1⟩^j|0⟩^{n−j} ⊗ |0⟩^j|1⟩^{n−j} / √(n+1)` on `2n` modes.
//!
//! Only the `b` rail of a dual-rail qubit is teleported; its photon number is
//! the logical value and rail `a` stays in place. The Bell measurement is the
//! `(n+1)`-mode discrete Fourier transform over the `b` rail and the first
//! `n` resource modes, followed by photon counting (a balanced beam splitter
//! when `n = 1`). With `k` photons counted, `1 ≤ k ≤ n`, the state sits in
//! second-half mode `k` and is moved back onto the `b` rail after a phase
//! correction. `k = 0` and `k = n + 1` measure the qubit in the logical
//! basis instead.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, Occupation, PureState};
use crate::gates::{
    append_state, apply_all, csign_modes, require_logical, DualRailQubit, HeraldedGateResult,
    NsParameters,
};
use crate::interferometer::{apply_unitary_on_modes, Element, ModeUnitary};
use crate::measurement::{seeded_rng, split_branches, DetectionPattern};

/// Largest resource size handled.
pub const MAX_RESOURCE_PHOTONS: usize = 3;

/// The entangled resource `|t_n⟩`. Modes `0..n` are the first half, consumed
/// by the Bell measurement; modes `n..2n` are the second half, which carries
/// the teleported state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceState {
    pub n: usize,
    pub state: PureState,
}

pub fn make_resource(n: usize) -> Result<ResourceState> {
    if n == 0 || n > MAX_RESOURCE_PHOTONS {
        return Err(Error::UnsupportedResource(n));
    }
    let space = FockSpace::new(2 * n, n)?;
    let amp = Complex64::new(1.0 / ((n + 1) as f64).sqrt(), 0.0);
    let terms = (0..=n).map(|j| {
        let mut counts = vec![0; 2 * n];
        counts[..j].fill(1);
        counts[n + j..].fill(1);
        (Occupation(counts), amp)
    });
    Ok(ResourceState {
        n,
        state: PureState::from_terms(space, terms)?,
    })
}

/// Resource for the teleported controlled sign: two copies of `|t_n⟩` with a
/// controlled sign applied between every pair of second-half modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsignResource {
    pub n: usize,
    /// Copy A on modes `0..2n`, copy B on `2n..4n`.
    pub state: PureState,
    /// Probability that all `n²` heralds fire in one attempt. Preparation is
    /// repeated until they do, so this never enters online probabilities.
    pub offline_success_probability: f64,
}

pub fn make_csign_resource(n: usize, params: &NsParameters) -> Result<CsignResource> {
    let r = make_resource(n)?;
    let mut state = r.state.tensor(&r.state)?;
    let mut offline = 1.0;
    for i in 0..n {
        for j in 0..n {
            let step = csign_modes(&state, n + i, 3 * n + j, params)?;
            offline *= step.success_probability;
            state = step.output_state;
        }
    }
    Ok(CsignResource {
        n,
        state,
        offline_success_probability: offline,
    })
}

/// What one teleporter reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TeleportOutcome {
    /// State recovered from second-half mode `k` (1-based).
    Success { k: usize },
    /// The input was measured with logical value `measured`.
    Failure { measured: u8 },
}

impl TeleportOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, TeleportOutcome::Success { .. })
    }
}

/// One detector pattern of an exact enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeleportBranch {
    pub pattern: DetectionPattern,
    /// Probability of the pattern for the normalized input.
    pub probability: f64,
    /// One entry per teleported qubit, in call order.
    pub outcomes: Vec<TeleportOutcome>,
    /// Normalized output on the input's modes, phase-corrected when every
    /// teleporter succeeded. Failed qubits are left in the measured basis
    /// state.
    pub state: PureState,
    pub corrections: Vec<String>,
}

impl TeleportBranch {
    pub fn success(&self) -> bool {
        self.outcomes.iter().all(TeleportOutcome::is_success)
    }

    pub fn measured_values(&self) -> Vec<(usize, u8)> {
        self.outcomes
            .iter()
            .enumerate()
            .filter_map(|(i, o)| match o {
                TeleportOutcome::Failure { measured } => Some((i, *measured)),
                TeleportOutcome::Success { .. } => None,
            })
            .collect()
    }
}

/// A teleporter: the rail whose photon number is sent, and the resource
/// modes (relative to the resource) it consumes and fills.
struct Port {
    input: usize,
    first: Vec<usize>,
    second: Vec<usize>,
}

struct RawBranch {
    pattern: DetectionPattern,
    ks: Vec<usize>,
    /// Unnormalized, on the input's modes.
    state: PureState,
}

/// Appends `resource`, runs every Bell measurement, and folds each branch
/// back onto the modes of `s`.
fn raw_branches(s: &PureState, ports: &[Port], resource: &PureState) -> Result<Vec<RawBranch>> {
    let (mut evolved, offset) = append_state(s, resource)?;
    let mut measured = Vec::new();
    for p in ports {
        let mut modes = vec![p.input];
        modes.extend(p.first.iter().map(|m| m + offset));
        evolved = apply_unitary_on_modes(&evolved, &ModeUnitary::fourier(modes.len()), &modes)?;
        measured.extend(modes);
    }
    let remaining: Vec<usize> = (0..evolved.mode_count())
        .filter(|m| !measured.contains(m))
        .collect();
    let position = |m: usize| remaining.binary_search(&m).expect("unmeasured mode");
    let mut out = Vec::new();
    for (pattern, branch) in split_branches(&evolved, &measured)? {
        let mut ks = Vec::with_capacity(ports.len());
        let mut cursor = 0;
        for p in ports {
            let width = 1 + p.first.len();
            ks.push(pattern.counts[cursor..cursor + width].iter().sum::<usize>());
            cursor += width;
        }
        let state = branch.map_terms(s.space(), |o, a| {
            let mut counts: Vec<usize> = (0..s.mode_count())
                .map(|m| {
                    if ports.iter().any(|p| p.input == m) {
                        0
                    } else {
                        o.get(position(m))
                    }
                })
                .collect();
            for (p, &k) in ports.iter().zip(&ks) {
                let n = p.first.len();
                counts[p.input] = match k {
                    0 => 0,
                    k if k > n => 1,
                    k => o.get(position(p.second[k - 1] + offset)),
                };
            }
            Some((Occupation(counts), a))
        });
        out.push(RawBranch { pattern, ks, state });
    }
    Ok(out)
}

/// Branch amplitudes for every logical basis input of the ports, keyed by
/// detector counts. Entry `x` of the vector is the amplitude with input bits
/// `x` (port 0 most significant).
fn calibrate(ports: &[Port], resource: &PureState) -> Result<BTreeMap<Vec<usize>, Vec<Complex64>>> {
    let count = ports.len();
    let space = FockSpace::new(count, count)?;
    let local: Vec<Port> = ports
        .iter()
        .enumerate()
        .map(|(i, p)| Port {
            input: i,
            first: p.first.clone(),
            second: p.second.clone(),
        })
        .collect();
    let mut table: BTreeMap<Vec<usize>, Vec<Complex64>> = BTreeMap::new();
    for x in 0..1usize << count {
        let bits: Vec<usize> = (0..count).map(|i| (x >> (count - 1 - i)) & 1).collect();
        let input = PureState::basis(space, bits.clone())?;
        for b in raw_branches(&input, &local, resource)? {
            let amp = b.state.amplitude(&bits);
            table
                .entry(b.pattern.counts)
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); 1 << count])[x] = amp;
        }
    }
    Ok(table)
}

fn enumerate(s: &PureState, ports: &[Port], resource: &PureState) -> Result<Vec<TeleportBranch>> {
    let input_norm = s.norm_sqr();
    if input_norm <= 0.0 {
        return Err(Error::ZeroState);
    }
    let table = calibrate(ports, resource)?;
    let count = ports.len();
    let mut out = Vec::new();
    for raw in raw_branches(s, ports, resource)? {
        let outcomes: Vec<TeleportOutcome> = ports
            .iter()
            .zip(&raw.ks)
            .map(|(p, &k)| match k {
                0 => TeleportOutcome::Failure { measured: 0 },
                k if k > p.first.len() => TeleportOutcome::Failure { measured: 1 },
                k => TeleportOutcome::Success { k },
            })
            .collect();
        let mut state = raw.state;
        let mut corrections = Vec::new();
        if outcomes.iter().all(TeleportOutcome::is_success) {
            let amps = &table[&raw.pattern.counts];
            let mut elements = Vec::new();
            for (i, p) in ports.iter().enumerate() {
                let one = amps[1 << (count - 1 - i)];
                if amps[0].norm() == 0.0 || one.norm() == 0.0 {
                    continue;
                }
                let phi = (amps[0] / one).arg();
                if phi.abs() > 1e-15 {
                    elements.push(Element::phaseshift(phi, p.input));
                    corrections.push(format!("phase {phi:.12} on mode {}", p.input));
                }
            }
            state = apply_all(&state, &elements)?;
        }
        let (state, p) = state.normalize()?;
        out.push(TeleportBranch {
            pattern: raw.pattern,
            probability: p / input_norm,
            outcomes,
            state,
            corrections,
        });
    }
    Ok(out)
}

fn resource_port(q: &DualRailQubit, n: usize, first_offset: usize, second_offset: usize) -> Port {
    Port {
        input: q.mode_b,
        first: (first_offset..first_offset + n).collect(),
        second: (second_offset..second_offset + n).collect(),
    }
}

/// Every detector pattern of the teleportation of `q` through `r`.
pub fn teleport_branches(
    s: &PureState,
    q: &DualRailQubit,
    r: &ResourceState,
) -> Result<Vec<TeleportBranch>> {
    require_logical(s, &[*q])?;
    enumerate(s, &[resource_port(q, r.n, 0, r.n)], &r.state)
}

fn sample_result(branches: Vec<TeleportBranch>, seed: u64) -> HeraldedGateResult {
    let success_probability = branches
        .iter()
        .filter(|b| b.success())
        .map(|b| b.probability)
        .sum();
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    let target = seeded_rng(seed).random::<f64>() * total;
    let mut acc = 0.0;
    let mut chosen = branches.len() - 1;
    for (i, b) in branches.iter().enumerate() {
        acc += b.probability;
        if target < acc {
            chosen = i;
            break;
        }
    }
    let b = branches
        .into_iter()
        .nth(chosen)
        .expect("nonempty enumeration");
    HeraldedGateResult {
        success: b.success(),
        measured_values: b.measured_values(),
        herald_pattern: b.pattern,
        success_probability,
        output_state: b.state,
        corrections_applied: b.corrections,
    }
}

/// Teleports `q` through `r`, drawing the detector pattern from `seed`. On
/// success the qubit is back on its own rails; on failure it has been
/// measured and left in the reported basis state.
pub fn teleport_qubit(
    s: &PureState,
    q: &DualRailQubit,
    r: &ResourceState,
    seed: u64,
) -> Result<HeraldedGateResult> {
    Ok(sample_result(teleport_branches(s, q, r)?, seed))
}

/// Every detector pattern of the online phase of the teleported controlled
/// sign: `qa` goes through copy A of `resource`, `qb` through copy B.
pub fn teleported_csign_branches(
    s: &PureState,
    qa: &DualRailQubit,
    qb: &DualRailQubit,
    resource: &CsignResource,
) -> Result<Vec<TeleportBranch>> {
    require_logical(s, &[*qa, *qb])?;
    let n = resource.n;
    let ports = [
        resource_port(qa, n, 0, n),
        resource_port(qb, n, 2 * n, 3 * n),
    ];
    enumerate(s, &ports, &resource.state)
}

/// Controlled sign by teleporting both qubits through a resource that already
/// carries the gate. The resource is prepared offline; only the two online
/// teleportations count toward `success_probability`.
pub fn teleported_csign(
    s: &PureState,
    qa: &DualRailQubit,
    qb: &DualRailQubit,
    n: usize,
    params: &NsParameters,
    seed: u64,
) -> Result<HeraldedGateResult> {
    require_logical(s, &[*qa, *qb])?;
    let resource = make_csign_resource(n, params)?;
    Ok(sample_result(
        teleported_csign_branches(s, qa, qb, &resource)?,
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{logical_amplitudes, logical_state};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubit_state(alpha: Complex64, beta: Complex64) -> PureState {
        logical_state(
            2,
            &[DualRailQubit::at(0)],
            &[(vec![0], alpha), (vec![1], beta)],
        )
        .unwrap()
    }

    #[test]
    fn resource_for_one_photon() {
        let r = make_resource(1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.state.amplitude(&[0, 1]) - c(h, 0.0)).norm() < 1e-15);
        assert!((r.state.amplitude(&[1, 0]) - c(h, 0.0)).norm() < 1e-15);
        assert_eq!(r.state.support_len(), 2);
    }

    #[test]
    fn resource_terms_and_photon_count() {
        for n in 1..=3 {
            let r = make_resource(n).unwrap();
            assert_eq!(r.state.support_len(), n + 1);
            assert_eq!(
                r.state.photon_numbers().into_iter().collect::<Vec<_>>(),
                vec![n]
            );
            assert!((r.state.norm_sqr() - 1.0).abs() < 1e-14);
        }
        let r2 = make_resource(2).unwrap();
        let k = 1.0 / 3f64.sqrt();
        for occ in [[0, 0, 1, 1], [1, 0, 0, 1], [1, 1, 0, 0]] {
            assert!((r2.state.amplitude(&occ).re - k).abs() < 1e-15);
        }
        assert_eq!(make_resource(0), Err(Error::UnsupportedResource(0)));
        assert_eq!(make_resource(4), Err(Error::UnsupportedResource(4)));
    }

    #[test]
    fn success_probability_is_n_over_n_plus_one() {
        let s = qubit_state(c(0.6, 0.0), c(0.0, 0.8));
        for n in 1..=3 {
            let r = make_resource(n).unwrap();
            let branches = teleport_branches(&s, &DualRailQubit::at(0), &r).unwrap();
            let p: f64 = branches
                .iter()
                .filter(|b| b.success())
                .map(|b| b.probability)
                .sum();
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            assert!((p - n as f64 / (n + 1) as f64).abs() < 1e-9, "n={n}: {p}");
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn successful_branches_reproduce_the_input() {
        let s = qubit_state(c(0.36, 0.48), c(-0.8, 0.0));
        for n in 1..=3 {
            let r = make_resource(n).unwrap();
            for b in teleport_branches(&s, &DualRailQubit::at(0), &r).unwrap() {
                if b.success() {
                    assert!(
                        (b.state.fidelity(&s).unwrap() - 1.0).abs() < 1e-9,
                        "n={n} {}",
                        b.pattern
                    );
                }
            }
        }
    }

    #[test]
    fn failures_measure_the_input() {
        let zero = qubit_state(c(1.0, 0.0), c(0.0, 0.0));
        let r = make_resource(2).unwrap();
        for b in teleport_branches(&zero, &DualRailQubit::at(0), &r).unwrap() {
            if !b.success() {
                assert_eq!(b.measured_values(), vec![(0, 0)]);
                assert!((b.state.fidelity(&zero).unwrap() - 1.0).abs() < 1e-12);
            }
        }
        let s = qubit_state(c(0.6, 0.0), c(0.8, 0.0));
        let mut failed = [0.0; 2];
        for b in teleport_branches(&s, &DualRailQubit::at(0), &r).unwrap() {
            if let TeleportOutcome::Failure { measured } = b.outcomes[0] {
                failed[measured as usize] += b.probability;
            }
        }
        assert!((failed[0] - 0.36 / 3.0).abs() < 1e-9);
        assert!((failed[1] - 0.64 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn sampled_teleport_is_seed_deterministic() {
        let s = qubit_state(c(0.6, 0.0), c(0.8, 0.0));
        let r = make_resource(2).unwrap();
        let a = teleport_qubit(&s, &DualRailQubit::at(0), &r, 11).unwrap();
        let b = teleport_qubit(&s, &DualRailQubit::at(0), &r, 11).unwrap();
        assert_eq!(a, b);
        assert!((a.success_probability - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn non_logical_input_is_rejected() {
        let space = FockSpace::new(2, 2).unwrap();
        let s = PureState::basis(space, [1, 1]).unwrap();
        let r = make_resource(1).unwrap();
        assert!(matches!(
            teleport_branches(&s, &DualRailQubit::at(0), &r),
            Err(Error::NonLogicalInput { .. })
        ));
    }

    fn two_qubits() -> [DualRailQubit; 2] {
        [DualRailQubit::at(0), DualRailQubit::at(1)]
    }

    #[test]
    fn teleported_csign_online_success_is_a_quarter() {
        let q = two_qubits();
        let resource = make_csign_resource(1, &NsParameters::FROZEN).unwrap();
        for bits in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let s = logical_state(4, &q, &[(bits.to_vec(), c(1.0, 0.0))]).unwrap();
            let branches = teleported_csign_branches(&s, &q[0], &q[1], &resource).unwrap();
            let p: f64 = branches
                .iter()
                .filter(|b| b.success())
                .map(|b| b.probability)
                .sum();
            assert!((p - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn teleported_csign_flips_only_eleven() {
        let q = two_qubits();
        let h = 0.5;
        let input = [c(h, 0.0), c(0.0, h), c(-h, 0.0), c(h, 0.0)];
        let terms: Vec<(Vec<u8>, Complex64)> = (0..4)
            .map(|i| (vec![(i >> 1) as u8, (i & 1) as u8], input[i]))
            .collect();
        let s = logical_state(4, &q, &terms).unwrap();
        let mut want = input;
        want[3] = -want[3];
        for n in 1..=2 {
            let resource = make_csign_resource(n, &NsParameters::FROZEN).unwrap();
            let branches = teleported_csign_branches(&s, &q[0], &q[1], &resource).unwrap();
            let mut p = 0.0;
            for b in branches.iter().filter(|b| b.success()) {
                p += b.probability;
                let amps = logical_amplitudes(&b.state, &q);
                let overlap: Complex64 = amps.iter().zip(&want).map(|(a, w)| w.conj() * a).sum();
                assert!(
                    (overlap.norm() - 1.0).abs() < 1e-9,
                    "n={n} {}: {amps:?}",
                    b.pattern
                );
            }
            let t = n as f64 / (n + 1) as f64;
            assert!((p - t * t).abs() < 1e-9);
        }
    }
}
