//! Random states and circuits for scans and cross-checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::fock::{sector, FockSpace, PureState};
use crate::gates::{logical_state, LogicalQubit};
use crate::interferometer::{Element, OpticalCircuit};

/// `k` complex Gaussian amplitudes normalized to unit length, which makes the
/// vector uniformly distributed on the unit sphere.
pub fn random_amplitudes<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..k)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// Random normalized superposition over the logical basis of `qubits`.
pub fn random_logical_state<R: Rng + ?Sized, Q: LogicalQubit>(
    rng: &mut R,
    mode_count: usize,
    qubits: &[Q],
) -> Result<PureState> {
    let n = qubits.len();
    let amps = random_amplitudes(rng, 1 << n);
    let terms: Vec<(Vec<u8>, Complex64)> = amps
        .into_iter()
        .enumerate()
        .map(|(x, a)| ((0..n).map(|i| ((x >> (n - 1 - i)) & 1) as u8).collect(), a))
        .collect();
    logical_state(mode_count, qubits, &terms)
}

/// Random circuit of `depth` beam splitters and phase shifters on
/// `mode_count ≥ 2` modes.
pub fn random_circuit<R: Rng + ?Sized>(
    rng: &mut R,
    mode_count: usize,
    depth: usize,
) -> Result<OpticalCircuit> {
    let mut elements = Vec::with_capacity(depth);
    for _ in 0..depth {
        if rng.random_bool(0.7) {
            let pair = sample(rng, mode_count, 2);
            elements.push(Element::beamsplitter(
                rng.random_range(-PI..PI),
                rng.random_range(-PI..PI),
                pair.index(0),
                pair.index(1),
            ));
        } else {
            elements.push(Element::phaseshift(
                rng.random_range(-PI..PI),
                rng.random_range(0..mode_count),
            ));
        }
    }
    OpticalCircuit::from_elements(mode_count, elements)
}

/// Random normalized superposition of up to `max_terms` basis states with
/// exactly `photons` photons on `mode_count` modes.
pub fn random_fock_state<R: Rng + ?Sized>(
    rng: &mut R,
    mode_count: usize,
    photons: usize,
    max_terms: usize,
) -> Result<PureState> {
    let space = FockSpace::new(mode_count, photons)?;
    let basis = sector(mode_count, photons);
    let k = rng.random_range(1..=max_terms.min(basis.len()).max(1));
    let picked = sample(rng, basis.len(), k);
    let amps = random_amplitudes(rng, k);
    PureState::from_terms(
        space,
        picked.iter().zip(amps).map(|(i, a)| (basis[i].clone(), a)),
    )
}
