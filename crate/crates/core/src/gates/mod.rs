//! Heralded linear-optics gates on dual-rail and polarization qubits.
//!
//! Every gate appends its ancilla modes after the modes of the input state,
//! runs a passive circuit, and conditions on a count pattern on the ancillas.
//! The ancilla modes are removed again, so on success the output state lives
//! on the same modes as the input.

mod cnot;
mod csign;
mod ns;

pub use cnot::{
    bell_pair, cnot_polarization, cnot_polarization_branches, derive_cnot_feed_forward, CnotBranch,
    DerivedRule, FeedForwardRule, CNOT_FEED_FORWARD,
};
pub use csign::{cnot_dual_rail, csign, csign_modes};
pub use ns::{ns_gate, solve_ns_parameters, NsParameters, NS_SUCCESS_PROBABILITY};

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, Occupation, PureState};
use crate::interferometer::{apply_element, Element};
use crate::measurement::DetectionPattern;

/// Largest logical-subspace leakage a gate input may carry.
pub const LEAKAGE_TOLERANCE: f64 = 1e-12;

/// A qubit carried by one photon shared between two modes. Logical `0` is the
/// photon in `rails()[0]`, logical `1` the photon in `rails()[1]`.
pub trait LogicalQubit {
    fn rails(&self) -> [usize; 2];
}

/// Dual-rail encoding: `|0⟩_L = |1⟩_a|0⟩_b`, `|1⟩_L = |0⟩_a|1⟩_b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualRailQubit {
    pub mode_a: usize,
    pub mode_b: usize,
}

impl DualRailQubit {
    pub fn new(mode_a: usize, mode_b: usize) -> Result<Self> {
        if mode_a == mode_b {
            return Err(Error::RepeatedMode(mode_a));
        }
        Ok(DualRailQubit { mode_a, mode_b })
    }

    /// Qubit `index` of a register laid out as consecutive rail pairs.
    pub fn at(index: usize) -> Self {
        DualRailQubit {
            mode_a: 2 * index,
            mode_b: 2 * index + 1,
        }
    }
}

impl LogicalQubit for DualRailQubit {
    fn rails(&self) -> [usize; 2] {
        [self.mode_a, self.mode_b]
    }
}

/// Polarization encoding of one spatial path: `|H⟩ = 0`, `|V⟩ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizationQubit {
    pub rail_h: usize,
    pub rail_v: usize,
}

impl PolarizationQubit {
    pub fn new(rail_h: usize, rail_v: usize) -> Result<Self> {
        if rail_h == rail_v {
            return Err(Error::RepeatedMode(rail_h));
        }
        Ok(PolarizationQubit { rail_h, rail_v })
    }

    pub fn at(index: usize) -> Self {
        PolarizationQubit {
            rail_h: 2 * index,
            rail_v: 2 * index + 1,
        }
    }
}

impl LogicalQubit for PolarizationQubit {
    fn rails(&self) -> [usize; 2] {
        [self.rail_h, self.rail_v]
    }
}

/// Outcome of a heralded gate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeraldedGateResult {
    pub success: bool,
    pub herald_pattern: DetectionPattern,
    /// Total probability of the accepted heralds for this input.
    pub success_probability: f64,
    /// Normalized state of the surviving modes for the realized herald.
    pub output_state: PureState,
    pub corrections_applied: Vec<String>,
    /// Logical values revealed by a failed herald, as `(qubit, value)`.
    pub measured_values: Vec<(usize, u8)>,
}

/// Outcome probabilities over logical bitstrings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalReadout {
    pub probabilities: BTreeMap<String, f64>,
    /// Weight outside the logical subspace, as a fraction of `‖s‖²`.
    pub leakage: f64,
}

/// Probabilities of logical bitstrings (qubit 0 leftmost), marginalized over
/// all modes that are not rails of `qubits`.
pub fn logical_readout<Q: LogicalQubit>(s: &PureState, qubits: &[Q]) -> Result<LogicalReadout> {
    let total = s.norm_sqr();
    if total <= 0.0 {
        return Err(Error::ZeroState);
    }
    for q in qubits {
        s.space().check_modes(&q.rails())?;
    }
    let mut probabilities = BTreeMap::new();
    let mut logical = 0.0;
    for (o, a) in s.terms() {
        if let Some(bits) = logical_bits(o, qubits) {
            let key: String = bits
                .iter()
                .map(|b| if *b == 1 { '1' } else { '0' })
                .collect();
            *probabilities.entry(key).or_insert(0.0) += a.norm_sqr() / total;
            logical += a.norm_sqr();
        }
    }
    Ok(LogicalReadout {
        probabilities,
        leakage: ((total - logical) / total).max(0.0),
    })
}

fn logical_bits<Q: LogicalQubit>(o: &Occupation, qubits: &[Q]) -> Option<Vec<u8>> {
    qubits
        .iter()
        .map(|q| {
            let [r0, r1] = q.rails();
            match (o.get(r0), o.get(r1)) {
                (1, 0) => Some(0),
                (0, 1) => Some(1),
                _ => None,
            }
        })
        .collect()
}

/// Fraction of `‖s‖²` lying outside the logical subspace of `qubits`.
pub fn logical_leakage<Q: LogicalQubit>(s: &PureState, qubits: &[Q]) -> Result<f64> {
    Ok(logical_readout(s, qubits)?.leakage)
}

pub(crate) fn require_logical<Q: LogicalQubit>(s: &PureState, qubits: &[Q]) -> Result<()> {
    let leakage = logical_leakage(s, qubits)?;
    if leakage > LEAKAGE_TOLERANCE {
        return Err(Error::NonLogicalInput { leakage });
    }
    Ok(())
}

/// Builds `Σ amplitude·|bits⟩_L` on `mode_count` modes, with every mode that
/// is not a rail of `qubits` in vacuum. `bits[k]` belongs to `qubits[k]`.
pub fn logical_state<Q: LogicalQubit>(
    mode_count: usize,
    qubits: &[Q],
    terms: &[(Vec<u8>, Complex64)],
) -> Result<PureState> {
    let space = FockSpace::new(mode_count, qubits.len())?;
    for q in qubits {
        space.check_modes(&q.rails())?;
    }
    let mut occs = Vec::with_capacity(terms.len());
    for (bits, amp) in terms {
        if bits.len() != qubits.len() {
            return Err(Error::OccupationLength {
                expected: qubits.len(),
                got: bits.len(),
            });
        }
        let mut counts = vec![0; mode_count];
        for (q, &b) in qubits.iter().zip(bits) {
            counts[q.rails()[(b != 0) as usize]] += 1;
        }
        occs.push((Occupation(counts), *amp));
    }
    PureState::from_terms(space, occs)
}

/// Amplitudes on the logical basis of `qubits`, indexed by the bitstring read
/// as a binary number with qubit 0 most significant. Non-qubit modes must be
/// in vacuum for a term to count.
pub fn logical_amplitudes<Q: LogicalQubit>(s: &PureState, qubits: &[Q]) -> Vec<Complex64> {
    let n = qubits.len();
    let rails: Vec<usize> = qubits.iter().flat_map(|q| q.rails()).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (o, a) in s.terms() {
        let outside: usize = (0..o.len())
            .filter(|m| !rails.contains(m))
            .map(|m| o.get(m))
            .sum();
        if outside != 0 {
            continue;
        }
        if let Some(bits) = logical_bits(o, qubits) {
            let index = bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize);
            out[index] += a;
        }
    }
    out
}

/// Appends ancilla modes prepared in the basis state `ancilla`, returning the
/// extended state and the index of the first ancilla mode.
pub(crate) fn append_ancillas(s: &PureState, ancilla: &[usize]) -> Result<(PureState, usize)> {
    let photons: usize = ancilla.iter().sum();
    let anc_space = FockSpace::new(ancilla.len(), photons)?;
    let anc = PureState::basis(anc_space, ancilla.to_vec())?;
    let first = s.mode_count();
    Ok((s.tensor(&anc)?, first))
}

/// Appends an arbitrary ancilla state after the modes of `s`.
pub(crate) fn append_state(s: &PureState, ancilla: &PureState) -> Result<(PureState, usize)> {
    let first = s.mode_count();
    Ok((s.tensor(ancilla)?, first))
}

pub(crate) fn apply_all(s: &PureState, elements: &[Element]) -> Result<PureState> {
    elements
        .iter()
        .try_fold(s.clone(), |acc, e| apply_element(&acc, e))
}

/// Elements that exchange modes `i` and `j` exactly.
pub(crate) fn swap_elements(i: usize, j: usize) -> [Element; 2] {
    [
        Element::beamsplitter(std::f64::consts::FRAC_PI_2, 0.0, i, j),
        Element::phaseshift(std::f64::consts::PI, i),
    ]
}

/// Single-qubit Pauli correction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Z,
}

impl Pauli {
    /// Optical elements realizing the Pauli on a photon shared by `rails`.
    pub fn elements(self, rails: [usize; 2]) -> Vec<Element> {
        match self {
            Pauli::X => swap_elements(rails[0], rails[1]).to_vec(),
            Pauli::Z => vec![Element::phaseshift(std::f64::consts::PI, rails[1])],
        }
    }
}

/// Rotation of a dual-rail qubit by a beam splitter between its rails.
pub fn single_qubit_gate(
    s: &PureState,
    q: &DualRailQubit,
    theta: f64,
    phi: f64,
) -> Result<PureState> {
    apply_element(s, &Element::beamsplitter(theta, phi, q.mode_a, q.mode_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_angle_rotation_is_identity() {
        let q = DualRailQubit::at(0);
        let s = logical_state(
            2,
            &[q],
            &[(vec![0], c(0.6)), (vec![1], Complex64::new(0.0, 0.8))],
        )
        .unwrap();
        let out = single_qubit_gate(&s, &q, 0.0, 0.7).unwrap();
        assert!((out.fidelity(&s).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn balanced_rotation_makes_plus_state() {
        let q = DualRailQubit::at(0);
        let zero = logical_state(2, &[q], &[(vec![0], c(1.0))]).unwrap();
        let out = single_qubit_gate(&zero, &q, FRAC_PI_4, 0.0).unwrap();
        let amps = logical_amplitudes(&out, &[q]);
        assert!((amps[0] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((amps[1] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn rotations_compose_additively() {
        // 2×2 product oracle: R(θ₂)R(θ₁) = R(θ₁+θ₂) for real rotations.
        let rot = |t: f64| [[t.cos(), -t.sin()], [t.sin(), t.cos()]];
        let q = DualRailQubit::at(0);
        let (t1, t2) = (0.31, 1.12);
        let (r1, r2) = (rot(t1), rot(t2));
        let mut prod = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                prod[i][j] = (0..2).map(|k| r2[i][k] * r1[k][j]).sum();
            }
        }
        let direct = rot(t1 + t2);
        for bit in 0..2u8 {
            let s = logical_state(2, &[q], &[(vec![bit], c(1.0))]).unwrap();
            let two = single_qubit_gate(&single_qubit_gate(&s, &q, t1, 0.0).unwrap(), &q, t2, 0.0)
                .unwrap();
            let amps = logical_amplitudes(&two, &[q]);
            for row in 0..2 {
                assert!((amps[row].re - prod[row][bit as usize]).abs() < 1e-12);
                assert!((amps[row].re - direct[row][bit as usize]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn readout_of_logical_states() {
        let q = DualRailQubit::at(0);
        let zero = logical_state(2, &[q], &[(vec![0], c(1.0))]).unwrap();
        let r = logical_readout(&zero, &[q]).unwrap();
        assert_eq!(r.probabilities.get("0"), Some(&1.0));
        assert_eq!(r.leakage, 0.0);

        let plus = logical_state(
            2,
            &[q],
            &[(vec![0], c(FRAC_1_SQRT_2)), (vec![1], c(FRAC_1_SQRT_2))],
        )
        .unwrap();
        let r = logical_readout(&plus, &[q]).unwrap();
        assert!((r.probabilities["0"] - 0.5).abs() < 1e-15);
        assert!((r.probabilities["1"] - 0.5).abs() < 1e-15);

        let leaky = PureState::from_terms(
            FockSpace::new(2, 2).unwrap(),
            [([1, 0], c(FRAC_1_SQRT_2)), ([1, 1], c(FRAC_1_SQRT_2))],
        )
        .unwrap();
        let r = logical_readout(&leaky, &[q]).unwrap();
        assert!((r.leakage - 0.5).abs() < 1e-15);
        assert!(matches!(
            require_logical(&leaky, &[q]),
            Err(Error::NonLogicalInput { .. })
        ));
    }

    #[test]
    fn pauli_elements_act_logically() {
        let q = DualRailQubit::at(0);
        let s = logical_state(2, &[q], &[(vec![0], c(0.6)), (vec![1], c(0.8))]).unwrap();
        let x = apply_all(&s, &Pauli::X.elements(q.rails())).unwrap();
        let amps = logical_amplitudes(&x, &[q]);
        assert!((amps[0] - c(0.8)).norm() < 1e-15 && (amps[1] - c(0.6)).norm() < 1e-15);
        let z = apply_all(&s, &Pauli::Z.elements(q.rails())).unwrap();
        let amps = logical_amplitudes(&z, &[q]);
        assert!((amps[0] - c(0.6)).norm() < 1e-15 && (amps[1] - c(-0.8)).norm() < 1e-15);
    }

    #[test]
    fn qubit_constructors_reject_shared_rails() {
        assert!(DualRailQubit::new(1, 1).is_err());
        assert!(PolarizationQubit::new(2, 2).is_err());
    }
}
