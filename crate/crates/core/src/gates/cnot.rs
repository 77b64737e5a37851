//! Probabilistic CNOT on polarization qubits with two polarizing beam
//! splitters, an entangled ancilla pair and feed-forward.
//!
//! Layout, with ancilla photons `x` and `y` sharing `(|HH⟩+|VV⟩)/√2`:
//!
//! * PBS 1 mixes the control with `x` in the H/V basis; the `x` port is
//!   read in the diagonal basis by detector 1.
//! * PBS 2 mixes the target with `y` in the diagonal basis (half-wave
//!   rotations before and after); the `y` port is read in H/V by detector 2.
//!
//! A polarizing beam splitter transmits H and reflects V, modelled as an
//! exchange of the two V rails. The gate is accepted when each detector sees
//! exactly one photon; the pattern then selects Pauli corrections from
//! [`CNOT_FEED_FORWARD`].

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::ns::restore_cutoff;
use super::{
    append_state, apply_all, logical_amplitudes, logical_state, require_logical, swap_elements,
    HeraldedGateResult, LogicalQubit, Pauli, PolarizationQubit,
};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, PureState};
use crate::interferometer::Element;
use crate::measurement::{split_branches, DetectionPattern};

/// Corrections for one accepted detector pattern. Counts are
/// `[H, V]` after each detector's wave plate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FeedForwardRule {
    pub detector_1: [usize; 2],
    pub detector_2: [usize; 2],
    pub control: &'static [Pauli],
    pub target: &'static [Pauli],
}

/// Accepted herald patterns and their corrections.
pub const CNOT_FEED_FORWARD: [FeedForwardRule; 4] = [
    FeedForwardRule {
        detector_1: [0, 1],
        detector_2: [0, 1],
        control: &[],
        target: &[Pauli::X],
    },
    FeedForwardRule {
        detector_1: [0, 1],
        detector_2: [1, 0],
        control: &[],
        target: &[],
    },
    FeedForwardRule {
        detector_1: [1, 0],
        detector_2: [0, 1],
        control: &[Pauli::Z],
        target: &[Pauli::X],
    },
    FeedForwardRule {
        detector_1: [1, 0],
        detector_2: [1, 0],
        control: &[Pauli::Z],
        target: &[],
    },
];

/// `(|HH⟩ + |VV⟩)/√2` on two polarization qubits; every other mode up to the
/// largest rail index is vacuum.
pub fn bell_pair(qa: &PolarizationQubit, qb: &PolarizationQubit) -> Result<PureState> {
    let rails = [qa.rail_h, qa.rail_v, qb.rail_h, qb.rail_v];
    let mut sorted = rails;
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::RepeatedMode(w[0]));
    }
    let k = std::f64::consts::FRAC_1_SQRT_2;
    logical_state(
        sorted[3] + 1,
        &[*qa, *qb],
        &[
            (vec![0, 0], Complex64::new(k, 0.0)),
            (vec![1, 1], Complex64::new(k, 0.0)),
        ],
    )
}

fn network(control: &PolarizationQubit, target: &PolarizationQubit, first: usize) -> Vec<Element> {
    let x = PolarizationQubit::at(0);
    let y = PolarizationQubit::at(1);
    let (xh, xv) = (first + x.rail_h, first + x.rail_v);
    let (yh, yv) = (first + y.rail_h, first + y.rail_v);
    let mut e = Vec::new();
    e.extend(swap_elements(control.rail_v, xv));
    e.push(Element::beamsplitter(FRAC_PI_4, 0.0, xh, xv));
    e.push(Element::beamsplitter(FRAC_PI_4, 0.0, yh, yv));
    e.push(Element::beamsplitter(
        FRAC_PI_4,
        0.0,
        target.rail_h,
        target.rail_v,
    ));
    e.extend(swap_elements(target.rail_v, yv));
    e.push(Element::beamsplitter(
        -FRAC_PI_4,
        0.0,
        target.rail_h,
        target.rail_v,
    ));
    e.push(Element::beamsplitter(-FRAC_PI_4, 0.0, yh, yv));
    e
}

fn is_accepted(counts: &[usize]) -> bool {
    counts[0] + counts[1] == 1 && counts[2] + counts[3] == 1
}

fn rule_for(counts: &[usize]) -> Option<&'static FeedForwardRule> {
    CNOT_FEED_FORWARD
        .iter()
        .find(|r| counts[..2] == r.detector_1 && counts[2..] == r.detector_2)
}

fn correction_elements(
    control: &PolarizationQubit,
    target: &PolarizationQubit,
    on_control: &[Pauli],
    on_target: &[Pauli],
) -> (Vec<Element>, Vec<String>) {
    let mut elements = Vec::new();
    let mut labels = Vec::new();
    for p in on_control {
        elements.extend(p.elements(control.rails()));
        labels.push(format!("{p:?}(control)"));
    }
    for p in on_target {
        elements.extend(p.elements(target.rails()));
        labels.push(format!("{p:?}(target)"));
    }
    (elements, labels)
}

/// One detector outcome of the polarization CNOT.
#[derive(Clone, Debug, PartialEq)]
pub struct CnotBranch {
    pub pattern: DetectionPattern,
    /// Probability relative to the input norm.
    pub probability: f64,
    pub accepted: bool,
    pub corrections: Vec<String>,
    /// Normalized state of the input modes, corrected when accepted.
    pub state: PureState,
}

fn raw_branches(
    s: &PureState,
    control: &PolarizationQubit,
    target: &PolarizationQubit,
) -> Result<Vec<(DetectionPattern, PureState)>> {
    require_logical(s, &[*control, *target])?;
    s.space()
        .check_modes(&[control.rail_h, control.rail_v, target.rail_h, target.rail_v])?;
    let ancilla = bell_pair(&PolarizationQubit::at(0), &PolarizationQubit::at(1))?;
    let (extended, first) = append_state(s, &ancilla)?;
    let evolved = apply_all(&extended, &network(control, target, first))?;
    let detectors: Vec<usize> = (first..first + 4).collect();
    split_branches(&evolved, &detectors)
}

/// Every detector outcome, evaluated exactly.
pub fn cnot_polarization_branches(
    s: &PureState,
    control: &PolarizationQubit,
    target: &PolarizationQubit,
) -> Result<Vec<CnotBranch>> {
    let input_norm = s.norm_sqr();
    let mut out = Vec::new();
    for (pattern, branch) in raw_branches(s, control, target)? {
        let probability = branch.norm_sqr() / input_norm;
        let branch = restore_cutoff(branch, s.space());
        let accepted = is_accepted(&pattern.counts);
        let (state, corrections) = match rule_for(&pattern.counts).filter(|_| accepted) {
            Some(rule) => {
                let (elements, labels) =
                    correction_elements(control, target, rule.control, rule.target);
                (apply_all(&branch, &elements)?, labels)
            }
            None => (branch, Vec::new()),
        };
        out.push(CnotBranch {
            pattern,
            probability,
            accepted,
            corrections,
            state: state.normalize()?.0,
        });
    }
    Ok(out)
}

/// Runs the gate once: the herald is drawn from `rng` with its exact
/// probability, and `success_probability` is the total weight of the
/// accepted heralds.
pub fn cnot_polarization<R: Rng + ?Sized>(
    s: &PureState,
    control: &PolarizationQubit,
    target: &PolarizationQubit,
    rng: &mut R,
) -> Result<HeraldedGateResult> {
    let branches = cnot_polarization_branches(s, control, target)?;
    let success_probability: f64 = branches
        .iter()
        .filter(|b| b.accepted)
        .map(|b| b.probability)
        .sum();
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    let draw = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut chosen = branches.last().expect("at least one branch");
    for b in &branches {
        acc += b.probability;
        if draw < acc {
            chosen = b;
            break;
        }
    }
    Ok(HeraldedGateResult {
        success: chosen.accepted,
        herald_pattern: chosen.pattern.clone(),
        success_probability,
        output_state: chosen.state.clone(),
        corrections_applied: chosen.corrections.clone(),
        measured_values: Vec::new(),
    })
}

/// Detector counts `[H₁, V₁, H₂, V₂]` with the Paulis on control and target.
pub type DerivedRule = ([usize; 4], Vec<Pauli>, Vec<Pauli>);

/// Recomputes the feed-forward table by exact simulation: for every
/// accepted pattern, the uncorrected logical map is extracted from the four
/// basis inputs and the smallest Pauli correction turning it into CNOT (up
/// to a global phase) is selected.
pub fn derive_cnot_feed_forward() -> Result<Vec<DerivedRule>> {
    let control = PolarizationQubit::at(0);
    let target = PolarizationQubit::at(1);
    let qubits = [control, target];
    // columns[input] = raw output amplitudes per accepted pattern
    let mut raw: std::collections::BTreeMap<Vec<usize>, [Vec<Complex64>; 4]> = Default::default();
    for input in 0..4usize {
        let bits = vec![(input >> 1) as u8, (input & 1) as u8];
        let s = logical_state(4, &qubits, &[(bits, Complex64::new(1.0, 0.0))])?;
        for (pattern, branch) in raw_branches(&s, &control, &target)? {
            if !is_accepted(&pattern.counts) {
                continue;
            }
            let entry = raw.entry(pattern.counts.clone()).or_default();
            entry[input] = logical_amplitudes(&branch, &qubits);
        }
    }

    let options: [&[Pauli]; 4] = [&[], &[Pauli::X], &[Pauli::Z], &[Pauli::X, Pauli::Z]];
    let cnot_column = |input: usize| -> usize {
        match input {
            2 => 3,
            3 => 2,
            other => other,
        }
    };
    let mut table = Vec::new();
    for (counts, columns) in raw {
        let mut found = None;
        'search: for on_c in options {
            for on_t in options {
                let (elements, _) = correction_elements(&control, &target, on_c, on_t);
                let mut overlap = Complex64::new(0.0, 0.0);
                let mut weight = 0.0;
                for (input, column) in columns.iter().enumerate() {
                    let s = PureState::from_terms(
                        FockSpace::new(4, 2)?,
                        (0..4).filter(|k| column[*k].norm() > 0.0).map(|k| {
                            let bits = [(k >> 1) & 1, k & 1];
                            let mut occ = vec![0; 4];
                            occ[qubits[0].rails()[bits[0]]] = 1;
                            occ[qubits[1].rails()[bits[1]]] = 1;
                            (occ, column[k])
                        }),
                    )?;
                    let corrected = logical_amplitudes(&apply_all(&s, &elements)?, &qubits);
                    overlap += corrected[cnot_column(input)];
                    weight += corrected.iter().map(|a| a.norm()).sum::<f64>();
                }
                if weight > 0.0 && (overlap.norm() / weight - 1.0).abs() < 1e-9 {
                    found = Some((on_c.to_vec(), on_t.to_vec()));
                    break 'search;
                }
            }
        }
        let (on_c, on_t) =
            found.ok_or_else(|| Error::Config(format!("no Pauli correction for {counts:?}")))?;
        table.push(([counts[0], counts[1], counts[2], counts[3]], on_c, on_t));
    }
    Ok(table)
}
