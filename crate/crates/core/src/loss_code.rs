//! Four-qubit erasure code that survives the loss of any one photon.
//!
//! The block is two Bell-pair halves, `α|Φ⁺Φ⁺⟩ + β|Ψ⁺Ψ⁺⟩`, on dual-rail qubits
//! `q0..q3` (modes `2i`, `2i+1`). `q0` carries the data and `q2` receives a
//! parity copy of it; `q1` and `q3` bring the two ancilla photons in `|+⟩`.
//!
//! Encoding: `CNOT(q0→q2)`, `CNOT(q1→q0)`, `CNOT(q3→q2)`. Every CNOT is the
//! heralded dual-rail gate conditioned on success.
//!
//! A lost photon empties one rail pair, which a presence check finds. The
//! pair that shares a block with the loss still holds the data in its parity,
//! and the other block is decoded onto it:
//!
//! | empty pair | circuit                              | output |
//! |------------|--------------------------------------|--------|
//! | none       | `CNOT(q0→q1) CNOT(q2→q3) CNOT(q3→q1)` | `q3`   |
//! | `q0`       | `CNOT(q2→q3) CNOT(q3→q1)`             | `q3`   |
//! | `q1`       | `CNOT(q2→q3) CNOT(q3→q0)`             | `q3`   |
//! | `q2`       | `CNOT(q0→q1) CNOT(q1→q3)`             | `q1`   |
//! | `q3`       | `CNOT(q0→q1) CNOT(q1→q2)`             | `q1`   |

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Occupation, PureState};
use crate::gates::{cnot_dual_rail, logical_state, require_logical, DualRailQubit, NsParameters};
use crate::measurement::{qnd_photon_presence, sample_outcome, seeded_rng, Presence};

pub const CODE_QUBITS: usize = 4;
pub const CODE_MODES: usize = 2 * CODE_QUBITS;

/// Where a qubit's photon came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitRole {
    Data,
    ParityCopy,
    Ancilla,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodedBlock {
    /// State on [`CODE_MODES`] modes.
    pub state: PureState,
    pub qubits: [DualRailQubit; CODE_QUBITS],
    pub roles: [QubitRole; CODE_QUBITS],
    /// Joint herald probability of the encoding CNOTs.
    pub herald_probability: f64,
}

impl EncodedBlock {
    pub fn photon_count(&self) -> Option<usize> {
        let counts = self.state.photon_numbers();
        (counts.len() == 1).then(|| *counts.iter().next().expect("one entry"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RecoveryOutcome {
    Recovered {
        /// The logical qubit on two modes, rails `(0, 1)`.
        state: PureState,
        /// Index of the rail pair found empty.
        loss_location: Option<usize>,
        /// Joint herald probability of the decoding CNOTs.
        herald_probability: f64,
    },
    /// More than one rail pair is empty.
    Uncorrectable { empty_pairs: Vec<usize> },
}

/// Heralded dual-rail CNOT reduced to its conditional map on the logical
/// basis, so it can be applied to large states by linearity.
#[derive(Clone, Debug)]
struct CompiledCnot {
    /// Output terms on `[c_a, c_b, t_a, t_b]` for input `|ct⟩`, scaled by the
    /// herald amplitude.
    table: [Vec<([usize; 4], Complex64)>; 4],
    probability: f64,
}

impl CompiledCnot {
    fn new(params: &NsParameters) -> Result<Self> {
        let q = [DualRailQubit::at(0), DualRailQubit::at(1)];
        let mut table: [Vec<([usize; 4], Complex64)>; 4] = Default::default();
        let mut probability = 0.0;
        for (x, slot) in table.iter_mut().enumerate() {
            let bits = vec![(x >> 1) as u8, (x & 1) as u8];
            let input = logical_state(4, &q, &[(bits, Complex64::new(1.0, 0.0))])?;
            let r = cnot_dual_rail(&input, &q[0], &q[1], params)?;
            let scale = Complex64::new(r.success_probability.sqrt(), 0.0);
            *slot = r
                .output_state
                .terms()
                .map(|(o, a)| ([o.get(0), o.get(1), o.get(2), o.get(3)], a * scale))
                .collect();
            probability = r.success_probability;
        }
        Ok(CompiledCnot { table, probability })
    }

    fn apply(
        &self,
        s: &PureState,
        control: &DualRailQubit,
        target: &DualRailQubit,
    ) -> Result<PureState> {
        require_logical(s, &[*control, *target])?;
        let modes = [control.mode_a, control.mode_b, target.mode_a, target.mode_b];
        let mut map: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (o, a) in s.terms() {
            let x = 2 * o.get(control.mode_b) + o.get(target.mode_b);
            for (counts, m) in &self.table[x] {
                let mut out = o.counts().to_vec();
                for (&mode, &c) in modes.iter().zip(counts) {
                    out[mode] = c;
                }
                *map.entry(Occupation(out)).or_default() += a * m;
            }
        }
        Ok(PureState::from_terms(s.space(), map)?.normalize()?.0)
    }
}

/// The code with its CNOTs built from a given NS network.
#[derive(Clone, Debug)]
pub struct LossCode {
    cnot: CompiledCnot,
}

fn q(i: usize) -> DualRailQubit {
    DualRailQubit::at(i)
}

impl LossCode {
    pub fn new(params: &NsParameters) -> Result<Self> {
        Ok(LossCode {
            cnot: CompiledCnot::new(params)?,
        })
    }

    /// Probability that one CNOT herald fires.
    pub fn cnot_herald_probability(&self) -> f64 {
        self.cnot.probability
    }

    fn run(&self, s: &PureState, pairs: &[(usize, usize)]) -> Result<(PureState, f64)> {
        let mut state = s.clone();
        for &(c, t) in pairs {
            state = self.cnot.apply(&state, &q(c), &q(t))?;
        }
        Ok((state, self.cnot.probability.powi(pairs.len() as i32)))
    }

    /// Encodes a qubit given on modes `(0, 1)`.
    pub fn encode(&self, logical: &PureState) -> Result<EncodedBlock> {
        if logical.mode_count() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                rows: logical.mode_count(),
                cols: 1,
            });
        }
        require_logical(logical, &[q(0)])?;
        let (logical, _) = logical.normalize()?;
        let h = Complex64::new(0.5, 0.0);
        let rest = logical_state(
            6,
            &[q(0), q(1), q(2)],
            &[
                (vec![0, 0, 0], h),
                (vec![0, 0, 1], h),
                (vec![1, 0, 0], h),
                (vec![1, 0, 1], h),
            ],
        )?;
        let (state, herald_probability) =
            self.run(&logical.tensor(&rest)?, &[(0, 2), (1, 0), (3, 2)])?;
        Ok(EncodedBlock {
            state,
            qubits: [q(0), q(1), q(2), q(3)],
            roles: [
                QubitRole::Data,
                QubitRole::Ancilla,
                QubitRole::ParityCopy,
                QubitRole::Ancilla,
            ],
            herald_probability,
        })
    }

    /// Presence checks on every rail pair, then decoding around the empty
    /// pair if there is one.
    pub fn detect_and_recover_with<R: Rng + ?Sized>(
        &self,
        block: &EncodedBlock,
        rng: &mut R,
    ) -> Result<RecoveryOutcome> {
        let mut state = block.state.clone();
        let mut empty = Vec::new();
        for (i, qubit) in block.qubits.iter().enumerate() {
            let branches = qnd_photon_presence(&state, [qubit.mode_a, qubit.mode_b])?;
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = &branches[branches.len() - 1];
            for b in &branches {
                acc += b.probability;
                if target < acc {
                    chosen = b;
                    break;
                }
            }
            if chosen.presence == Presence::Empty {
                empty.push(i);
            }
            state = chosen.post_state.clone();
        }
        let (pairs, output): (&[(usize, usize)], usize) = match empty.as_slice() {
            [] => (&[(0, 1), (2, 3), (3, 1)], 3),
            [0] => (&[(2, 3), (3, 1)], 3),
            [1] => (&[(2, 3), (3, 0)], 3),
            [2] => (&[(0, 1), (1, 3)], 1),
            [3] => (&[(0, 1), (1, 2)], 1),
            _ => return Ok(RecoveryOutcome::Uncorrectable { empty_pairs: empty }),
        };
        let (decoded, herald_probability) = self.run(&state, pairs)?;
        let out = q(output);
        let others: Vec<usize> = (0..CODE_MODES)
            .filter(|m| *m != out.mode_a && *m != out.mode_b)
            .collect();
        let discarded = sample_outcome(&decoded, &others, rng)?;
        let state = discarded.post_state.ok_or(Error::NoModes)?;
        Ok(RecoveryOutcome::Recovered {
            state,
            loss_location: empty.first().copied(),
            herald_probability,
        })
    }

    pub fn detect_and_recover(&self, block: &EncodedBlock, seed: u64) -> Result<RecoveryOutcome> {
        self.detect_and_recover_with(block, &mut seeded_rng(seed))
    }
}

/// Encodes with the frozen NS network.
pub fn encode_block(logical: &PureState) -> Result<EncodedBlock> {
    LossCode::new(&NsParameters::FROZEN)?.encode(logical)
}

/// Recovers with the frozen NS network.
pub fn detect_and_recover(block: &EncodedBlock, seed: u64) -> Result<RecoveryOutcome> {
    LossCode::new(&NsParameters::FROZEN)?.detect_and_recover(block, seed)
}
