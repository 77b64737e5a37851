//! Cyclic quantum memory: a qubit stored in the loss code is exposed to loss,
//! checked and recovered, and re-encoded once per cycle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::PureState;
use crate::gates::NsParameters;
use crate::loss::{apply_loss_with, LossChannel};
use crate::loss_code::{LossCode, RecoveryOutcome, CODE_MODES};
use crate::measurement::stream_rng;

/// Per-gate error probability below which concatenated schemes are expected
/// to work. Reported only.
pub const ERROR_THRESHOLD: f64 = 0.5;
/// Per-gate loss probability needed for scalable operation. Reported only.
pub const LOSS_PER_GATE_THRESHOLD: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle: usize,
    /// Mean fidelity with the stored state over trajectories still alive;
    /// `None` once none are.
    pub mean_fidelity: Option<f64>,
    pub min_fidelity: Option<f64>,
    pub survivors: usize,
    pub survival_fraction: f64,
    /// Closed-form survival probability after this many cycles.
    pub analytic_survival: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalReport {
    pub per_cycle_loss: f64,
    pub trajectories: usize,
    pub cycles: Vec<CycleRecord>,
    /// Fraction of trajectories correctable through the last cycle.
    pub cumulative_success_probability: f64,
}

/// Probability that one cycle leaves the block correctable: at most one of
/// the four photons is lost.
pub fn single_cycle_survival(per_cycle_loss: f64) -> f64 {
    let p = per_cycle_loss;
    (1.0 - p).powi(4) + 4.0 * p * (1.0 - p).powi(3)
}

pub fn analytic_survival(per_cycle_loss: f64, cycles: usize) -> f64 {
    single_cycle_survival(per_cycle_loss).powi(cycles as i32)
}

/// Fidelity after every cycle, `None` from the first uncorrectable cycle on.
fn trajectory(
    code: &LossCode,
    logical: &PureState,
    cycles: usize,
    channel: &LossChannel,
    seed: u64,
    index: u64,
) -> Result<Vec<Option<f64>>> {
    let mut rng = stream_rng(seed, index);
    let mut block = code.encode(logical)?;
    let mut out = vec![None; cycles];
    for slot in out.iter_mut() {
        let (state, _) = apply_loss_with(&block.state, channel, &mut rng)?;
        block.state = state;
        match code.detect_and_recover_with(&block, &mut rng)? {
            RecoveryOutcome::Recovered { state, .. } => {
                *slot = Some(state.fidelity(logical)?);
                block = code.encode(&state)?;
            }
            RecoveryOutcome::Uncorrectable { .. } => break,
        }
    }
    Ok(out)
}

/// Runs `trajectories` independent storage runs of `cycles` cycles each.
/// Trajectory `i` draws from stream `i` of `seed`.
pub fn memory_cycle(
    logical: &PureState,
    cycles: usize,
    per_cycle_loss: f64,
    trajectories: usize,
    seed: u64,
) -> Result<SurvivalReport> {
    if cycles == 0 || trajectories == 0 {
        return Err(Error::Config(
            "cycles and trajectories must be positive".into(),
        ));
    }
    let channel = LossChannel::uniform(per_cycle_loss, CODE_MODES)?;
    let code = LossCode::new(&NsParameters::FROZEN)?;
    let runs: Vec<Vec<Option<f64>>> = (0..trajectories as u64)
        .into_par_iter()
        .map(|i| trajectory(&code, logical, cycles, &channel, seed, i))
        .collect::<Result<_>>()?;
    let records: Vec<CycleRecord> = (0..cycles)
        .map(|c| {
            let alive: Vec<f64> = runs.iter().filter_map(|r| r[c]).collect();
            let survivors = alive.len();
            CycleRecord {
                cycle: c + 1,
                mean_fidelity: (survivors > 0)
                    .then(|| alive.iter().sum::<f64>() / survivors as f64),
                min_fidelity: alive.iter().copied().reduce(f64::min),
                survivors,
                survival_fraction: survivors as f64 / trajectories as f64,
                analytic_survival: analytic_survival(per_cycle_loss, c + 1),
            }
        })
        .collect();
    Ok(SurvivalReport {
        per_cycle_loss,
        trajectories,
        cumulative_success_probability: records.last().map_or(1.0, |r| r.survival_fraction),
        cycles: records,
    })
}
