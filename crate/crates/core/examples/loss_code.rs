//! Four-qubit loss code: encode, lose a photon from each rail in turn,
//! locate the loss and recover the qubit.

use lofock::gates::{logical_state, DualRailQubit, NsParameters};
use lofock::loss::lose_photons;
use lofock::loss_code::{LossCode, RecoveryOutcome, CODE_MODES};
use num_complex::Complex64;

fn main() -> lofock::Result<()> {
    let code = LossCode::new(&NsParameters::FROZEN)?;
    let qubit = logical_state(
        2,
        &[DualRailQubit::at(0)],
        &[
            (vec![0], Complex64::new(0.8, 0.0)),
            (vec![1], Complex64::new(0.0, 0.6)),
        ],
    )?;
    let block = code.encode(&qubit)?;
    println!(
        "encoded: {} photons, roles {:?}",
        block.photon_count().unwrap_or(0),
        block.roles
    );
    for mode in 0..CODE_MODES {
        let mut damaged = block.clone();
        damaged.state = lose_photons(&block.state, &[mode])?;
        match code.detect_and_recover(&damaged, mode as u64)? {
            RecoveryOutcome::Recovered {
                state,
                loss_location,
                ..
            } => {
                println!("photon lost from mode {mode}: found in pair {loss_location:?}, fidelity {:.12}", state.fidelity(&qubit)?)
            }
            RecoveryOutcome::Uncorrectable { empty_pairs } => {
                println!("mode {mode}: uncorrectable {empty_pairs:?}")
            }
        }
    }
    let mut twice = block.clone();
    twice.state = lose_photons(&block.state, &[0, 7])?;
    println!("two losses: {:?}", code.detect_and_recover(&twice, 0)?);
    Ok(())
}
