//! Teleporting a dual-rail qubit through resources of one to three photons:
//! success probability n/(n+1), and what a failure reveals.

use lofock::gates::{logical_state, DualRailQubit};
use lofock::teleport::{make_resource, teleport_branches, teleport_qubit, TeleportOutcome};
use num_complex::Complex64;

fn main() -> lofock::Result<()> {
    let q = DualRailQubit::at(0);
    let input = logical_state(
        2,
        &[q],
        &[
            (vec![0], Complex64::new(0.6, 0.0)),
            (vec![1], Complex64::new(0.0, 0.8)),
        ],
    )?;
    for n in 1..=3 {
        let r = make_resource(n)?;
        let branches = teleport_branches(&input, &q, &r)?;
        let (mut success, mut fidelity) = (0.0, 1.0f64);
        let mut failures = [0.0; 2];
        for b in &branches {
            match b.outcomes[0] {
                TeleportOutcome::Success { .. } => {
                    success += b.probability;
                    fidelity = fidelity.min(b.state.fidelity(&input)?);
                }
                TeleportOutcome::Failure { measured } => {
                    failures[measured as usize] += b.probability
                }
            }
        }
        println!(
            "n={n}: {} patterns, success {success:.6}, worst fidelity {fidelity:.12}, failures measuring 0/1: {:.4}/{:.4}",
            branches.len(),
            failures[0],
            failures[1]
        );
    }
    let shot = teleport_qubit(&input, &q, &make_resource(2)?, 42)?;
    println!(
        "one shot at n=2: success={} pattern {} corrections {:?} measured {:?}",
        shot.success, shot.herald_pattern, shot.corrections_applied, shot.measured_values
    );
    Ok(())
}
