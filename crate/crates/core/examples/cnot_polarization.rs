//! Polarization CNOT with a Bell-pair ancilla and feed-forward: every
//! detector pattern for the input |+>|H>, which the gate entangles.

use std::f64::consts::FRAC_1_SQRT_2;

use lofock::gates::{
    cnot_polarization_branches, logical_amplitudes, logical_state, PolarizationQubit,
    CNOT_FEED_FORWARD,
};
use num_complex::Complex64;

fn main() -> lofock::Result<()> {
    for rule in CNOT_FEED_FORWARD {
        println!(
            "accept {:?} {:?}: control {:?}, target {:?}",
            rule.detector_1, rule.detector_2, rule.control, rule.target
        );
    }
    let q = [PolarizationQubit::at(0), PolarizationQubit::at(1)];
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let input = logical_state(4, &q, &[(vec![0, 0], h), (vec![1, 0], h)])?;
    let mut accepted = 0.0;
    for b in cnot_polarization_branches(&input, &q[0], &q[1])? {
        if b.accepted {
            accepted += b.probability;
            let a = logical_amplitudes(&b.state, &q);
            println!(
                "{} p={:.4} corrections {:?} -> HH {:.4}, VV {:.4}",
                b.pattern, b.probability, b.corrections, a[0], a[3]
            );
        }
    }
    println!("accepted probability {accepted:.12}");
    Ok(())
}
