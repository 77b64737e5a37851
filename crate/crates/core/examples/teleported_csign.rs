//! Controlled sign by teleportation: the gate is applied to the resource
//! offline, and the online step only teleports the two qubits.

use lofock::gates::{logical_amplitudes, logical_state, DualRailQubit, NsParameters};
use lofock::teleport::{make_csign_resource, teleported_csign_branches};
use num_complex::Complex64;

fn main() -> lofock::Result<()> {
    let q = [DualRailQubit::at(0), DualRailQubit::at(1)];
    let h = Complex64::new(0.5, 0.0);
    let terms: Vec<(Vec<u8>, Complex64)> = (0..4)
        .map(|x| (vec![(x >> 1) as u8, (x & 1) as u8], h))
        .collect();
    let input = logical_state(4, &q, &terms)?;
    for n in 1..=2 {
        let resource = make_csign_resource(n, &NsParameters::FROZEN)?;
        let branches = teleported_csign_branches(&input, &q[0], &q[1], &resource)?;
        let online: f64 = branches
            .iter()
            .filter(|b| b.success())
            .map(|b| b.probability)
            .sum();
        let sample = branches
            .iter()
            .find(|b| b.success())
            .expect("a successful pattern");
        let amps = logical_amplitudes(&sample.state, &q);
        println!(
            "n={n}: offline herald {:.6}, online success {online:.6}, output amplitudes {:+.3} {:+.3} {:+.3} {:+.3}",
            resource.offline_success_probability, amps[0].re, amps[1].re, amps[2].re, amps[3].re
        );
    }
    Ok(())
}
