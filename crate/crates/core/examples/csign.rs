//! Controlled sign on two dual-rail qubits: the logical action on each basis
//! state and the herald probability.

use lofock::gates::{csign, logical_amplitudes, logical_state, DualRailQubit, NsParameters};
use num_complex::Complex64;

fn main() -> lofock::Result<()> {
    let q = [DualRailQubit::at(0), DualRailQubit::at(1)];
    for (x, label) in ["00", "01", "10", "11"].iter().enumerate() {
        let bits = vec![(x >> 1) as u8, (x & 1) as u8];
        let input = logical_state(4, &q, &[(bits, Complex64::new(1.0, 0.0))])?;
        let r = csign(&input, &q[0], &q[1], &NsParameters::FROZEN)?;
        let amps = logical_amplitudes(&r.output_state, &q);
        println!(
            "|{label}> -> amplitude {:+.6} on |{label}>, success probability {:.6}",
            amps[x].re, r.success_probability
        );
    }
    Ok(())
}
