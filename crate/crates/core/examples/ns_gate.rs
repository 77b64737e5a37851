//! The nonlinear sign gate on a superposition of zero, one and two photons.
//! Pass `--solve` to re-derive the network angles first.

use lofock::gates::{ns_gate, solve_ns_parameters, NsParameters};
use lofock::{FockSpace, PureState};
use num_complex::Complex64;

fn main() -> lofock::Result<()> {
    let params = if std::env::args().any(|a| a == "--solve") {
        solve_ns_parameters()?
    } else {
        NsParameters::FROZEN
    };
    println!(
        "angles: {:.12} {:.12} {:.12}",
        params.theta_1, params.theta_2, params.theta_3
    );
    println!("herald amplitudes: {:?}", params.herald_amplitudes());

    let space = FockSpace::new(1, 2)?;
    let a = [
        Complex64::new(0.5, 0.0),
        Complex64::new(0.5, 0.5),
        Complex64::new(0.0, -0.5),
    ];
    let input = PureState::from_terms(space, [([0], a[0]), ([1], a[1]), ([2], a[2])])?;
    let r = ns_gate(&input, 0, &params)?;
    println!("input:  {input}");
    println!("output: {}", r.output_state);
    println!(
        "herald {} with probability {:.12}",
        r.herald_pattern, r.success_probability
    );
    Ok(())
}
