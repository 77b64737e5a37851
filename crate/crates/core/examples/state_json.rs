//! States as JSON: amplitudes written as `[occupation, re, im]` triples.

use lofock::fock::StateRecord;
use lofock::interferometer::Element;
use lofock::{FockSpace, OpticalCircuit, PureState};

fn main() -> lofock::Result<()> {
    let mut circuit = OpticalCircuit::new(3);
    circuit
        .push(Element::balanced(0, 1))?
        .push(Element::phaseshift(0.3, 1))?
        .push(Element::balanced(1, 2))?;
    let out = circuit.apply(&PureState::basis(FockSpace::new(3, 2)?, [1, 1, 0])?)?;
    let json = serde_json::to_string_pretty(&StateRecord::from(out.clone())).expect("serializes");
    println!("{json}");
    let back = PureState::try_from(serde_json::from_str::<StateRecord>(&json).expect("parses"))?;
    println!("fidelity after round trip: {:.15}", back.fidelity(&out)?);
    Ok(())
}
