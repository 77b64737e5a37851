//! The two amplitude kernels on random circuits: element-by-element
//! evaluation against permanents of the folded mode matrix.

use lofock::measurement::seeded_rng;
use lofock::random::{random_circuit, random_fock_state};
use rand::Rng;

fn main() -> lofock::Result<()> {
    let mut rng = seeded_rng(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let modes = rng.random_range(2..=5);
        let photons = rng.random_range(1..=4);
        let circuit = random_circuit(&mut rng, modes, 20)?;
        let input = random_fock_state(&mut rng, modes, photons, 4)?;
        let a = circuit.apply(&input)?;
        let b = circuit.apply_via_permanent(&input)?;
        for occ in input.space().basis() {
            worst = worst.max((a.amplitude(occ.counts()) - b.amplitude(occ.counts())).norm());
        }
    }
    println!("largest amplitude difference over 50 circuits: {worst:.3e}");
    Ok(())
}
