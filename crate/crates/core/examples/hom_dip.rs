//! Two photons meeting on a beam splitter: the coincidence probability
//! against the splitter angle, vanishing at the balanced point.

use std::f64::consts::FRAC_PI_2;

use lofock::interferometer::{apply_element, Element};
use lofock::{FockSpace, PureState};

fn main() -> lofock::Result<()> {
    let input = PureState::basis(FockSpace::new(2, 2)?, [1, 1])?;
    println!("{:>8}  {:>12}", "theta", "P(1,1)");
    for i in 0..=16 {
        let theta = FRAC_PI_2 * i as f64 / 16.0;
        let out = apply_element(&input, &Element::beamsplitter(theta, 0.0, 0, 1))?;
        println!("{theta:>8.4}  {:>12.3e}", out.amplitude(&[1, 1]).norm_sqr());
    }
    let balanced = apply_element(&input, &Element::balanced(0, 1))?;
    println!("\nbalanced output: {balanced}");
    Ok(())
}
