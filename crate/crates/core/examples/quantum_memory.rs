//! A qubit stored in the loss code over repeated loss-and-recovery cycles,
//! compared with the closed-form survival probability.

use lofock::gates::{logical_state, DualRailQubit};
use lofock::memory::memory_cycle;
use num_complex::Complex64;

fn main() -> lofock::Result<()> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let qubit = logical_state(
        2,
        &[DualRailQubit::at(0)],
        &[
            (vec![0], Complex64::new(h, 0.0)),
            (vec![1], Complex64::new(0.0, h)),
        ],
    )?;
    let report = memory_cycle(&qubit, 8, 0.05, 2000, 7)?;
    println!(
        "{:>5} {:>10} {:>10} {:>10}",
        "cycle", "survival", "analytic", "fidelity"
    );
    for c in &report.cycles {
        println!(
            "{:>5} {:>10.4} {:>10.4} {:>10.6}",
            c.cycle,
            c.survival_fraction,
            c.analytic_survival,
            c.mean_fidelity.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
