//! Running a scenario from code and printing its checked scalars and one
//! series as CSV.

use lofock::scenario::{emit_figure_data, run_scenario, Experiment, Scenario};

fn main() -> lofock::Result<()> {
    let scenario = Scenario::new(
        "teleport",
        3,
        Experiment::default_for("teleport_scan").expect("known kind"),
    );
    let report = run_scenario(&scenario)?;
    for s in &report.scalars {
        println!("{:<40} {:.12} pass={:?}", s.name, s.value, s.pass);
    }
    print!("{}", emit_figure_data(&report, "teleport_scan")?);
    Ok(())
}
