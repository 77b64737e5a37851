//! Imperfect photon counting: click statistics of a lossy detector with
//! limited number resolution on a two-photon state.

use lofock::measurement::{detect_with_model, outcome_distribution, seeded_rng, DetectorModel};
use lofock::{FockSpace, PureState};
use num_complex::Complex64;

fn main() -> lofock::Result<()> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = PureState::from_terms(
        FockSpace::new(2, 2)?,
        [
            ([2, 0], Complex64::new(h, 0.0)),
            ([0, 2], Complex64::new(-h, 0.0)),
        ],
    )?;
    println!(
        "ideal distribution on mode 0: {:?}",
        outcome_distribution(&s, &[0])?
    );
    let mut rng = seeded_rng(5);
    for model in [
        DetectorModel::ideal(),
        DetectorModel::new(0.9, 2)?,
        DetectorModel::new(0.9, 1)?,
    ] {
        let mut counts = [0usize; 3];
        for _ in 0..10_000 {
            counts[detect_with_model(&s, &[0], &model, &mut rng)?
                .pattern
                .counts[0]] += 1;
        }
        let resolution = match model.max_resolved_count {
            usize::MAX => "any".to_string(),
            k => k.to_string(),
        };
        println!(
            "efficiency {}, resolves up to {resolution}: reported 0/1/2 = {counts:?}",
            model.efficiency
        );
    }
    Ok(())
}
