//! Controlled sign from two NS gates between balanced splitters.
//!
//! The `|1⟩` rails of the two qubits meet on a 50:50 splitter, so `|11⟩_L`
//! bunches into two-photon terms (Hong-Ou-Mandel). An NS gate on each output
//! flips those terms, and the inverse splitter undoes the interference,
//! leaving `−|11⟩_L`. The gate succeeds when both NS heralds fire.

use std::f64::consts::FRAC_PI_4;

use super::ns::restore_cutoff;
use super::{
    append_ancillas, apply_all, require_logical, DualRailQubit, HeraldedGateResult, NsParameters,
};
use crate::error::{Error, Result};
use crate::fock::PureState;
use crate::interferometer::Element;
use crate::measurement::{project, DetectionPattern};

/// Sign flip on the `|1,1⟩` component of modes `x` and `y`, each of which
/// must hold at most one photon.
pub fn csign_modes(
    s: &PureState,
    x: usize,
    y: usize,
    params: &NsParameters,
) -> Result<HeraldedGateResult> {
    s.space().check_modes(&[x, y])?;
    for m in [x, y] {
        let photons = s.max_photons_in(m);
        if photons > 1 {
            return Err(Error::OutsideGateDomain {
                mode: m,
                photons,
                max: 1,
            });
        }
    }
    let input_norm = s.norm_sqr();
    if input_norm <= 0.0 {
        return Err(Error::ZeroState);
    }
    let (extended, a) = append_ancillas(s, &[1, 0, 1, 0])?;
    let mut elements = vec![Element::beamsplitter(FRAC_PI_4, 0.0, x, y)];
    elements.extend(params.elements(x, a, a + 1));
    elements.extend(params.elements(y, a + 2, a + 3));
    elements.push(Element::beamsplitter(-FRAC_PI_4, 0.0, x, y));
    let evolved = apply_all(&extended, &elements)?;
    let herald = DetectionPattern::new([a, a + 1, a + 2, a + 3], [1, 0, 1, 0])?;
    let branch = restore_cutoff(project(&evolved, &herald)?, s.space());
    let (output_state, p) = branch.normalize()?;
    Ok(HeraldedGateResult {
        success: true,
        herald_pattern: herald,
        success_probability: p / input_norm,
        output_state,
        corrections_applied: Vec::new(),
        measured_values: Vec::new(),
    })
}

/// Controlled-σz on two dual-rail qubits, `diag(1, 1, 1, −1)` on
/// `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn csign(
    s: &PureState,
    qa: &DualRailQubit,
    qb: &DualRailQubit,
    params: &NsParameters,
) -> Result<HeraldedGateResult> {
    require_logical(s, &[*qa, *qb])?;
    csign_modes(s, qa.mode_b, qb.mode_b, params)
}

/// CNOT from a controlled sign conjugated by rotations of the target: the
/// `π/4` rotation maps `Z` onto `X`.
pub fn cnot_dual_rail(
    s: &PureState,
    control: &DualRailQubit,
    target: &DualRailQubit,
    params: &NsParameters,
) -> Result<HeraldedGateResult> {
    require_logical(s, &[*control, *target])?;
    let pre = apply_all(
        s,
        &[Element::beamsplitter(
            -FRAC_PI_4,
            0.0,
            target.mode_a,
            target.mode_b,
        )],
    )?;
    let mut r = csign_modes(&pre, control.mode_b, target.mode_b, params)?;
    r.output_state = apply_all(
        &r.output_state,
        &[Element::beamsplitter(
            FRAC_PI_4,
            0.0,
            target.mode_a,
            target.mode_b,
        )],
    )?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{logical_amplitudes, logical_state};
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn qubits() -> [DualRailQubit; 2] {
        [DualRailQubit::at(0), DualRailQubit::at(1)]
    }

    #[test]
    fn eleven_picks_up_a_minus_sign() {
        let q = qubits();
        let s = logical_state(4, &q, &[(vec![1, 1], c(1.0))]).unwrap();
        let r = csign(&s, &q[0], &q[1], &NsParameters::FROZEN).unwrap();
        let amps = logical_amplitudes(&r.output_state, &q);
        assert!((amps[3] - c(-1.0)).norm() < 1e-9, "{amps:?}");
    }

    #[test]
    fn success_is_product_of_two_ns_heralds() {
        let q = qubits();
        for bits in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let s = logical_state(4, &q, &[(bits.to_vec(), c(1.0))]).unwrap();
            let r = csign(&s, &q[0], &q[1], &NsParameters::FROZEN).unwrap();
            assert!((r.success_probability - 0.0625).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_logical_input() {
        let q = qubits();
        let space = crate::fock::FockSpace::new(4, 2).unwrap();
        let s = PureState::basis(space, [1, 1, 0, 0]).unwrap();
        assert!(matches!(
            csign(&s, &q[0], &q[1], &NsParameters::FROZEN),
            Err(Error::NonLogicalInput { .. })
        ));
    }

    #[test]
    fn conjugated_csign_is_cnot() {
        let q = qubits();
        let truth = [(0b00, 0b00), (0b01, 0b01), (0b10, 0b11), (0b11, 0b10)];
        for (input, output) in truth {
            let bits = vec![(input >> 1) as u8, (input & 1) as u8];
            let s = logical_state(4, &q, &[(bits, c(1.0))]).unwrap();
            let r = cnot_dual_rail(&s, &q[0], &q[1], &NsParameters::FROZEN).unwrap();
            let amps = logical_amplitudes(&r.output_state, &q);
            assert!(
                (amps[output].norm() - 1.0).abs() < 1e-9,
                "{input:02b}: {amps:?}"
            );
        }
    }
}
