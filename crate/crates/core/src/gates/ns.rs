//! Nonlinear sign gate: `α₀|0⟩ + α₁|1⟩ + α₂|2⟩ → α₀|0⟩ + α₁|1⟩ − α₂|2⟩`,
//! heralded by one photon in the first ancilla and none in the second.
//!
//! The network is a π phase on the signal followed by three beam splitters:
//! `(a, v)`, `(s, a)`, `(a, v)`, with `s` the signal mode, `a` the ancilla
//! prepared with one photon and `v` the vacuum ancilla.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{append_ancillas, apply_all, HeraldedGateResult};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, PureState};
use crate::interferometer::{apply_element, Element};
use crate::measurement::{project, DetectionPattern};

/// Squared herald amplitude the parameters are solved for.
pub const NS_SUCCESS_PROBABILITY: f64 = 0.25;

/// Beam splitter angles of the NS network, plus the signal phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NsParameters {
    pub theta_1: f64,
    pub theta_2: f64,
    pub theta_3: f64,
    pub signal_phase: f64,
}

impl NsParameters {
    /// Output of [`solve_ns_parameters`], frozen.
    pub const FROZEN: NsParameters = NsParameters {
        theta_1: std::f64::consts::FRAC_PI_8,
        theta_2: 1.1437177404024204,
        theta_3: -std::f64::consts::FRAC_PI_8,
        signal_phase: std::f64::consts::PI,
    };

    /// The network on `signal` with ancillas `photon` (one photon in) and
    /// `vacuum`.
    pub fn elements(&self, signal: usize, photon: usize, vacuum: usize) -> [Element; 4] {
        [
            Element::phaseshift(self.signal_phase, signal),
            Element::beamsplitter(self.theta_1, 0.0, photon, vacuum),
            Element::beamsplitter(self.theta_2, 0.0, signal, photon),
            Element::beamsplitter(self.theta_3, 0.0, photon, vacuum),
        ]
    }

    /// `⟨k,1,0|U|k,1,0⟩` for `k = 0, 1, 2`, evaluated through the two-mode
    /// Fock kernel.
    pub fn herald_amplitudes(&self) -> [Complex64; 3] {
        let space = FockSpace::new(3, 3).expect("three modes");
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let input = PureState::basis(space, [k, 1, 0]).expect("within cutoff");
            let evolved = self
                .elements(0, 1, 2)
                .iter()
                .try_fold(input, |s, e| apply_element(&s, e))
                .expect("valid network");
            *slot = evolved.amplitude(&[k, 1, 0]);
        }
        out
    }

    /// `(|A₁ − A₀|, |A₂ + A₀|, |A₀|² − 1/4)`; all vanish at a solution.
    pub fn residuals(&self) -> [f64; 3] {
        let [a0, a1, a2] = self.herald_amplitudes();
        [
            (a1 - a0).norm(),
            (a2 + a0).norm(),
            a0.norm_sqr() - NS_SUCCESS_PROBABILITY,
        ]
    }

    fn signed_residuals(angles: [f64; 3]) -> [f64; 3] {
        let p = NsParameters {
            theta_1: angles[0],
            theta_2: angles[1],
            theta_3: angles[2],
            signal_phase: std::f64::consts::PI,
        };
        // Real network, so every amplitude is real.
        let [a0, a1, a2] = p.herald_amplitudes();
        [
            a1.re - a0.re,
            a2.re + a0.re,
            a0.re * a0.re - NS_SUCCESS_PROBABILITY,
        ]
    }
}

fn norm(r: [f64; 3]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn mirrored(x: [f64; 2]) -> [f64; 3] {
    [x[0], x[1], -x[0]]
}

/// Finds NS network angles by damped Gauss-Newton iteration on the three
/// herald amplitude constraints `A₁ = A₀`, `A₂ = −A₀`, `|A₀|² = 1/4`.
///
/// The search is restricted to `θ₃ = −θ₁`. The unrestricted Jacobian is
/// singular along `θ₁ + θ₃` at the solution, which caps plain Newton at
/// roughly `√ε` accuracy.
pub fn solve_ns_parameters() -> Result<NsParameters> {
    const STARTS: [[f64; 2]; 3] = [[0.4, 1.1], [0.3, 1.2], [0.5, 1.0]];
    let mut best = [f64::INFINITY; 3];
    for start in STARTS {
        let mut x = start;
        let mut r = NsParameters::signed_residuals(mirrored(x));
        for _ in 0..100 {
            if norm(r) < 1e-15 {
                break;
            }
            let h = 1e-7;
            let mut jac = [[0.0; 2]; 3];
            for col in 0..2 {
                let (mut up, mut down) = (x, x);
                up[col] += h;
                down[col] -= h;
                let ru = NsParameters::signed_residuals(mirrored(up));
                let rd = NsParameters::signed_residuals(mirrored(down));
                for row in 0..3 {
                    jac[row][col] = (ru[row] - rd[row]) / (2.0 * h);
                }
            }
            // Normal equations JᵀJ δ = Jᵀr.
            let mut a = [[0.0; 2]; 2];
            let mut b = [0.0; 2];
            for row in 0..3 {
                for i in 0..2 {
                    b[i] += jac[row][i] * r[row];
                    for j in 0..2 {
                        a[i][j] += jac[row][i] * jac[row][j];
                    }
                }
            }
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            if det.abs() < 1e-14 {
                break;
            }
            let step = [
                (b[0] * a[1][1] - b[1] * a[0][1]) / det,
                (a[0][0] * b[1] - a[1][0] * b[0]) / det,
            ];
            // Keep steps short so the iteration stays in the starting basin.
            let mut scale = (0.1 / step[0].hypot(step[1])).min(1.0);
            loop {
                let trial = [x[0] - scale * step[0], x[1] - scale * step[1]];
                let rt = NsParameters::signed_residuals(mirrored(trial));
                if norm(rt) < norm(r) || scale < 1e-6 {
                    x = trial;
                    r = rt;
                    break;
                }
                scale *= 0.5;
            }
        }
        if norm(r) < norm(best) {
            best = r;
        }
        let [theta_1, theta_2, theta_3] = mirrored(x);
        let params = NsParameters {
            theta_1,
            theta_2,
            theta_3,
            signal_phase: std::f64::consts::PI,
        };
        if params.residuals().iter().all(|v| v.abs() < 1e-12) {
            return Ok(params);
        }
    }
    Err(Error::SolverDiverged { residuals: best })
}

/// Applies the NS gate to `signal_mode` of `s` and conditions on the success
/// herald. The success probability is `1/4` for every input.
pub fn ns_gate(
    s: &PureState,
    signal_mode: usize,
    params: &NsParameters,
) -> Result<HeraldedGateResult> {
    s.space().check_mode(signal_mode)?;
    let photons = s.max_photons_in(signal_mode);
    if photons > 2 {
        return Err(Error::OutsideGateDomain {
            mode: signal_mode,
            photons,
            max: 2,
        });
    }
    let input_norm = s.norm_sqr();
    if input_norm <= 0.0 {
        return Err(Error::ZeroState);
    }
    let (extended, first) = append_ancillas(s, &[1, 0])?;
    let evolved = apply_all(&extended, &params.elements(signal_mode, first, first + 1))?;
    let herald = DetectionPattern::new([first, first + 1], [1, 0])?;
    let branch = project(&evolved, &herald)?.with_prune_threshold(s.prune_threshold());
    let branch = restore_cutoff(branch, s.space());
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

/// Puts a branch back on the caller's space once ancilla photons are gone.
pub(crate) fn restore_cutoff(s: PureState, space: FockSpace) -> PureState {
    let terms: Vec<_> = s.terms().map(|(o, a)| (o.clone(), *a)).collect();
    PureState::from_terms(space, terms).unwrap_or(s)
}
