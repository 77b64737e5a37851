//! Photon loss as pure-state trajectories.
//!
//! Each affected mode is passed through the Kraus operators
//! `E_ℓ = Σₙ √(C(n,ℓ) pˡ (1−p)ⁿ⁻ˡ) |n−ℓ⟩⟨n|`, one outcome `ℓ` drawn per mode.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Occupation, PureState};
use crate::measurement::{binomial_pmf, seeded_rng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossChannel {
    pub per_pass_loss: f64,
    pub affected_modes: Vec<usize>,
}

impl LossChannel {
    pub fn new(per_pass_loss: f64, affected_modes: impl Into<Vec<usize>>) -> Result<Self> {
        if !(0.0..=1.0).contains(&per_pass_loss) {
            return Err(Error::InvalidProbability(per_pass_loss));
        }
        Ok(LossChannel {
            per_pass_loss,
            affected_modes: affected_modes.into(),
        })
    }

    /// Loss on every mode of an `mode_count`-mode system.
    pub fn uniform(per_pass_loss: f64, mode_count: usize) -> Result<Self> {
        Self::new(per_pass_loss, (0..mode_count).collect::<Vec<_>>())
    }
}

/// `E_ℓ` on `mode`, unnormalized.
fn kraus(s: &PureState, mode: usize, lost: usize, p: f64) -> PureState {
    s.map_terms(s.space(), |o, a| {
        let n = o.get(mode);
        if n < lost {
            return None;
        }
        let mut counts = o.counts().to_vec();
        counts[mode] = n - lost;
        let w = binomial_pmf(n, lost, p).sqrt();
        Some((Occupation(counts), a * Complex64::new(w, 0.0)))
    })
}

/// One trajectory of `channel` on `s`. Returns the renormalized state and
/// the modes that lost at least one photon.
pub fn apply_loss_with<R: Rng + ?Sized>(
    s: &PureState,
    channel: &LossChannel,
    rng: &mut R,
) -> Result<(PureState, Vec<usize>)> {
    if !(0.0..=1.0).contains(&channel.per_pass_loss) {
        return Err(Error::InvalidProbability(channel.per_pass_loss));
    }
    s.space().check_modes(&channel.affected_modes)?;
    let (mut state, _) = s.normalize()?;
    let p = channel.per_pass_loss;
    let mut lost_modes = Vec::new();
    if p == 0.0 {
        return Ok((state, lost_modes));
    }
    for &mode in &channel.affected_modes {
        let max = state.max_photons_in(mode);
        if max == 0 {
            continue;
        }
        let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
        for (o, a) in state.terms() {
            let n = o.get(mode);
            for lost in 0..=n {
                *weights.entry(lost).or_default() += a.norm_sqr() * binomial_pmf(n, lost, p);
            }
        }
        let total: f64 = weights.values().sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = *weights.keys().next_back().expect("at least one outcome");
        for (&lost, &w) in &weights {
            acc += w;
            if w > 0.0 && target < acc {
                chosen = lost;
                break;
            }
        }
        state = kraus(&state, mode, chosen, p).normalize()?.0;
        if chosen > 0 {
            lost_modes.push(mode);
        }
    }
    Ok((state, lost_modes))
}

/// [`apply_loss_with`] driven by a fresh generator seeded with `seed`.
pub fn apply_loss(
    s: &PureState,
    channel: &LossChannel,
    seed: u64,
) -> Result<(PureState, Vec<usize>)> {
    apply_loss_with(s, channel, &mut seeded_rng(seed))
}

/// Conditional state after exactly one photon has left each of `modes`.
/// Places a loss at a chosen location; fails with [`Error::ZeroState`] if a
/// listed mode is empty in every term.
pub fn lose_photons(s: &PureState, modes: &[usize]) -> Result<PureState> {
    s.space().check_modes(modes)?;
    let branch = s.map_terms(s.space(), |o, a| {
        let mut counts = o.counts().to_vec();
        for &m in modes {
            if counts[m] == 0 {
                return None;
            }
            counts[m] -= 1;
        }
        let w: f64 = modes.iter().map(|&m| o.get(m) as f64).product();
        Some((Occupation(counts), a * w.sqrt()))
    });
    Ok(branch.normalize()?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockSpace;
    use crate::measurement::stream_rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_loss_changes_nothing() {
        let space = FockSpace::new(2, 2).unwrap();
        let s = PureState::from_terms(space, [([1, 0], c(0.6)), ([0, 1], c(0.8))]).unwrap();
        let (out, lost) = apply_loss(&s, &LossChannel::uniform(0.0, 2).unwrap(), 3).unwrap();
        assert_eq!(out, s);
        assert!(lost.is_empty());
    }

    #[test]
    fn full_loss_empties_the_rail() {
        let space = FockSpace::new(2, 1).unwrap();
        let s = PureState::basis(space, [1, 0]).unwrap();
        let (out, lost) = apply_loss(&s, &LossChannel::uniform(1.0, 2).unwrap(), 9).unwrap();
        assert_eq!(out, PureState::vacuum(space));
        assert_eq!(lost, vec![0]);
    }

    #[test]
    fn loss_collapses_the_which_rail_superposition() {
        let space = FockSpace::new(2, 1).unwrap();
        let s = PureState::from_terms(space, [([1, 0], c(0.6)), ([0, 1], c(0.8))]).unwrap();
        for seed in 0..20 {
            let (out, lost) = apply_loss(&s, &LossChannel::uniform(0.5, 2).unwrap(), seed).unwrap();
            match lost.as_slice() {
                [] => {
                    // No click updates the weights by (1 − p) per photon, which is uniform here.
                    assert!((out.fidelity(&s).unwrap() - 1.0).abs() < 1e-12);
                }
                [_] => assert_eq!(out, PureState::vacuum(space)),
                _ => panic!("one photon lost twice"),
            }
        }
    }

    #[test]
    fn two_photons_lose_binomially() {
        let space = FockSpace::new(1, 2).unwrap();
        let s = PureState::basis(space, [2]).unwrap();
        let ch = LossChannel::uniform(0.3, 1).unwrap();
        let trials = 20_000;
        let mut hist = [0usize; 3];
        for i in 0..trials {
            let (out, _) = apply_loss_with(&s, &ch, &mut stream_rng(5, i)).unwrap();
            let left = out.terms().next().unwrap().0.get(0);
            hist[2 - left] += 1;
        }
        let expected = [0.49, 0.42, 0.09];
        for (h, e) in hist.iter().zip(expected) {
            let f = *h as f64 / trials as f64;
            let sigma = (e * (1.0 - e) / trials as f64).sqrt();
            assert!((f - e).abs() < 4.0 * sigma, "{hist:?}");
        }
    }

    #[test]
    fn rejects_bad_probability() {
        assert_eq!(
            LossChannel::new(1.5, vec![0]),
            Err(Error::InvalidProbability(1.5))
        );
    }

    #[test]
    fn chosen_loss_keeps_only_terms_with_that_photon() {
        let space = FockSpace::new(4, 2).unwrap();
        let s =
            PureState::from_terms(space, [([1, 0, 1, 0], c(0.6)), ([0, 1, 1, 0], c(0.8))]).unwrap();
        let out = lose_photons(&s, &[0]).unwrap();
        assert_eq!(out, PureState::basis(space, [0, 0, 1, 0]).unwrap());
        assert_eq!(lose_photons(&s, &[3]), Err(Error::ZeroState));
    }
}
