//! Photon counting, post-selection, sampling, a detector model, and QND
//! photon-presence projection.
//!
//! Counting is destructive: measured modes are removed from the post-state.
//! The QND projection is the exception and keeps every mode and photon.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{binomial, FockSpace, Occupation, PureState};

/// Seedable, splittable generator used for every stochastic step.
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`. Each
/// trajectory of a Monte Carlo run owns one of these.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Photon counts observed on an ordered subset of modes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionPattern {
    pub modes: Vec<usize>,
    pub counts: Vec<usize>,
}

impl DetectionPattern {
    pub fn new(modes: impl Into<Vec<usize>>, counts: impl Into<Vec<usize>>) -> Result<Self> {
        let (modes, counts) = (modes.into(), counts.into());
        if modes.len() != counts.len() {
            return Err(Error::OccupationLength {
                expected: modes.len(),
                got: counts.len(),
            });
        }
        Ok(DetectionPattern { modes, counts })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

impl fmt::Display for DetectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .modes
            .iter()
            .zip(&self.counts)
            .map(|(m, c)| format!("{m}:{c}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Outcome of a destructive measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementResult {
    pub pattern: DetectionPattern,
    pub probability: f64,
    /// Normalized state of the unmeasured modes; `None` when every mode was
    /// measured.
    pub post_state: Option<PureState>,
}

/// Finite-efficiency, finite-resolution photon counter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorModel {
    pub efficiency: f64,
    pub max_resolved_count: usize,
}

impl DetectorModel {
    pub fn new(efficiency: f64, max_resolved_count: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::InvalidProbability(efficiency));
        }
        Ok(DetectorModel {
            efficiency,
            max_resolved_count,
        })
    }

    /// Unit efficiency and unbounded number resolution.
    pub fn ideal() -> Self {
        DetectorModel {
            efficiency: 1.0,
            max_resolved_count: usize::MAX,
        }
    }
}

fn remaining_space(space: FockSpace, measured: usize) -> Option<FockSpace> {
    FockSpace::new(space.mode_count() - measured, space.photon_cutoff()).ok()
}

fn keep_modes(space: FockSpace, modes: &[usize]) -> Vec<usize> {
    (0..space.mode_count())
        .filter(|m| !modes.contains(m))
        .collect()
}

fn validate_measurement(s: &PureState, modes: &[usize]) -> Result<()> {
    s.space().check_modes(modes)?;
    if s.is_zero() {
        return Err(Error::ZeroState);
    }
    Ok(())
}

/// Probability of every count pattern on `modes`, in pattern order.
/// Probabilities sum to `‖s‖²`; impossible patterns are omitted.
pub fn outcome_distribution(
    s: &PureState,
    modes: &[usize],
) -> Result<Vec<(DetectionPattern, f64)>> {
    validate_measurement(s, modes)?;
    let mut dist: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (o, a) in s.terms() {
        let counts: Vec<usize> = modes.iter().map(|&m| o.get(m)).collect();
        *dist.entry(counts).or_default() += a.norm_sqr();
    }
    Ok(dist
        .into_iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|(counts, p)| {
            (
                DetectionPattern {
                    modes: modes.to_vec(),
                    counts,
                },
                p,
            )
        })
        .collect())
}

/// Every count pattern on `modes` together with its unnormalized conditional
/// state on the remaining modes. The branch norms are the Born
/// probabilities. At least one mode must remain unmeasured.
pub fn split_branches(
    s: &PureState,
    modes: &[usize],
) -> Result<Vec<(DetectionPattern, PureState)>> {
    validate_measurement(s, modes)?;
    let space = remaining_space(s.space(), modes.len()).ok_or(Error::NoModes)?;
    let keep = keep_modes(s.space(), modes);
    let mut groups: BTreeMap<Vec<usize>, BTreeMap<Occupation, Complex64>> = BTreeMap::new();
    for (o, a) in s.terms() {
        let counts: Vec<usize> = modes.iter().map(|&m| o.get(m)).collect();
        let rest = Occupation(keep.iter().map(|&m| o.get(m)).collect());
        *groups.entry(counts).or_default().entry(rest).or_default() += a;
    }
    Ok(groups
        .into_iter()
        .map(|(counts, map)| {
            (
                DetectionPattern {
                    modes: modes.to_vec(),
                    counts,
                },
                PureState::from_map(space, map, s.prune_threshold()),
            )
        })
        .filter(|(_, b)| !b.is_zero())
        .collect())
}

/// Unnormalized conditional state for one pattern, measured modes removed.
pub fn project(s: &PureState, pattern: &DetectionPattern) -> Result<PureState> {
    validate_measurement(s, &pattern.modes)?;
    let space = remaining_space(s.space(), pattern.modes.len()).ok_or(Error::NoModes)?;
    let keep = keep_modes(s.space(), &pattern.modes);
    Ok(s.map_terms(space, |o, a| {
        pattern
            .modes
            .iter()
            .zip(&pattern.counts)
            .all(|(&m, &c)| o.get(m) == c)
            .then(|| (Occupation(keep.iter().map(|&m| o.get(m)).collect()), a))
    }))
}

/// Conditions on `pattern`, returning its Born probability and the
/// normalized conditional state.
pub fn postselect(s: &PureState, pattern: &DetectionPattern) -> Result<MeasurementResult> {
    if pattern.modes.len() != pattern.counts.len() {
        return Err(Error::OccupationLength {
            expected: pattern.modes.len(),
            got: pattern.counts.len(),
        });
    }
    validate_measurement(s, &pattern.modes)?;
    let matches = |o: &Occupation| {
        pattern
            .modes
            .iter()
            .zip(&pattern.counts)
            .all(|(&m, &c)| o.get(m) == c)
    };
    let probability: f64 = s
        .terms()
        .filter(|(o, _)| matches(o))
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if probability <= 0.0 {
        return Err(Error::HeraldImpossible {
            modes: pattern.modes.clone(),
            pattern: pattern.counts.clone(),
        });
    }
    let post_state = if pattern.modes.len() == s.mode_count() {
        None
    } else {
        Some(project(s, pattern)?.normalize()?.0)
    };
    Ok(MeasurementResult {
        pattern: pattern.clone(),
        probability,
        post_state,
    })
}

fn draw_pattern<R: Rng + ?Sized>(
    dist: &[(DetectionPattern, f64)],
    rng: &mut R,
) -> DetectionPattern {
    let total: f64 = dist.iter().map(|(_, p)| p).sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (pattern, p) in dist {
        acc += p;
        if target < acc {
            return pattern.clone();
        }
    }
    dist.last().expect("nonempty distribution").0.clone()
}

/// Draws a count pattern on `modes` with Born probabilities.
pub fn sample_outcome<R: Rng + ?Sized>(
    s: &PureState,
    modes: &[usize],
    rng: &mut R,
) -> Result<MeasurementResult> {
    let dist = outcome_distribution(s, modes)?;
    let pattern = draw_pattern(&dist, rng);
    postselect(s, &pattern)
}

/// Samples a count pattern and passes it through `model`: each photon is
/// registered with probability `efficiency`, and counts above
/// `max_resolved_count` are reported as `max_resolved_count`.
///
/// This is a trajectory: the post-state is conditioned on the photons that
/// actually arrived, and `probability` is the joint probability of that
/// arrival pattern and of the reported response.
pub fn detect_with_model<R: Rng + ?Sized>(
    s: &PureState,
    modes: &[usize],
    model: &DetectorModel,
    rng: &mut R,
) -> Result<MeasurementResult> {
    let arrived = sample_outcome(s, modes, rng)?;
    if model.efficiency >= 1.0
        && arrived
            .pattern
            .counts
            .iter()
            .all(|&c| c <= model.max_resolved_count)
    {
        return Ok(arrived);
    }
    let mut response_probability = 1.0;
    let mut reported = Vec::with_capacity(modes.len());
    for &n in &arrived.pattern.counts {
        let registered = if model.efficiency >= 1.0 {
            n
        } else {
            (0..n)
                .filter(|_| rng.random::<f64>() < model.efficiency)
                .count()
        };
        let shown = registered.min(model.max_resolved_count);
        response_probability *= if shown == model.max_resolved_count && registered >= shown {
            (shown..=n)
                .map(|k| binomial_pmf(n, k, model.efficiency))
                .sum::<f64>()
        } else {
            binomial_pmf(n, registered, model.efficiency)
        };
        reported.push(shown);
    }
    Ok(MeasurementResult {
        pattern: DetectionPattern {
            modes: modes.to_vec(),
            counts: reported,
        },
        probability: arrived.probability * response_probability,
        post_state: arrived.post_state,
    })
}

pub(crate) fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    binomial(n, k) as f64 * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// Result of a photon-presence check on a pair of rails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Presence {
    /// No photon on either rail.
    Empty,
    /// At least one photon across the pair.
    Occupied,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QndBranch {
    pub presence: Presence,
    pub probability: f64,
    pub post_state: PureState,
}

/// Nondemolition projection onto "no photon" / "at least one photon" across
/// the rail pair. No mode or photon is removed; branch states are
/// normalized and branch probabilities sum to `‖s‖²`.
pub fn qnd_photon_presence(s: &PureState, rail_modes: [usize; 2]) -> Result<Vec<QndBranch>> {
    validate_measurement(s, &rail_modes)?;
    let [a, b] = rail_modes;
    let mut out = Vec::new();
    for presence in [Presence::Empty, Presence::Occupied] {
        let branch = s.map_terms(s.space(), |o, amp| {
            let occupied = o.get(a) + o.get(b) > 0;
            (occupied == (presence == Presence::Occupied)).then(|| (o.clone(), amp))
        });
        if branch.is_zero() {
            continue;
        }
        let (post_state, probability) = branch.normalize()?;
        out.push(QndBranch {
            presence,
            probability,
            post_state,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn space(m: usize, n: usize) -> FockSpace {
        FockSpace::new(m, n).unwrap()
    }

    #[test]
    fn vacuum_has_single_all_zero_outcome() {
        let vac = PureState::vacuum(space(3, 2));
        let d = outcome_distribution(&vac, &[0, 2]).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].0.counts, vec![0, 0]);
        assert_eq!(d[0].1, 1.0);
    }

    #[test]
    fn single_photon_counted_with_certainty() {
        let s = PureState::basis(space(2, 1), [1, 0]).unwrap();
        let d = outcome_distribution(&s, &[0]).unwrap();
        assert_eq!(d, vec![(DetectionPattern::new([0], [1]).unwrap(), 1.0)]);
    }

    #[test]
    fn bunched_state_counts() {
        let s = PureState::from_terms(
            space(2, 2),
            [([2, 0], c(FRAC_1_SQRT_2)), ([0, 2], c(-FRAC_1_SQRT_2))],
        )
        .unwrap();
        let d = outcome_distribution(&s, &[0]).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].0.counts, vec![0]);
        assert!((d[0].1 - 0.5).abs() < 1e-15);
        assert_eq!(d[1].0.counts, vec![2]);
        assert!((d[1].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_state_is_rejected() {
        let z = PureState::zero(space(2, 1));
        assert_eq!(outcome_distribution(&z, &[0]), Err(Error::ZeroState));
        assert_eq!(
            outcome_distribution(&PureState::vacuum(space(2, 1)), &[0, 0]),
            Err(Error::RepeatedMode(0))
        );
    }

    #[test]
    fn postselect_examples() {
        let s = PureState::basis(space(2, 1), [1, 0]).unwrap();
        let r = postselect(&s, &DetectionPattern::new([0], [1]).unwrap()).unwrap();
        assert_eq!(r.probability, 1.0);
        assert_eq!(
            r.post_state.unwrap(),
            PureState::basis(space(1, 1), [0]).unwrap()
        );

        let sup = PureState::from_terms(
            space(2, 1),
            [([0, 1], c(FRAC_1_SQRT_2)), ([1, 0], c(FRAC_1_SQRT_2))],
        )
        .unwrap();
        let r = postselect(&sup, &DetectionPattern::new([0], [0]).unwrap()).unwrap();
        assert!((r.probability - 0.5).abs() < 1e-15);
        let post = r.post_state.unwrap();
        assert!(
            (post
                .fidelity(&PureState::basis(space(1, 1), [1]).unwrap())
                .unwrap()
                - 1.0)
                .abs()
                < 1e-15
        );
        assert!((post.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn impossible_herald_is_distinct_error() {
        let s = PureState::basis(space(2, 1), [1, 0]).unwrap();
        let err = postselect(&s, &DetectionPattern::new([1], [1]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::HeraldImpossible { .. }));
        let malformed = DetectionPattern {
            modes: vec![0, 1],
            counts: vec![1],
        };
        assert!(matches!(
            postselect(&s, &malformed),
            Err(Error::OccupationLength { .. })
        ));
    }

    #[test]
    fn measuring_every_mode_leaves_no_state() {
        let s = PureState::basis(space(2, 1), [0, 1]).unwrap();
        let r = postselect(&s, &DetectionPattern::new([0, 1], [0, 1]).unwrap()).unwrap();
        assert!(r.post_state.is_none());
    }

    #[test]
    fn deterministic_state_samples_its_outcome() {
        let s = PureState::basis(space(3, 2), [0, 2, 0]).unwrap();
        for seed in 0..20 {
            let r = sample_outcome(&s, &[1], &mut seeded_rng(seed)).unwrap();
            assert_eq!(r.pattern.counts, vec![2]);
        }
    }

    #[test]
    fn sampling_is_replayable() {
        let s = PureState::from_terms(space(2, 1), [([0, 1], c(0.6)), ([1, 0], c(0.8))]).unwrap();
        let run = |seed| {
            let mut rng = seeded_rng(seed);
            (0..50)
                .map(|_| sample_outcome(&s, &[0], &mut rng).unwrap().pattern.counts[0])
                .collect::<Vec<_>>()
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
    }

    #[test]
    fn detector_limits() {
        let s = PureState::basis(space(2, 3), [3, 0]).unwrap();
        let ideal = DetectorModel::ideal();
        for seed in 0..5 {
            let a = sample_outcome(&s, &[0], &mut seeded_rng(seed)).unwrap();
            let b = detect_with_model(&s, &[0], &ideal, &mut seeded_rng(seed)).unwrap();
            assert_eq!(a, b);
        }
        let blind = DetectorModel::new(0.0, 5).unwrap();
        let r = detect_with_model(&s, &[0], &blind, &mut seeded_rng(1)).unwrap();
        assert_eq!(r.pattern.counts, vec![0]);

        let coarse = DetectorModel::new(1.0, 2).unwrap();
        let r = detect_with_model(&s, &[0], &coarse, &mut seeded_rng(1)).unwrap();
        assert_eq!(r.pattern.counts, vec![2]);
        assert!((r.probability - 1.0).abs() < 1e-15);

        assert!(DetectorModel::new(1.2, 1).is_err());
    }

    #[test]
    fn qnd_examples() {
        let s = PureState::basis(space(2, 1), [1, 0]).unwrap();
        let b = qnd_photon_presence(&s, [0, 1]).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].presence, Presence::Occupied);
        assert_eq!(b[0].post_state, s);

        let vac = PureState::vacuum(space(2, 1));
        let b = qnd_photon_presence(&vac, [0, 1]).unwrap();
        assert_eq!(b[0].presence, Presence::Empty);
        assert_eq!(b[0].probability, 1.0);

        // (|0,0⟩|1,0⟩ + |1,0⟩|0,0⟩)/√2, check the first rail pair
        let s = PureState::from_terms(
            space(4, 1),
            [
                ([0, 0, 1, 0], c(FRAC_1_SQRT_2)),
                ([1, 0, 0, 0], c(FRAC_1_SQRT_2)),
            ],
        )
        .unwrap();
        let b = qnd_photon_presence(&s, [0, 1]).unwrap();
        assert_eq!(b.len(), 2);
        for branch in &b {
            assert!((branch.probability - 0.5).abs() < 1e-15);
            assert!((branch.post_state.norm_sqr() - 1.0).abs() < 1e-12);
            assert_eq!(branch.post_state.mode_count(), 4);
        }
        assert_eq!(
            b[0].post_state,
            PureState::basis(space(4, 1), [0, 0, 1, 0]).unwrap()
        );
        assert_eq!(
            b[1].post_state,
            PureState::basis(space(4, 1), [1, 0, 0, 0]).unwrap()
        );
    }

    #[test]
    fn split_branches_cover_the_state() {
        let s = PureState::from_terms(
            space(3, 2),
            [
                ([1, 1, 0], c(0.6)),
                ([0, 1, 1], c(0.0)),
                ([2, 0, 0], c(0.8)),
            ],
        )
        .unwrap();
        let b = split_branches(&s, &[0]).unwrap();
        let total: f64 = b.iter().map(|(_, st)| st.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert_eq!(b.len(), 2);
    }
}
