//! Fock-space bookkeeping: mode spaces, occupation vectors and sparse pure
//! states.
//!
//! A [`PureState`] is a sparse map from occupation vectors to complex
//! amplitudes. States are allowed to be subnormalized: after a herald the
//! squared norm of a branch is exactly its probability, so branch algebra
//! composes without carrying probabilities on the side.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes with magnitude below this are dropped from sparse maps.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-14;

/// Number of occupation vectors over `modes` modes with total photon number
/// at most `photons`, i.e. `C(modes + photons, modes)`.
pub fn count_up_to(modes: usize, photons: usize) -> usize {
    binomial(modes + photons, modes)
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// All occupations of `modes` modes holding exactly `photons` photons, in
/// lexicographic order.
pub fn sector(modes: usize, photons: usize) -> Vec<Occupation> {
    fn fill(prefix: &mut Vec<usize>, modes: usize, left: usize, out: &mut Vec<Occupation>) {
        if prefix.len() + 1 == modes {
            prefix.push(left);
            out.push(Occupation(prefix.clone()));
            prefix.pop();
            return;
        }
        for n in 0..=left {
            prefix.push(n);
            fill(prefix, modes, left - n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if modes == 0 {
        if photons == 0 {
            out.push(Occupation(Vec::new()));
        }
        return out;
    }
    fill(&mut Vec::with_capacity(modes), modes, photons, &mut out);
    out
}

/// Per-mode photon counts labelling one Fock basis vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Occupation(pub Vec<usize>);

impl Occupation {
    pub fn new(counts: impl Into<Vec<usize>>) -> Self {
        Occupation(counts.into())
    }

    pub fn vacuum(modes: usize) -> Self {
        Occupation(vec![0; modes])
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, mode: usize) -> usize {
        self.0[mode]
    }

    /// Product of the factorials of the counts.
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&n| factorial(n)).product()
    }

    pub fn concat(&self, other: &Occupation) -> Occupation {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Occupation(v)
    }
}

impl From<Vec<usize>> for Occupation {
    fn from(v: Vec<usize>) -> Self {
        Occupation(v)
    }
}

impl From<&[usize]> for Occupation {
    fn from(v: &[usize]) -> Self {
        Occupation(v.to_vec())
    }
}

impl<const N: usize> From<[usize; N]> for Occupation {
    fn from(v: [usize; N]) -> Self {
        Occupation(v.to_vec())
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// A set of bosonic modes together with the largest total photon number a
/// state on it may carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockSpace {
    mode_count: usize,
    photon_cutoff: usize,
}

impl FockSpace {
    pub fn new(mode_count: usize, photon_cutoff: usize) -> Result<Self> {
        if mode_count == 0 {
            return Err(Error::NoModes);
        }
        Ok(FockSpace {
            mode_count,
            photon_cutoff,
        })
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn photon_cutoff(&self) -> usize {
        self.photon_cutoff
    }

    /// Number of basis vectors, counting every total photon number up to the
    /// cutoff.
    pub fn dimension(&self) -> usize {
        count_up_to(self.mode_count, self.photon_cutoff)
    }

    pub fn with_cutoff(&self, photon_cutoff: usize) -> Self {
        FockSpace {
            mode_count: self.mode_count,
            photon_cutoff,
        }
    }

    pub fn validate(&self, occ: &Occupation) -> Result<()> {
        if occ.len() != self.mode_count {
            return Err(Error::OccupationLength {
                expected: self.mode_count,
                got: occ.len(),
            });
        }
        let photons = occ.total();
        if photons > self.photon_cutoff {
            return Err(Error::CutoffExceeded {
                photons,
                cutoff: self.photon_cutoff,
            });
        }
        Ok(())
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.mode_count {
            return Err(Error::ModeOutOfRange {
                mode,
                mode_count: self.mode_count,
            });
        }
        Ok(())
    }

    /// Checks that `modes` are in range and pairwise distinct.
    pub fn check_modes(&self, modes: &[usize]) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &m in modes {
            self.check_mode(m)?;
            if !seen.insert(m) {
                return Err(Error::RepeatedMode(m));
            }
        }
        Ok(())
    }

    /// Position of `occ` in the lexicographic enumeration of the basis.
    pub fn index_of(&self, occ: &Occupation) -> Result<usize> {
        self.validate(occ)?;
        let m = self.mode_count;
        let mut index = 0;
        let mut remaining = self.photon_cutoff;
        for (i, &n) in occ.counts().iter().enumerate() {
            let tail = m - i - 1;
            for v in 0..n {
                index += count_up_to(tail, remaining - v);
            }
            remaining -= n;
        }
        Ok(index)
    }

    pub fn occupation_at(&self, mut index: usize) -> Option<Occupation> {
        if index >= self.dimension() {
            return None;
        }
        let m = self.mode_count;
        let mut counts = Vec::with_capacity(m);
        let mut remaining = self.photon_cutoff;
        for i in 0..m {
            let tail = m - i - 1;
            let mut v = 0;
            loop {
                let block = count_up_to(tail, remaining - v);
                if index < block {
                    break;
                }
                index -= block;
                v += 1;
            }
            counts.push(v);
            remaining -= v;
        }
        Some(Occupation(counts))
    }

    /// Every basis vector, in index order.
    pub fn basis(&self) -> impl Iterator<Item = Occupation> + '_ {
        (0..self.dimension()).filter_map(move |i| self.occupation_at(i))
    }
}

impl fmt::Display for FockSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} modes, cutoff {}",
            self.mode_count, self.photon_cutoff
        )
    }
}

/// Sparse, possibly subnormalized, pure state on a [`FockSpace`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRecord", into = "StateRecord")]
pub struct PureState {
    space: FockSpace,
    amplitudes: BTreeMap<Occupation, Complex64>,
    prune_threshold: f64,
}

impl PureState {
    pub fn zero(space: FockSpace) -> Self {
        PureState {
            space,
            amplitudes: BTreeMap::new(),
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
        }
    }

    pub fn vacuum(space: FockSpace) -> Self {
        let mut s = Self::zero(space);
        s.amplitudes.insert(
            Occupation::vacuum(space.mode_count()),
            Complex64::new(1.0, 0.0),
        );
        s
    }

    pub fn basis(space: FockSpace, occ: impl Into<Occupation>) -> Result<Self> {
        let occ = occ.into();
        space.validate(&occ)?;
        let mut s = Self::zero(space);
        s.amplitudes.insert(occ, Complex64::new(1.0, 0.0));
        Ok(s)
    }

    /// Builds a state from `(occupation, amplitude)` terms. Repeated
    /// occupations are summed.
    pub fn from_terms<I, O>(space: FockSpace, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (O, Complex64)>,
        O: Into<Occupation>,
    {
        let mut s = Self::zero(space);
        for (occ, amp) in terms {
            let occ = occ.into();
            space.validate(&occ)?;
            *s.amplitudes.entry(occ).or_default() += amp;
        }
        s.prune_in_place();
        Ok(s)
    }

    pub(crate) fn from_map(
        space: FockSpace,
        amplitudes: BTreeMap<Occupation, Complex64>,
        prune_threshold: f64,
    ) -> Self {
        let mut s = PureState {
            space,
            amplitudes,
            prune_threshold,
        };
        s.prune_in_place();
        s
    }

    pub fn with_prune_threshold(mut self, threshold: f64) -> Self {
        self.prune_threshold = threshold;
        self.prune_in_place();
        self
    }

    pub fn prune_threshold(&self) -> f64 {
        self.prune_threshold
    }

    fn prune_in_place(&mut self) {
        let t = self.prune_threshold;
        self.amplitudes.retain(|_, a| a.norm() >= t);
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn mode_count(&self) -> usize {
        self.space.mode_count()
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&Occupation, &Complex64)> + '_ {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, occ: &[usize]) -> Complex64 {
        self.amplitudes
            .get(&Occupation(occ.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    /// Number of stored basis terms.
    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Total photon numbers present in the support.
    pub fn photon_numbers(&self) -> BTreeSet<usize> {
        self.amplitudes.keys().map(Occupation::total).collect()
    }

    /// Largest photon count found on `mode` anywhere in the support.
    pub fn max_photons_in(&self, mode: usize) -> usize {
        self.amplitudes
            .keys()
            .map(|o| o.get(mode))
            .max()
            .unwrap_or(0)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let map = self
            .amplitudes
            .iter()
            .map(|(o, a)| (o.clone(), a * factor))
            .collect();
        Self::from_map(self.space, map, self.prune_threshold)
    }

    pub fn add(&self, other: &PureState) -> Result<Self> {
        self.same_space(other)?;
        let mut map = self.amplitudes.clone();
        for (o, a) in &other.amplitudes {
            *map.entry(o.clone()).or_default() += a;
        }
        Ok(Self::from_map(self.space, map, self.prune_threshold))
    }

    fn same_space(&self, other: &PureState) -> Result<()> {
        if self.space.mode_count() != other.space.mode_count() {
            return Err(Error::SpaceMismatch {
                left: self.space.to_string(),
                right: other.space.to_string(),
            });
        }
        Ok(())
    }

    /// Tensor product on the concatenated mode list. The result cutoff is the
    /// sum of both cutoffs, so it can never overflow.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let cutoff = self.space.photon_cutoff() + other.space.photon_cutoff();
        self.tensor_with_cutoff(other, cutoff)
    }

    /// Tensor product into a space with an explicit photon cutoff; a product
    /// term exceeding it is an error rather than being truncated.
    pub fn tensor_with_cutoff(&self, other: &PureState, cutoff: usize) -> Result<Self> {
        let space = FockSpace::new(self.mode_count() + other.mode_count(), cutoff)?;
        let mut map = BTreeMap::new();
        for (oa, a) in &self.amplitudes {
            for (ob, b) in &other.amplitudes {
                let occ = oa.concat(ob);
                space.validate(&occ)?;
                map.insert(occ, a * b);
            }
        }
        Ok(Self::from_map(
            space,
            map,
            self.prune_threshold.min(other.prune_threshold),
        ))
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &PureState) -> Result<Complex64> {
        self.same_space(other)?;
        let (small, large, flip) = if self.amplitudes.len() <= other.amplitudes.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (o, a) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(o) {
                acc += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        Ok(acc)
    }

    /// Returns the normalized state together with the input's squared norm.
    pub fn normalize(&self) -> Result<(Self, f64)> {
        let p = self.norm_sqr();
        if p <= 0.0 || self.is_zero() {
            return Err(Error::ZeroState);
        }
        let inv = 1.0 / p.sqrt();
        let map = self
            .amplitudes
            .iter()
            .map(|(o, a)| (o.clone(), a * inv))
            .collect();
        Ok((
            PureState {
                space: self.space,
                amplitudes: map,
                prune_threshold: self.prune_threshold,
            },
            p,
        ))
    }

    /// `|⟨a|b⟩|² / (‖a‖²‖b‖²)`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        let na = self.norm_sqr();
        let nb = other.norm_sqr();
        if na <= 0.0 || nb <= 0.0 {
            return Err(Error::ZeroState);
        }
        let ip = self.inner_product(other)?;
        Ok((ip.norm_sqr() / (na * nb)).clamp(0.0, 1.0))
    }

    /// Reorders modes so that new mode `k` is old mode `order[k]`.
    pub fn permute_modes(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.mode_count() {
            return Err(Error::OccupationLength {
                expected: self.mode_count(),
                got: order.len(),
            });
        }
        self.space.check_modes(order)?;
        let map = self
            .amplitudes
            .iter()
            .map(|(o, a)| (Occupation(order.iter().map(|&m| o.get(m)).collect()), *a))
            .collect();
        Ok(Self::from_map(self.space, map, self.prune_threshold))
    }

    /// Applies `f` to every term; terms mapped onto the same occupation are
    /// summed.
    pub(crate) fn map_terms<F>(&self, space: FockSpace, mut f: F) -> Self
    where
        F: FnMut(&Occupation, Complex64) -> Option<(Occupation, Complex64)>,
    {
        let mut map: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (o, a) in &self.amplitudes {
            if let Some((no, na)) = f(o, *a) {
                *map.entry(no).or_default() += na;
            }
        }
        Self::from_map(space, map, self.prune_threshold)
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.amplitudes.is_empty() {
            return write!(f, "0");
        }
        for (i, (o, a)) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i){}", a.re, a.im, o)?;
        }
        Ok(())
    }
}

/// JSON form of a [`PureState`]: amplitudes as `[occupation, re, im]` triples.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    pub mode_count: usize,
    pub photon_cutoff: usize,
    pub amplitudes: Vec<(Vec<usize>, f64, f64)>,
}

impl From<PureState> for StateRecord {
    fn from(s: PureState) -> Self {
        StateRecord {
            mode_count: s.space.mode_count(),
            photon_cutoff: s.space.photon_cutoff(),
            amplitudes: s
                .amplitudes
                .into_iter()
                .map(|(o, a)| (o.0, a.re, a.im))
                .collect(),
        }
    }
}

impl TryFrom<StateRecord> for PureState {
    type Error = Error;

    fn try_from(r: StateRecord) -> Result<Self> {
        let space = FockSpace::new(r.mode_count, r.photon_cutoff)?;
        PureState::from_terms(
            space,
            r.amplitudes
                .into_iter()
                .map(|(o, re, im)| (Occupation(o), Complex64::new(re, im))),
        )
    }
}
