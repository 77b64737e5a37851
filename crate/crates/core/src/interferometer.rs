//! Passive linear optics: beam splitters, phase shifters, their action on Fock
//! states, and circuit composition.
//!
//! Mode matrices follow the creation-operator picture: an element with mode
//! matrix `U` maps `a†ₖ → Σₗ U[l,k] a†ₗ`, so column `k` is the image of input
//! mode `k`. A circuit's matrix is the product of its embedded element
//! matrices in application order (`Uₙ ⋯ U₁`).
//!
//! Beam splitter convention on modes `(i, j)`:
//!
//! ```text
//! a†ᵢ →  cosθ·a†ᵢ + e^{iφ} sinθ·a†ⱼ
//! a†ⱼ → −e^{−iφ} sinθ·a†ᵢ + cosθ·a†ⱼ
//! ```
//!
//! Two evaluation paths exist and are kept independent: [`apply_element`]
//! expands each two-mode element binomially, and [`apply_mode_unitary`] uses
//! permanents of the folded circuit matrix.

use std::collections::HashMap;
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{factorial, sector, Occupation, PureState};
use crate::permanent::ryser;

/// Allowed entrywise deviation of `U·U†` from the identity.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// A single optical element acting on one or two modes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Element {
    Beamsplitter {
        theta: f64,
        phi: f64,
        modes: [usize; 2],
    },
    Phaseshift {
        phi: f64,
        mode: usize,
    },
}

impl Element {
    pub fn beamsplitter(theta: f64, phi: f64, mode_i: usize, mode_j: usize) -> Self {
        Element::Beamsplitter {
            theta,
            phi,
            modes: [mode_i, mode_j],
        }
    }

    /// 50:50 splitter with `φ = 0`.
    pub fn balanced(mode_i: usize, mode_j: usize) -> Self {
        Self::beamsplitter(std::f64::consts::FRAC_PI_4, 0.0, mode_i, mode_j)
    }

    pub fn phaseshift(phi: f64, mode: usize) -> Self {
        Element::Phaseshift { phi, mode }
    }

    pub fn modes(&self) -> Vec<usize> {
        match *self {
            Element::Beamsplitter { modes, .. } => modes.to_vec(),
            Element::Phaseshift { mode, .. } => vec![mode],
        }
    }

    pub fn inverse(&self) -> Self {
        match *self {
            Element::Beamsplitter { theta, phi, modes } => Element::Beamsplitter {
                theta: -theta,
                phi,
                modes,
            },
            Element::Phaseshift { phi, mode } => Element::Phaseshift { phi: -phi, mode },
        }
    }

    pub fn validate(&self, mode_count: usize) -> Result<()> {
        for m in self.modes() {
            if m >= mode_count {
                return Err(Error::ModeOutOfRange {
                    mode: m,
                    mode_count,
                });
            }
        }
        if let Element::Beamsplitter { modes: [i, j], .. } = *self {
            if i == j {
                return Err(Error::RepeatedMode(i));
            }
        }
        Ok(())
    }

    /// The element's matrix embedded in `mode_count` modes.
    pub fn embedded(&self, mode_count: usize) -> Result<ModeUnitary> {
        self.validate(mode_count)?;
        let mut u = ModeUnitary::identity(mode_count);
        match *self {
            Element::Beamsplitter {
                theta,
                phi,
                modes: [i, j],
            } => {
                let b = beamsplitter_unitary(theta, phi);
                u.entries[[i, i]] = b.entries[[0, 0]];
                u.entries[[j, i]] = b.entries[[1, 0]];
                u.entries[[i, j]] = b.entries[[0, 1]];
                u.entries[[j, j]] = b.entries[[1, 1]];
            }
            Element::Phaseshift { phi, mode } => {
                u.entries[[mode, mode]] = Complex64::from_polar(1.0, phi);
            }
        }
        Ok(u)
    }
}

/// Square unitary acting on mode creation operators.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    entries: Array2<Complex64>,
}

impl ModeUnitary {
    pub fn new(entries: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let u = ModeUnitary { entries };
        let deviation = u.unitarity_deviation();
        if deviation > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    pub fn identity(dimension: usize) -> Self {
        ModeUnitary {
            entries: Array2::from_shape_fn((dimension, dimension), |(i, j)| {
                Complex64::new((i == j) as u8 as f64, 0.0)
            }),
        }
    }

    /// Unitary discrete Fourier transform, `ω^{jk}/√n` with `ω = e^{2πi/n}`.
    pub fn fourier(dimension: usize) -> Self {
        let n = dimension as f64;
        ModeUnitary {
            entries: Array2::from_shape_fn((dimension, dimension), |(j, k)| {
                let angle = 2.0 * std::f64::consts::PI * ((j * k) % dimension) as f64 / n;
                Complex64::from_polar(1.0 / n.sqrt(), angle)
            }),
        }
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        ModeUnitary {
            entries: self.entries.t().mapv(|z| z.conj()),
        }
    }

    /// `later · self`: the unitary of applying `self` and then `later`.
    pub fn then(&self, later: &ModeUnitary) -> Result<Self> {
        if later.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                rows: later.dimension(),
                cols: later.dimension(),
            });
        }
        Ok(ModeUnitary {
            entries: later.entries.dot(&self.entries),
        })
    }

    /// Largest entrywise deviation of `U·U†` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.entries.dot(&self.adjoint().entries);
        prod.indexed_iter()
            .map(|((i, j), z)| (z - Complex64::new((i == j) as u8 as f64, 0.0)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise distance to another matrix of the same size.
    pub fn max_distance(&self, other: &ModeUnitary) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// The 2×2 beam splitter matrix for `(θ, φ)` in the crate convention.
pub fn beamsplitter_unitary(theta: f64, phi: f64) -> ModeUnitary {
    let (s, c) = theta.sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    let mut m = Array2::zeros((2, 2));
    m[[0, 0]] = Complex64::new(c, 0.0);
    m[[1, 0]] = e * s;
    m[[0, 1]] = -e.conj() * s;
    m[[1, 1]] = Complex64::new(c, 0.0);
    ModeUnitary { entries: m }
}

/// Ordered list of elements on a fixed number of modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRecord")]
pub struct OpticalCircuit {
    mode_count: usize,
    elements: Vec<Element>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitRecord {
    mode_count: usize,
    elements: Vec<Element>,
}

impl TryFrom<CircuitRecord> for OpticalCircuit {
    type Error = Error;

    fn try_from(r: CircuitRecord) -> Result<Self> {
        OpticalCircuit::from_elements(r.mode_count, r.elements)
    }
}

impl OpticalCircuit {
    pub fn new(mode_count: usize) -> Self {
        OpticalCircuit {
            mode_count,
            elements: Vec::new(),
        }
    }

    pub fn from_elements(mode_count: usize, elements: Vec<Element>) -> Result<Self> {
        let mut c = Self::new(mode_count);
        for e in elements {
            c.push(e)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, element: Element) -> Result<&mut Self> {
        element.validate(self.mode_count)?;
        self.elements.push(element);
        Ok(self)
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// The circuit that undoes this one.
    pub fn inverse(&self) -> Self {
        OpticalCircuit {
            mode_count: self.mode_count,
            elements: self.elements.iter().rev().map(Element::inverse).collect(),
        }
    }

    /// Folds the elements into a single mode matrix.
    pub fn mode_matrix(&self) -> ModeUnitary {
        let mut u = ModeUnitary::identity(self.mode_count);
        for e in &self.elements {
            let step = e.embedded(self.mode_count).expect("validated on push");
            u.entries = step.entries.dot(&u.entries);
        }
        u
    }

    /// Sequential path: applies each element in turn.
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        if state.mode_count() != self.mode_count {
            return Err(Error::DimensionMismatch {
                expected: state.mode_count(),
                rows: self.mode_count,
                cols: self.mode_count,
            });
        }
        let mut s = state.clone();
        for e in &self.elements {
            s = apply_element(&s, e)?;
        }
        Ok(s)
    }

    /// Permanent path: folds the circuit and applies the resulting unitary.
    pub fn apply_via_permanent(&self, state: &PureState) -> Result<PureState> {
        apply_mode_unitary(state, &self.mode_matrix())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Beamsplitter { theta, phi, modes } => {
                write!(f, "BS(θ={theta:.6}, φ={phi:.6}) {modes:?}")
            }
            Element::Phaseshift { phi, mode } => write!(f, "PS(φ={phi:.6}) [{mode}]"),
        }
    }
}

/// Coefficients of `(u₀₀a†ᵢ + u₁₀a†ⱼ)^p (u₀₁a†ᵢ + u₁₁a†ⱼ)^q |0⟩ / √(p!q!)` on
/// the normalized outputs `|x, p+q−x⟩`, indexed by `x`.
fn two_mode_row(b: &Array2<Complex64>, p: usize, q: usize) -> Vec<Complex64> {
    let total = p + q;
    // Expand each factor binomially, then convolve.
    let expand = |n: usize, ci: Complex64, cj: Complex64| -> Vec<Complex64> {
        (0..=n)
            .map(|x| ci.powu(x as u32) * cj.powu((n - x) as u32) * binom_f(n, x))
            .collect()
    };
    let first = expand(p, b[[0, 0]], b[[1, 0]]);
    let second = expand(q, b[[0, 1]], b[[1, 1]]);
    let mut raw = vec![Complex64::new(0.0, 0.0); total + 1];
    for (x, a) in first.iter().enumerate() {
        for (y, c) in second.iter().enumerate() {
            raw[x + y] += a * c;
        }
    }
    let norm_in = (factorial(p) * factorial(q)).sqrt();
    raw.iter()
        .enumerate()
        .map(|(x, z)| z * (factorial(x) * factorial(total - x)).sqrt() / norm_in)
        .collect()
}

fn binom_f(n: usize, k: usize) -> f64 {
    crate::fock::binomial(n, k) as f64
}

/// Applies one element to a state through its two-mode Fock matrix elements.
pub fn apply_element(state: &PureState, element: &Element) -> Result<PureState> {
    element.validate(state.mode_count())?;
    match *element {
        Element::Phaseshift { phi, mode } => Ok(state.map_terms(state.space(), |o, a| {
            Some((
                o.clone(),
                a * Complex64::from_polar(1.0, phi * o.get(mode) as f64),
            ))
        })),
        Element::Beamsplitter {
            theta,
            phi,
            modes: [i, j],
        } => {
            let b = beamsplitter_unitary(theta, phi).entries;
            // Rows are cached per (p, q) sector within this application.
            let mut cache: HashMap<(usize, usize), Vec<Complex64>> = HashMap::new();
            let mut out = std::collections::BTreeMap::<Occupation, Complex64>::new();
            for (o, a) in state.terms() {
                let (p, q) = (o.get(i), o.get(j));
                let row = cache
                    .entry((p, q))
                    .or_insert_with(|| two_mode_row(&b, p, q));
                for (x, coeff) in row.iter().enumerate() {
                    if coeff.norm_sqr() == 0.0 {
                        continue;
                    }
                    let mut counts = o.counts().to_vec();
                    counts[i] = x;
                    counts[j] = p + q - x;
                    *out.entry(Occupation(counts)).or_default() += a * coeff;
                }
            }
            Ok(PureState::from_map(
                state.space(),
                out,
                state.prune_threshold(),
            ))
        }
    }
}

/// Applies a full `m×m` mode unitary through permanents.
pub fn apply_mode_unitary(state: &PureState, u: &ModeUnitary) -> Result<PureState> {
    if u.dimension() != state.mode_count() {
        return Err(Error::DimensionMismatch {
            expected: state.mode_count(),
            rows: u.dimension(),
            cols: u.dimension(),
        });
    }
    let modes: Vec<usize> = (0..state.mode_count()).collect();
    apply_unitary_on_modes(state, u, &modes)
}

/// Applies a `k×k` unitary to the listed modes (in that order), leaving all
/// other modes untouched. Amplitudes are `per(U_sub)/√(∏mᵢ!∏nⱼ!)` with rows
/// and columns of `U_sub` repeated per output and input occupation.
pub fn apply_unitary_on_modes(
    state: &PureState,
    u: &ModeUnitary,
    modes: &[usize],
) -> Result<PureState> {
    if u.dimension() != modes.len() {
        return Err(Error::DimensionMismatch {
            expected: modes.len(),
            rows: u.dimension(),
            cols: u.dimension(),
        });
    }
    state.space().check_modes(modes)?;
    let k = modes.len();

    let photon_counts: std::collections::BTreeSet<usize> = state
        .terms()
        .map(|(o, _)| modes.iter().map(|&m| o.get(m)).sum())
        .collect();
    let sectors: HashMap<usize, Vec<Occupation>> = photon_counts
        .into_iter()
        .map(|n| (n, sector(k, n)))
        .collect();

    let terms: Vec<(&Occupation, &Complex64)> = state.terms().collect();
    let contributions: Vec<Vec<(Occupation, Complex64)>> = terms
        .par_iter()
        .map(|(o, a)| {
            let input: Vec<usize> = modes.iter().map(|&m| o.get(m)).collect();
            let n: usize = input.iter().sum();
            let cols: Vec<usize> = repeat_indices(&input);
            let in_norm: f64 = input.iter().map(|&c| factorial(c)).product();
            let mut sub = Array2::<Complex64>::zeros((n, n));
            let mut out = Vec::new();
            for target in &sectors[&n] {
                let rows = repeat_indices(target.counts());
                for (r, &row) in rows.iter().enumerate() {
                    for (c, &col) in cols.iter().enumerate() {
                        sub[[r, c]] = u.entries[[row, col]];
                    }
                }
                let amp = ryser(sub.view()) / (in_norm * target.factorial_product()).sqrt();
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                let mut counts = o.counts().to_vec();
                for (slot, &m) in modes.iter().enumerate() {
                    counts[m] = target.get(slot);
                }
                out.push((Occupation(counts), **a * amp));
            }
            out
        })
        .collect();

    let mut map = std::collections::BTreeMap::<Occupation, Complex64>::new();
    for (occ, amp) in contributions.into_iter().flatten() {
        *map.entry(occ).or_default() += amp;
    }
    Ok(PureState::from_map(
        state.space(),
        map,
        state.prune_threshold(),
    ))
}

fn repeat_indices(counts: &[usize]) -> Vec<usize> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| std::iter::repeat_n(i, n))
        .collect()
}
