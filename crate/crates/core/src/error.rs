use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("a Fock space needs at least one mode")]
    NoModes,

    #[error("occupation has {got} entries but the space has {expected} modes")]
    OccupationLength { expected: usize, got: usize },

    #[error("{photons} photons exceed the photon cutoff {cutoff}")]
    CutoffExceeded { photons: usize, cutoff: usize },

    #[error("states live on different spaces ({left} vs {right})")]
    SpaceMismatch { left: String, right: String },

    #[error("operation needs a nonzero state")]
    ZeroState,

    #[error("mode {mode} is out of range for {mode_count} modes")]
    ModeOutOfRange { mode: usize, mode_count: usize },

    #[error("modes must be distinct, {0} appears more than once")]
    RepeatedMode(usize),

    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    DimensionMismatch {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("herald impossible: pattern {pattern:?} on modes {modes:?} has zero probability")]
    HeraldImpossible {
        modes: Vec<usize>,
        pattern: Vec<usize>,
    },

    #[error("mode {mode} carries {photons} photons, outside the gate's domain of at most {max}")]
    OutsideGateDomain {
        mode: usize,
        photons: usize,
        max: usize,
    },

    #[error("state leaves the logical subspace of the encoded qubits (leakage {leakage:e})")]
    NonLogicalInput { leakage: f64 },

    #[error("NS parameter search did not converge, residuals {residuals:?}")]
    SolverDiverged { residuals: [f64; 3] },

    #[error("resource size n = {0} is outside the supported range 1..=3")]
    UnsupportedResource(usize),

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("{0}")]
    Config(String),
}
