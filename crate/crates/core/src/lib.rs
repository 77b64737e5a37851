//! Exact Fock-space simulation of linear-optical quantum gates.

pub mod error;
pub mod fock;
pub mod gates;
pub mod interferometer;
pub mod loss;
pub mod loss_code;
pub mod measurement;
pub mod memory;
pub mod permanent;
pub mod random;
pub mod scenario;
pub mod teleport;

pub use error::{Error, Result};
pub use fock::{FockSpace, Occupation, PureState};
pub use interferometer::{Element, ModeUnitary, OpticalCircuit};
