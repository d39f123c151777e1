//! Two qubits coupled to a quantum kicked rotator acting as a chaotic
//! environment, together with the reduced phase-kick channel descriptions
//! (Markovian and with two-step angle memory) and the classical standard map
//! they are derived from.

pub mod bessel;
pub mod chirikov;
pub mod entanglement;
pub mod error;
pub mod experiments;
pub mod floquet;
pub mod linalg;
pub mod nonmarkov;
pub mod phase_kick;
pub mod state;

pub use error::{Error, Result};
pub use floquet::{evolve_record, FloquetOperator, TimeSeriesRecord};
pub use state::{CompositeState, ModelParams, TwoQubitDensity};
