//! Few-qubit state-vector simulation of amplitude damping and its
//! probabilistic reversal by rotated-Hadamard/CNOT ancilla circuits.
//!
//! Registers are big-endian: qubit 0 is the most significant bit of a basis
//! index, so `|01>` has index 1.

pub mod channels;
pub mod error;
pub mod metrics;
pub mod protocols;
pub mod tensor;

pub use channels::{Branch, Completion, DampingParams, Outcome};
pub use error::{Error, Result};
pub use metrics::{concurrence_mixed, concurrence_pure, fidelity_pure_mixed, ConcurrenceValue, FidelityValue};
pub use protocols::{RecoveryResult, SchemeParams, TwoQubitCoeffs};
pub use tensor::{
    kron, partial_trace, pure_to_density, renormalize, DensityMatrix, Operator, PartialTrace, Role, StateVector,
};
