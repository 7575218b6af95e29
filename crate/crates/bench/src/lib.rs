//! Shared inputs for the benchmarks.

use ampshield_core::{pure_to_density, DampingParams, DensityMatrix, TwoQubitCoeffs};

pub fn caption_states() -> [TwoQubitCoeffs; 2] {
    [
        TwoQubitCoeffs::real(0.7, 0.35, 0.4, 0.48).unwrap(),
        TwoQubitCoeffs::real(0.10, 0.55, -0.60, 0.57).unwrap(),
    ]
}

pub fn damping(p: f64) -> DampingParams {
    DampingParams::new(p).unwrap()
}

/// A rank-2 two-qubit state: an equal mixture of two caption states.
pub fn mixed_state() -> DensityMatrix {
    let [a, b] = caption_states().map(|c| pure_to_density(&c.to_state()).unwrap());
    a.mix(&b, 0.5).unwrap()
}
