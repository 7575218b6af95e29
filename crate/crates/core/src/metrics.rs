//! Entanglement and state-quality measures.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::TwoQubitCoeffs;
use crate::tensor::{DensityMatrix, StateVector, NORM_TOLERANCE};

/// Concurrence clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ConcurrenceValue(f64);

impl ConcurrenceValue {
    pub fn new(raw: f64) -> Self {
        ConcurrenceValue(raw.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Fidelity clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct FidelityValue(f64);

impl FidelityValue {
    pub fn new(raw: f64) -> Self {
        FidelityValue(raw.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `2 |alpha delta - beta gamma|`.
pub fn concurrence_pure(coeffs: &TwoQubitCoeffs) -> ConcurrenceValue {
    ConcurrenceValue::new(2.0 * coeffs.entanglement_amplitude())
}

/// `sigma_y (x) sigma_y`, which is real.
fn spin_flip_operator() -> DMatrix<Complex64> {
    let mut yy = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
    yy[(0, 3)] = Complex64::new(-1.0, 0.0);
    yy[(1, 2)] = Complex64::new(1.0, 0.0);
    yy[(2, 1)] = Complex64::new(1.0, 0.0);
    yy[(3, 0)] = Complex64::new(-1.0, 0.0);
    yy
}

/// Spin-flipped state `(sigma_y (x) sigma_y) rho^* (sigma_y (x) sigma_y)`.
pub fn spin_flip(rho: &DensityMatrix) -> DMatrix<Complex64> {
    let yy = spin_flip_operator();
    &yy * rho.matrix().conjugate() * &yy
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    rho.validate()
}

/// Square roots of the eigenvalues of `rho * spin_flip(rho)`, largest first.
///
/// Computed as the singular values of the complex-symmetric matrix
/// `W^T (sigma_y (x) sigma_y) W` for a factor `rho = W W^dagger`; this has the
/// same spectrum squared and stays accurate when `rho` is rank deficient.
pub fn wootters_spectrum(rho: &DensityMatrix) -> Result<[f64; 4]> {
    require_two_qubit(rho)?;
    let w = rho.factor();
    let tau = w.transpose() * spin_flip_operator() * &w;
    let mut sv: Vec<f64> = tau.singular_values().iter().map(|&s| s.max(0.0)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok([sv[0], sv[1], sv[2], sv[3]])
}

/// Unclamped `lambda_1 - lambda_2 - lambda_3 - lambda_4`; its sign change marks
/// the onset of separability.
pub fn concurrence_margin(rho: &DensityMatrix) -> Result<f64> {
    let l = wootters_spectrum(rho)?;
    Ok(l[0] - l[1] - l[2] - l[3])
}

pub fn concurrence_mixed(rho: &DensityMatrix) -> Result<ConcurrenceValue> {
    Ok(ConcurrenceValue::new(concurrence_margin(rho)?))
}

/// `<psi| rho |psi>`, which equals the Uhlmann fidelity when the initial state is pure.
pub fn fidelity_pure_mixed(initial: &StateVector, fin: &DensityMatrix) -> Result<FidelityValue> {
    if initial.dim() != fin.dim() {
        return Err(Error::DimensionMismatch {
            expected: initial.dim(),
            actual: fin.dim(),
        });
    }
    initial.require_normalized()?;
    let psi = nalgebra::DVector::from_column_slice(initial.amplitudes());
    let overlap = (psi.adjoint() * fin.matrix() * &psi)[(0, 0)];
    if overlap.im.abs() > NORM_TOLERANCE {
        return Err(Error::InvalidDensity(format!(
            "expectation value has imaginary part {:e}",
            overlap.im
        )));
    }
    Ok(FidelityValue::new(overlap.re))
}
