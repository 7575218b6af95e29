use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::DampingParams;
use crate::error::{Error, Result};
use crate::tensor::{Role, StateVector, ZERO_NORM_THRESHOLD};

/// Amplitudes of `alpha|00> + beta|01> + gamma|10> + delta|11>`, always
/// renormalized to unit norm on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoQubitCoeffs {
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    delta: Complex64,
}

impl TwoQubitCoeffs {
    pub fn new(alpha: Complex64, beta: Complex64, gamma: Complex64, delta: Complex64) -> Result<Self> {
        let raw = [alpha, beta, gamma, delta];
        if raw.iter().any(|z| !z.is_finite()) {
            return Err(Error::param("coefficient", f64::NAN, "must be finite"));
        }
        let norm_sqr: f64 = raw.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr < ZERO_NORM_THRESHOLD {
            return Err(Error::param("coefficient norm", norm_sqr.sqrt(), "must be non-zero"));
        }
        let s = 1.0 / norm_sqr.sqrt();
        let [alpha, beta, gamma, delta] = raw.map(|z| z * s);
        Ok(TwoQubitCoeffs {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    pub fn real(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let c = |x| Complex64::new(x, 0.0);
        TwoQubitCoeffs::new(c(alpha), c(beta), c(gamma), c(delta))
    }

    pub fn from_array(c: [Complex64; 4]) -> Result<Self> {
        TwoQubitCoeffs::new(c[0], c[1], c[2], c[3])
    }

    /// Reads the amplitudes of a normalized two-qubit state.
    pub fn from_state(state: &StateVector) -> Result<Self> {
        if state.num_qubits() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                actual: state.dim(),
            });
        }
        let a = state.amplitudes();
        TwoQubitCoeffs::new(a[0], a[1], a[2], a[3])
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn delta(&self) -> Complex64 {
        self.delta
    }

    pub fn as_array(&self) -> [Complex64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn is_real(&self) -> bool {
        self.as_array().iter().all(|z| z.im == 0.0)
    }

    /// Real parts, rejecting coefficients with a non-zero imaginary part.
    pub fn real_parts(&self, context: &'static str) -> Result<[f64; 4]> {
        if !self.is_real() {
            return Err(Error::ComplexCoefficients(context));
        }
        Ok(self.as_array().map(|z| z.re))
    }

    /// `|alpha delta - beta gamma|`.
    pub fn entanglement_amplitude(&self) -> f64 {
        (self.alpha * self.delta - self.beta * self.gamma).norm()
    }

    pub fn to_state(&self) -> StateVector {
        StateVector::new(self.as_array().to_vec(), vec![Role::System; 2])
            .expect("four amplitudes form a two-qubit register")
    }
}

/// Damping plus the strengths of the preparation (`x = tan^2 theta_1`) and
/// recovery (`y = tan^2 theta_2`) rotations, tied by `x q y = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    damping: DampingParams,
    x: f64,
}

impl SchemeParams {
    pub fn new(damping: DampingParams, x: f64) -> Result<Self> {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::param("x", x, "preparation strength must be positive"));
        }
        Ok(SchemeParams { damping, x })
    }

    /// No preparation step (`x = 1`).
    pub fn basic(damping: DampingParams) -> Self {
        SchemeParams { damping, x: 1.0 }
    }

    pub fn damping(&self) -> DampingParams {
        self.damping
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// `1 / (x q)`; infinite when the damping is complete.
    pub fn y(&self) -> f64 {
        1.0 / (self.x * self.damping.q())
    }

    pub fn preparation_angle(&self) -> f64 {
        self.x.sqrt().atan()
    }

    /// `atan(sqrt(y))`, written so that `q = 0` gives a quarter turn.
    pub fn recovery_angle(&self) -> f64 {
        1.0f64.atan2((self.x * self.damping.q()).sqrt())
    }

    /// Damping probability seen by the recovered state, `p x`.
    pub fn effective_p(&self) -> f64 {
        self.damping.p() * self.x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn renormalizes_inputs() {
        let c = TwoQubitCoeffs::real(0.7, 0.35, 0.4, 0.48).unwrap();
        let n = (0.49f64 + 0.1225 + 0.16 + 0.2304).sqrt();
        assert_abs_diff_eq!(c.alpha().re, 0.7 / n, epsilon = 1e-15);
        assert_abs_diff_eq!(c.to_state().norm_sqr(), 1.0, epsilon = 1e-15);
        assert!(c.is_real());
        assert!(TwoQubitCoeffs::real(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(TwoQubitCoeffs::real(f64::NAN, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn complex_coefficients_are_flagged() {
        let c = TwoQubitCoeffs::new(
            Complex64::new(0.5, 0.5),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
        )
        .unwrap();
        assert!(!c.is_real());
        assert_eq!(c.real_parts("test"), Err(Error::ComplexCoefficients("test")));
    }

    #[test]
    fn extended_strengths_satisfy_constraint() {
        let d = DampingParams::new(0.4).unwrap();
        let s = SchemeParams::new(d, 0.25).unwrap();
        assert_abs_diff_eq!(s.x() * d.q() * s.y(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.recovery_angle().tan().powi(2), s.y(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.preparation_angle().tan().powi(2), 0.25, epsilon = 1e-15);
        assert!(SchemeParams::new(d, 0.0).is_err());
        assert!(SchemeParams::new(d, -1.0).is_err());
        assert_eq!(SchemeParams::basic(d).x(), 1.0);
    }
}
