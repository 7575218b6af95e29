//! Gate set and noise processes: the rotation-angle Hadamard, CNOT, amplitude
//! damping as a unitary coupling to a fresh environment qubit, the null-result
//! weak measurement, and exhaustive measurement branching.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{renormalize, Operator, StateVector, ZERO_NORM_THRESHOLD};

/// Decay probability `p`; the survival probability `q = 1 - p` is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingParams {
    p: f64,
}

impl DampingParams {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p", p, "decay probability must lie in [0, 1]"));
        }
        Ok(DampingParams { p })
    }

    /// From a decay rate and elapsed time, using `sqrt(q) = exp(-rate * time)`.
    pub fn from_decay(rate: f64, time: f64) -> Result<Self> {
        if !(rate >= 0.0 && time >= 0.0) || !rate.is_finite() || !time.is_finite() {
            return Err(Error::param(
                "rate * time",
                rate * time,
                "rate and time must be finite and non-negative",
            ));
        }
        DampingParams::new(-(-2.0 * rate * time).exp_m1())
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// Elapsed time that produces this damping at the given decay rate.
    pub fn decay_time(&self, rate: f64) -> f64 {
        -self.q().ln() / (2.0 * rate)
    }
}

/// How the environment-`|1>` columns of the damping coupling are filled in.
/// Only the environment-`|0>` columns are physically fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Completion {
    /// `|0>_S|1>_E -> sqrt(q)|0>_S|1>_E - sqrt(p)|1>_S|0>_E`, `|1>_S|1>_E` fixed.
    #[default]
    GramSchmidt,
    /// `|0>_S|1>_E -> sqrt(p)|1>_S|0>_E - sqrt(q)|0>_S|1>_E`, `|1>_S|1>_E -> -|1>_S|1>_E`.
    Reflected,
}

/// `[[cos t, -sin t], [sin t, cos t]]`.
pub fn hadamard_theta(theta: f64) -> Operator {
    let (s, c) = theta.sin_cos();
    Operator::trusted_unitary(DMatrix::from_row_slice(2, 2, &[re(c), re(-s), re(s), re(c)]))
}

/// Controlled NOT; the first listed target is the control.
pub fn cnot() -> Operator {
    #[rustfmt::skip]
    let m = [
        1., 0., 0., 0.,
        0., 1., 0., 0.,
        0., 0., 0., 1.,
        0., 0., 1., 0.,
    ];
    Operator::trusted_unitary(DMatrix::from_row_iterator(4, 4, m.iter().map(|&x| re(x))))
}

/// Unitary on `(system, environment)` with
/// `|1>_S|0>_E -> sqrt(q)|1>_S|0>_E + sqrt(p)|0>_S|1>_E` and `|0>_S|0>_E` fixed.
pub fn damping_couple(params: DampingParams) -> Operator {
    damping_couple_with(params, Completion::default())
}

pub fn damping_couple_with(params: DampingParams, completion: Completion) -> Operator {
    let sp = params.p().sqrt();
    let sq = params.q().sqrt();
    // Columns are the images of |00>, |01>, |10>, |11> in (system, environment) order.
    #[rustfmt::skip]
    let m = match completion {
        Completion::GramSchmidt => [
            1., 0.,  0., 0.,
            0., sq,  sp, 0.,
            0., -sp, sq, 0.,
            0., 0.,  0., 1.,
        ],
        Completion::Reflected => [
            1., 0.,  0., 0.,
            0., -sq, sp, 0.,
            0., sp,  sq, 0.,
            0., 0.,  0., -1.,
        ],
    };
    Operator::trusted_unitary(DMatrix::from_row_iterator(4, 4, m.iter().map(|&x| re(x))))
}

/// Kraus operator of the null-result weak measurement, `diag(1, sqrt(q))`.
pub fn null_result_filter(params: DampingParams) -> Operator {
    Operator::from_real(2, &[1.0, 0.0, 0.0, params.q().sqrt()]).expect("2x2 filter is well formed")
}

/// Null-result weak measurement on one qubit. Returns the outcome probability and
/// the renormalized state.
pub fn weak_null(state: &StateVector, params: DampingParams, target: usize) -> Result<(f64, StateVector)> {
    state.require_normalized()?;
    let filtered = state.apply(&null_result_filter(params), &[target])?;
    renormalize(&filtered)
}

/// Measured bits, in the order the qubits were listed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Outcome(pub Vec<u8>);

impl Outcome {
    /// Big-endian bits of `index` over `len` qubits.
    pub fn from_index(index: usize, len: usize) -> Self {
        Outcome((0..len).map(|j| ((index >> (len - 1 - j)) & 1) as u8).collect())
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn is_all_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// One measurement outcome with its probability and normalized post-measurement
/// state (measured qubits removed).
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub outcome: Outcome,
    pub probability: f64,
    pub post_state: StateVector,
}

/// Every outcome with non-negligible probability, in ascending outcome order.
pub fn measure_branches(state: &StateVector, targets: &[usize]) -> Result<Vec<Branch>> {
    state.require_normalized()?;
    let mut branches = Vec::new();
    for index in 0..1usize << targets.len() {
        let outcome = Outcome::from_index(index, targets.len());
        let projected = state.project(targets, outcome.bits())?;
        let probability = projected.norm_sqr();
        if probability < ZERO_NORM_THRESHOLD {
            continue;
        }
        let (_, post_state) = renormalize(&projected)?;
        branches.push(Branch {
            outcome,
            probability,
            post_state,
        });
    }
    Ok(branches)
}

/// Keeps only the branch where `targets` read `outcome`.
pub fn postselect(state: &StateVector, targets: &[usize], outcome: &[u8]) -> Result<(f64, StateVector)> {
    state.require_normalized()?;
    renormalize(&state.project(targets, outcome)?)
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
