//! Dense linear algebra over small qubit registers.
//!
//! Basis indices are big-endian: qubit 0 is the most significant bit, so the
//! ket `|01>` of a two-qubit register is index 1. Every value here is
//! immutable; operations return new states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// Tolerance for identities that hold in exact arithmetic.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Tolerance for eigenvalue-mediated quantities.
pub const EIGEN_TOLERANCE: f64 = 1e-10;
/// Squared norms below this mark an impossible post-selection branch.
pub const ZERO_NORM_THRESHOLD: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    System,
    Ancilla,
    Environment,
}

#[inline]
fn shift_of(qubit: usize, num_qubits: usize) -> usize {
    num_qubits - 1 - qubit
}

fn qubit_count(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

fn check_targets(targets: &[usize], num_qubits: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= num_qubits {
            return Err(Error::QubitOutOfRange { index: t, num_qubits });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}

/// Gathers the bits of `index` at `qubits` into a compact big-endian integer.
fn gather_bits(index: usize, qubits: &[usize], num_qubits: usize) -> usize {
    qubits
        .iter()
        .fold(0, |acc, &q| (acc << 1) | ((index >> shift_of(q, num_qubits)) & 1))
}

fn complement(keep: &[usize], num_qubits: usize) -> Vec<usize> {
    (0..num_qubits).filter(|q| !keep.contains(q)).collect()
}

/// Square operator on `2^k` dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<Complex64>,
    unitary: bool,
}

impl Operator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        qubit_count(matrix.nrows())?;
        if matrix.iter().any(|z| !z.is_finite()) {
            return Err(Error::param("operator entry", f64::NAN, "must be finite"));
        }
        Ok(Operator { matrix, unitary: false })
    }

    /// Builds an operator and checks `U^dagger U = I` within [`NORM_TOLERANCE`].
    pub fn unitary(matrix: DMatrix<Complex64>) -> Result<Self> {
        let mut op = Operator::new(matrix)?;
        let defect = op.unitarity_defect();
        if defect > NORM_TOLERANCE {
            return Err(Error::NotUnitary(defect));
        }
        op.unitary = true;
        Ok(op)
    }

    /// Row-major real entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Operator::new(DMatrix::from_row_iterator(
            dim,
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    /// Skips validation; for matrices unitary by construction.
    pub(crate) fn trusted_unitary(matrix: DMatrix<Complex64>) -> Self {
        Operator { matrix, unitary: true }
    }

    pub fn identity(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Operator {
            matrix: DMatrix::identity(dim, dim),
            unitary: true,
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// Largest entry of `|U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let dim = self.dim();
        let gram = self.matrix.adjoint() * &self.matrix;
        let id = DMatrix::<Complex64>::identity(dim, dim);
        (gram - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn dagger(&self) -> Operator {
        Operator {
            matrix: self.matrix.adjoint(),
            unitary: self.unitary,
        }
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(Operator {
            matrix: &self.matrix * &other.matrix,
            unitary: self.unitary && other.unitary,
        })
    }
}

/// Tensor product: `(A (x) B)[i*dB + k, j*dB + l] = A[i, j] * B[k, l]`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    Operator {
        matrix: a.matrix.kronecker(&b.matrix),
        unitary: a.unitary && b.unitary,
    }
}

/// Dense amplitude vector with a role label per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    roles: Vec<Role>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>, roles: Vec<Role>) -> Result<Self> {
        let n = qubit_count(amplitudes.len())?;
        if n != roles.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << roles.len(),
                actual: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.is_finite()) {
            return Err(Error::param("amplitude", f64::NAN, "must be finite"));
        }
        Ok(StateVector { amplitudes, roles })
    }

    pub fn from_real(amplitudes: &[f64], roles: Vec<Role>) -> Result<Self> {
        StateVector::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect(), roles)
    }

    /// Computational basis state `|index>`.
    pub fn basis(index: usize, roles: Vec<Role>) -> Result<Self> {
        let dim = 1usize << roles.len();
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index + 1,
            });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amplitudes, roles })
    }

    pub fn num_qubits(&self) -> usize {
        self.roles.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn qubits_with_role(&self, role: Role) -> Vec<usize> {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, &r)| r == role)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm_sqr()))
        }
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        StateVector {
            amplitudes: self.amplitudes.iter().map(|&z| z * factor).collect(),
            roles: self.roles.clone(),
        }
    }

    /// `self (x) other`, with the qubits of `self` first.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for &a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|&b| a * b));
        }
        let mut roles = self.roles.clone();
        roles.extend_from_slice(&other.roles);
        StateVector { amplitudes, roles }
    }

    /// Appends `count` qubits prepared in `|0>`.
    pub fn with_fresh_qubits(&self, role: Role, count: usize) -> StateVector {
        let mut amplitudes = vec![ZERO; self.dim() << count];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            amplitudes[i << count] = a;
        }
        let mut roles = self.roles.clone();
        roles.extend(std::iter::repeat_n(role, count));
        StateVector { amplitudes, roles }
    }

    /// Applies `op` to the listed qubits (the first target is the most
    /// significant qubit of the operator) and identity elsewhere.
    pub fn apply(&self, op: &Operator, targets: &[usize]) -> Result<StateVector> {
        let n = self.num_qubits();
        let k = targets.len();
        if op.dim() != 1 << k {
            return Err(Error::DimensionMismatch {
                expected: 1 << k,
                actual: op.dim(),
            });
        }
        check_targets(targets, n)?;

        let local_dim = 1usize << k;
        let offsets: Vec<usize> = (0..local_dim)
            .map(|local| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| (local >> (k - 1 - j)) & 1 == 1)
                    .map(|(_, &t)| 1usize << shift_of(t, n))
                    .sum()
            })
            .collect();
        let mask = offsets[local_dim - 1];

        let m = op.matrix();
        let mut out = vec![ZERO; self.dim()];
        let mut gathered = vec![ZERO; local_dim];
        for base in (0..self.dim()).filter(|i| i & mask == 0) {
            for (slot, &off) in gathered.iter_mut().zip(&offsets) {
                *slot = self.amplitudes[base | off];
            }
            for (r, &off) in offsets.iter().enumerate() {
                out[base | off] = (0..local_dim).map(|c| m[(r, c)] * gathered[c]).sum();
            }
        }
        Ok(StateVector {
            amplitudes: out,
            roles: self.roles.clone(),
        })
    }

    /// Alias of [`StateVector::apply`] that rejects operators not flagged unitary.
    pub fn apply_unitary(&self, u: &Operator, targets: &[usize]) -> Result<StateVector> {
        if !u.is_unitary() {
            return Err(Error::NotUnitary(u.unitarity_defect()));
        }
        self.apply(u, targets)
    }

    /// Projects `targets` onto `outcome` and removes them from the register.
    /// The result is not renormalized.
    pub fn project(&self, targets: &[usize], outcome: &[u8]) -> Result<StateVector> {
        let n = self.num_qubits();
        check_targets(targets, n)?;
        if outcome.len() != targets.len() {
            return Err(Error::OutcomeLength {
                expected: targets.len(),
                actual: outcome.len(),
            });
        }
        let wanted = outcome.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b != 0));
        let rest = complement(targets, n);
        let mut amplitudes = vec![ZERO; 1 << rest.len()];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            if gather_bits(i, targets, n) == wanted {
                amplitudes[gather_bits(i, &rest, n)] = a;
            }
        }
        let roles = rest.iter().map(|&q| self.roles[q]).collect();
        Ok(StateVector { amplitudes, roles })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Copy with the global phase fixed so the largest-magnitude amplitude is
    /// real and positive.
    pub fn canonical_phase(&self) -> StateVector {
        let lead = self
            .amplitudes
            .iter()
            .copied()
            .fold(ZERO, |best, z| if z.norm() > best.norm() { z } else { best });
        if lead.norm() == 0.0 {
            return self.clone();
        }
        self.scaled(lead.conj() / lead.norm())
    }

    /// Maximum amplitude difference after quotienting the global phase.
    pub fn phase_distance(&self, other: &StateVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        // Align `other` to the phase of `self` on the largest component of `self`.
        let a = self.canonical_phase();
        let lead = a
            .amplitudes
            .iter()
            .enumerate()
            .fold(
                (0, 0.0),
                |(bi, bn), (i, z)| {
                    if z.norm() > bn {
                        (i, z.norm())
                    } else {
                        (bi, bn)
                    }
                },
            )
            .0;
        let pivot = other.amplitudes[lead];
        let b = if pivot.norm() > 0.0 {
            other.scaled(pivot.conj() / pivot.norm())
        } else {
            other.clone()
        };
        Ok(a.amplitudes
            .iter()
            .zip(&b.amplitudes)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    /// Coefficient matrix `W[kept, rest]` of the bipartition `keep | rest`,
    /// so that the reduced state on `keep` is `W W^dagger`.
    pub fn coefficient_matrix(&self, keep: &[usize]) -> Result<DMatrix<Complex64>> {
        let n = self.num_qubits();
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        check_targets(keep, n)?;
        let rest = complement(keep, n);
        let mut w = DMatrix::from_element(1 << keep.len(), 1 << rest.len(), ZERO);
        for (i, &a) in self.amplitudes.iter().enumerate() {
            w[(gather_bits(i, keep, n), gather_bits(i, &rest, n))] = a;
        }
        Ok(w)
    }
}

/// Returns `(|psi|^2, psi / |psi|)`.
pub fn renormalize(state: &StateVector) -> Result<(f64, StateVector)> {
    let norm_sqr = state.norm_sqr();
    if norm_sqr < ZERO_NORM_THRESHOLD {
        return Err(Error::ImpossibleBranch(norm_sqr));
    }
    Ok((norm_sqr, state.scaled(Complex64::new(1.0 / norm_sqr.sqrt(), 0.0))))
}

/// `|psi><psi|` for a normalized state.
pub fn pure_to_density(state: &StateVector) -> Result<DensityMatrix> {
    state.require_normalized()?;
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    Ok(DensityMatrix {
        matrix: &v * v.adjoint(),
    })
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let rho = DensityMatrix::from_matrix_unchecked(matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks only shape; trace and positivity are left to [`DensityMatrix::validate`].
    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        qubit_count(matrix.nrows())?;
        Ok(DensityMatrix { matrix })
    }

    pub fn validate(&self) -> Result<()> {
        if self.matrix.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        let herm = self.hermiticity_defect();
        if herm > NORM_TOLERANCE {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > NORM_TOLERANCE || tr.im.abs() > NORM_TOLERANCE {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let min = self.eigenvalues()[0];
        if min < -EIGEN_TOLERANCE {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn hermitian_part(&self) -> DMatrix<Complex64> {
        (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(self.hermitian_part())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// A factor `W` with `rho = W W^dagger`; columns are eigenvectors scaled
    /// by the square roots of the (clamped) eigenvalues.
    pub fn factor(&self) -> DMatrix<Complex64> {
        let eig = nalgebra::SymmetricEigen::new(self.hermitian_part());
        let mut w = eig.eigenvectors;
        for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
            let s = lambda.max(0.0).sqrt();
            w.column_mut(j).iter_mut().for_each(|z| *z *= Complex64::new(s, 0.0));
        }
        w
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn mix(&self, other: &DensityMatrix, weight: f64) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::param("weight", weight, "must lie in [0, 1]"));
        }
        Ok(DensityMatrix {
            matrix: &self.matrix * Complex64::new(weight, 0.0) + &other.matrix * Complex64::new(1.0 - weight, 0.0),
        })
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &Operator) -> Result<DensityMatrix> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.dim(),
            });
        }
        Ok(DensityMatrix {
            matrix: u.matrix() * &self.matrix * u.matrix().adjoint(),
        })
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Reduction onto a subset of qubits.
pub trait PartialTrace {
    /// Reduced density matrix on `keep`, ordered as listed.
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix>;
}

impl PartialTrace for StateVector {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let w = self.coefficient_matrix(keep)?;
        Ok(DensityMatrix {
            matrix: &w * w.adjoint(),
        })
    }
}

impl PartialTrace for DensityMatrix {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.num_qubits();
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        check_targets(keep, n)?;
        let rest = complement(keep, n);
        let mut out = DMatrix::from_element(1 << keep.len(), 1 << keep.len(), ZERO);
        let dim = self.dim();
        for i in 0..dim {
            let (ki, ri) = (gather_bits(i, keep, n), gather_bits(i, &rest, n));
            for j in 0..dim {
                if gather_bits(j, &rest, n) == ri {
                    out[(ki, gather_bits(j, keep, n))] += self.matrix[(i, j)];
                }
            }
        }
        Ok(DensityMatrix { matrix: out })
    }
}

pub fn partial_trace<T: PartialTrace + ?Sized>(input: &T, keep: &[usize]) -> Result<DensityMatrix> {
    input.partial_trace(keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sys(n: usize) -> Vec<Role> {
        vec![Role::System; n]
    }

    fn x_gate() -> Operator {
        Operator::unitary(DMatrix::from_row_slice(2, 2, &[c(0.), c(1.), c(1.), c(0.)])).unwrap()
    }

    fn rotation(theta: f64) -> Operator {
        let (s, co) = theta.sin_cos();
        Operator::from_real(2, &[co, -s, s, co]).unwrap()
    }

    fn cnot() -> Operator {
        Operator::from_real(
            4,
            &[
                1., 0., 0., 0., //
                0., 1., 0., 0., //
                0., 0., 0., 1., //
                0., 0., 1., 0.,
            ],
        )
        .unwrap()
    }

    fn bell() -> StateVector {
        StateVector::from_real(&[FRAC_1_SQRT_2, 0., 0., FRAC_1_SQRT_2], sys(2)).unwrap()
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let id = kron(&Operator::identity(1), &Operator::identity(1));
        assert_eq!(id, Operator::identity(2));
    }

    #[test]
    fn kron_index_layout() {
        let a = Operator::from_real(2, &[1., 2., 3., 4.]).unwrap();
        let b = Operator::from_real(2, &[5., 6., 7., 8.]).unwrap();
        let ab = kron(&a, &b);
        for (i, j, k, l) in all_index_quads() {
            assert_eq!(
                ab.matrix()[(i * 2 + k, j * 2 + l)],
                a.matrix()[(i, j)] * b.matrix()[(k, l)]
            );
        }
    }

    fn all_index_quads() -> Vec<(usize, usize, usize, usize)> {
        let mut out = vec![];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.push((i, j, k, l));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn rotation_on_first_factor() {
        let op = kron(&rotation(std::f64::consts::FRAC_PI_4), &Operator::identity(1));
        let s = StateVector::basis(0, sys(2)).unwrap().apply(&op, &[0, 1]).unwrap();
        let want = StateVector::from_real(&[FRAC_1_SQRT_2, 0., FRAC_1_SQRT_2, 0.], sys(2)).unwrap();
        assert!(s.phase_distance(&want).unwrap() < 1e-15);
    }

    #[test]
    fn kron_x_x_flips_both() {
        let s = StateVector::basis(0, sys(2)).unwrap();
        let out = s.apply(&kron(&x_gate(), &x_gate()), &[0, 1]).unwrap();
        assert_eq!(out, StateVector::basis(3, sys(2)).unwrap());
    }

    #[test]
    fn cnot_truth_table() {
        let s = StateVector::basis(2, sys(2)).unwrap();
        assert_eq!(
            s.apply(&cnot(), &[0, 1]).unwrap(),
            StateVector::basis(3, sys(2)).unwrap()
        );
        // Control listed second.
        let s = StateVector::basis(1, sys(2)).unwrap();
        assert_eq!(
            s.apply(&cnot(), &[1, 0]).unwrap(),
            StateVector::basis(3, sys(2)).unwrap()
        );
    }

    #[test]
    fn zero_and_quarter_rotations() {
        let s = bell();
        assert!(s.apply(&rotation(0.0), &[1]).unwrap().phase_distance(&s).unwrap() < 1e-15);
        let one = StateVector::basis(0, sys(1))
            .unwrap()
            .apply(&rotation(std::f64::consts::FRAC_PI_2), &[0])
            .unwrap();
        assert!(one.phase_distance(&StateVector::basis(1, sys(1)).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn apply_rejects_bad_targets() {
        let s = StateVector::basis(0, sys(2)).unwrap();
        assert_eq!(s.apply(&cnot(), &[0, 0]), Err(Error::DuplicateTarget(0)));
        assert!(matches!(s.apply(&cnot(), &[0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(s.apply(&x_gate(), &[2]), Err(Error::QubitOutOfRange { .. })));
        let nonunitary = Operator::from_real(2, &[1., 0., 0., 0.5]).unwrap();
        assert!(matches!(s.apply_unitary(&nonunitary, &[0]), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn partial_trace_of_product_is_pure() {
        let plus = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], sys(1)).unwrap();
        let s = StateVector::basis(0, sys(1)).unwrap().tensor(&plus);
        let rho = s.partial_trace(&[0]).unwrap();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        for keep in [[0], [1]] {
            let rho = bell().partial_trace(&keep).unwrap();
            assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(rho.matrix()[(1, 1)].re, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(rho.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn partial_trace_errors() {
        assert_eq!(bell().partial_trace(&[]), Err(Error::EmptyKeep));
        assert!(matches!(bell().partial_trace(&[3]), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn density_and_vector_traces_agree() {
        let s = StateVector::from_real(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.1, 0.6, 0.2], sys(3)).unwrap();
        let (_, s) = renormalize(&s).unwrap();
        let rho = pure_to_density(&s).unwrap();
        for keep in [vec![0], vec![2, 0], vec![1, 2]] {
            let a = s.partial_trace(&keep).unwrap();
            let b = rho.partial_trace(&keep).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-15, "keep {keep:?}");
        }
    }

    #[test]
    fn renormalize_reports_norm() {
        let s = StateVector::from_real(&[3.0, 4.0], sys(1)).unwrap();
        let (n2, u) = renormalize(&s).unwrap();
        assert_abs_diff_eq!(n2, 25.0, epsilon = 1e-12);
        assert!(u.is_normalized());
        let (n2, same) = renormalize(&bell()).unwrap();
        assert_abs_diff_eq!(n2, 1.0, epsilon = 1e-15);
        assert!(same.phase_distance(&bell()).unwrap() < 1e-15);
        let zero = StateVector::from_real(&[0.0, 0.0], sys(1)).unwrap();
        assert!(matches!(renormalize(&zero), Err(Error::ImpossibleBranch(_))));
    }

    #[test]
    fn pure_to_density_examples() {
        let rho = pure_to_density(&StateVector::basis(0, sys(1)).unwrap()).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], c(1.0));
        assert_eq!(rho.matrix()[(1, 1)], c(0.0));
        let plus = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], sys(1)).unwrap();
        let rho = pure_to_density(&plus).unwrap();
        for z in rho.matrix().iter() {
            assert_abs_diff_eq!(z.re, 0.5, epsilon = 1e-15);
        }
        let rho = pure_to_density(&bell()).unwrap();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_abs_diff_eq!(rho.matrix()[(i, j)].re, 0.5, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].norm(), 0.0, epsilon = 1e-15);
        let unnormalized = StateVector::from_real(&[1.0, 1.0], sys(1)).unwrap();
        assert!(matches!(pure_to_density(&unnormalized), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn density_validation() {
        let bad_trace = DMatrix::from_diagonal_element(2, 2, c(0.6));
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = DMatrix::from_row_slice(2, 2, &[c(1.2), c(0.), c(0.), c(-0.2)]);
        assert!(DensityMatrix::new(negative).is_err());
        let ok = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.5), c(0.5), c(0.5)]);
        assert!(DensityMatrix::new(ok).is_ok());
    }

    #[test]
    fn project_removes_measured_qubits() {
        let p = bell().project(&[0], &[0]).unwrap();
        assert_eq!(p.num_qubits(), 1);
        assert_abs_diff_eq!(p.norm_sqr(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn fresh_qubits_are_zero() {
        let s = bell().with_fresh_qubits(Role::Ancilla, 2);
        assert_eq!(s.num_qubits(), 4);
        assert_eq!(s.qubits_with_role(Role::Ancilla), vec![2, 3]);
        assert_abs_diff_eq!(s.amplitudes()[0b0000].re, FRAC_1_SQRT_2);
        assert_abs_diff_eq!(s.amplitudes()[0b1100].re, FRAC_1_SQRT_2);
    }
}
