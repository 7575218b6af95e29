//! Analytic expressions for the protocols, used as oracles against the
//! circuit simulation. Functions suffixed `_printed` evaluate a published
//! expression verbatim even where it disagrees with the simulation; the
//! unsuffixed or `_corrected` versions are derived from the circuits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::DensityMatrix;

use super::coeffs::TwoQubitCoeffs;

fn moduli_sqr(c: &TwoQubitCoeffs) -> [f64; 4] {
    c.as_array().map(|z| z.norm_sqr())
}

/// `N_d^2 = |a|^2 + q (|b|^2 + |g|^2) + q^2 |d|^2`.
pub fn null_result_normalizer_sq(c: &TwoQubitCoeffs, q: f64) -> f64 {
    let [a, b, g, d] = moduli_sqr(c);
    a + q * (b + g) + q * q * d
}

/// Normalized amplitudes after null results on both qubits.
pub fn null_result_amplitudes(c: &TwoQubitCoeffs, q: f64) -> [Complex64; 4] {
    let n = null_result_normalizer_sq(c, q).sqrt();
    let s = q.sqrt();
    [c.alpha(), c.beta() * s, c.gamma() * s, c.delta() * q].map(|z| z / n)
}

/// Branch weights of one full round on the null-result state, in the order
/// `00, 01, 10, 11`, as published: `{q^2, q, q, 1} / (N_d^2 (1+q)^2)`. Only the
/// `00` entry is a probability; the others drop the branch norm.
pub fn recovery_branch_probabilities_printed(c: &TwoQubitCoeffs, q: f64) -> [f64; 4] {
    let denom = null_result_normalizer_sq(c, q) * (1.0 + q).powi(2);
    [q * q, q, q, 1.0].map(|w| w / denom)
}

/// Squared norms of the unnormalized branch states `(a, b q^i, g q^j, d q^(i+j))`
/// for the four outcomes of a full round.
pub fn recovery_branch_norms(c: &TwoQubitCoeffs, q: f64) -> [f64; 4] {
    let [a, b, g, d] = moduli_sqr(c);
    let q2 = q * q;
    [
        a + b + g + d,
        a + q2 * b + g + q2 * d,
        a + b + q2 * g + q2 * d,
        a + q2 * (b + g) + q2 * q2 * d,
    ]
}

/// Actual outcome probabilities of one full round on the null-result state.
pub fn recovery_branch_probabilities(c: &TwoQubitCoeffs, q: f64) -> [f64; 4] {
    let printed = recovery_branch_probabilities_printed(c, q);
    let norms = recovery_branch_norms(c, q);
    [0, 1, 2, 3].map(|i| printed[i] * norms[i])
}

/// Weight of success in a single-qubit follow-up with `tan theta = 1/q`, with
/// the branch norms cancelled as in the success-probability sums.
pub fn followup_success_probability(q: f64) -> f64 {
    q * q / (1.0 + q * q)
}

/// Matching weight of failure, after which the damping doubles again.
pub fn followup_failure_probability(q: f64) -> f64 {
    1.0 / (1.0 + q * q)
}

// Branch weights with the state-dependent norms cancelled.
fn w00(q: f64) -> f64 {
    (q / (1.0 + q)).powi(2)
}

fn w01(q: f64) -> f64 {
    q / (1.0 + q).powi(2)
}

fn w11(q: f64) -> f64 {
    1.0 / (1.0 + q).powi(2)
}

/// Total success probability of up to `n` recovery rounds, as published for
/// `n = 1, 2, 3`. Independent of the input coefficients.
pub fn success_prob_closed(n: usize, q: f64) -> Result<f64> {
    let (p010, p011) = (followup_success_probability, followup_failure_probability);
    let q2 = q * q;
    let q4 = q2 * q2;
    let one = w00(q);
    let two = one + 2.0 * w01(q) * p010(q) + w11(q) * w00(q2);
    match n {
        1 => Ok(one),
        2 => Ok(two),
        3 => Ok(two
            + 2.0 * w01(q) * p011(q) * p010(q2)
            + 2.0 * w11(q) * w01(q2) * p010(q2)
            + w11(q) * w11(q2) * w00(q4)),
        _ => Err(Error::param("n", n as f64, "closed form exists for 1, 2 or 3 rounds")),
    }
}

/// Success probability of up to `n` rounds for any `n`.
///
/// Each qubit is restored independently: its `k`-th attempt runs with exponent
/// `2^k` and succeeds with probability `q^(2^k) / (1 + q^(2^k))` after all
/// earlier attempts failed. The two-qubit probability is the square of the
/// single-qubit sum.
pub fn success_prob_series(n: usize, q: f64) -> f64 {
    let mut reach = 1.0;
    let mut sum = 0.0;
    let mut r = q;
    for _ in 0..n {
        sum += reach * r / (1.0 + r);
        reach /= 1.0 + r;
        r *= r;
    }
    sum * sum
}

/// Large-`n` limit of the success probability, `q^2`.
pub fn success_prob_limit(q: f64) -> f64 {
    q * q
}

/// Concurrence after damping, `max{0, 2 q (|ad - bg| - p |d|^2)}`.
pub fn damped_concurrence(c: &TwoQubitCoeffs, p: f64) -> f64 {
    let q = 1.0 - p;
    (2.0 * q * (c.entanglement_amplitude() - p * c.delta().norm_sqr())).max(0.0)
}

/// `N_2 = 1 + p (|b|^2 + |g|^2 + 2 |d|^2) + p^2 |d|^2`.
pub fn recovered_normalizer(c: &TwoQubitCoeffs, p: f64) -> f64 {
    let [_, b, g, d] = moduli_sqr(c);
    1.0 + p * (b + g + 2.0 * d) + p * p * d
}

/// System state after damping and a successful recovery round.
pub fn recovered_density(c: &TwoQubitCoeffs, p: f64) -> Result<DensityMatrix> {
    let [a, b, g, d] = c.as_array();
    let n = recovered_normalizer(c, p);
    let pc = Complex64::new(p, 0.0);
    let r = |z: f64| Complex64::new(z, 0.0);
    let mut m = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
    m[(0, 0)] = r(a.norm_sqr() + p * (b.norm_sqr() + g.norm_sqr()) + p * p * d.norm_sqr());
    m[(0, 1)] = a * b.conj() + pc * g * d.conj();
    m[(0, 2)] = a * g.conj() + pc * b * d.conj();
    m[(0, 3)] = a * d.conj();
    m[(1, 1)] = r(b.norm_sqr() + p * d.norm_sqr());
    m[(1, 2)] = b * g.conj();
    m[(1, 3)] = b * d.conj();
    m[(2, 2)] = r(g.norm_sqr() + p * d.norm_sqr());
    m[(2, 3)] = g * d.conj();
    m[(3, 3)] = r(d.norm_sqr());
    for i in 0..4 {
        for j in 0..i {
            m[(i, j)] = m[(j, i)].conj();
        }
    }
    DensityMatrix::new(m / Complex64::new(n, 0.0))
}

/// Published probability of the successful recovery outcome, `[q / (N_2 (1+q))]^2`.
pub fn protect_probability_printed(c: &TwoQubitCoeffs, p: f64) -> f64 {
    let q = 1.0 - p;
    (q / (recovered_normalizer(c, p) * (1.0 + q))).powi(2)
}

/// Probability of the successful recovery outcome from the circuit,
/// `q^2 N_2 / (1+q)^2`.
pub fn protect_probability(c: &TwoQubitCoeffs, p: f64) -> f64 {
    let q = 1.0 - p;
    q * q * recovered_normalizer(c, p) / (1.0 + q).powi(2)
}

/// Concurrence of the recovered state.
pub fn recovered_concurrence(c: &TwoQubitCoeffs, p: f64) -> f64 {
    let [a, _, _, d] = moduli_sqr(c);
    let num = 2.0 * (c.entanglement_amplitude() - p * d);
    (num / (1.0 + p * (1.0 + d - a) + p * p * d)).max(0.0)
}

/// Damping probability above which recovery raises the concurrence, defined
/// when `|a| < |d|`.
pub fn crossing_threshold(c: &TwoQubitCoeffs) -> Option<f64> {
    let [a, _, _, d] = moduli_sqr(c);
    if a >= d {
        return None;
    }
    let root = ((1.0 - a + 2.0 * d).powi(2) - 4.0 * d).sqrt();
    Some((root - (1.0 - a)) / (2.0 * d))
}

/// Damping probability at which the entanglement vanishes, when it does.
pub fn esd_point(c: &TwoQubitCoeffs) -> Option<f64> {
    let d = c.delta().norm_sqr();
    let amp = c.entanglement_amplitude();
    (amp < d).then(|| amp / d)
}

/// `N_1^2 = |a|^2 + x (|b|^2 + |g|^2) + x^2 |d|^2`.
pub fn prepared_normalizer_sq(c: &TwoQubitCoeffs, x: f64) -> f64 {
    null_result_normalizer_sq(c, x)
}

/// Normalized amplitudes after the preparation step.
pub fn prepared_amplitudes(c: &TwoQubitCoeffs, x: f64) -> [Complex64; 4] {
    null_result_amplitudes(c, x)
}

/// `N_1^2 / (1+x)^2`.
pub fn prepare_probability(c: &TwoQubitCoeffs, x: f64) -> f64 {
    prepared_normalizer_sq(c, x) / (1.0 + x).powi(2)
}

/// Output of the extended scheme: the recovered state with `p` replaced by `p x`.
pub fn extended_density(c: &TwoQubitCoeffs, p: f64, x: f64) -> Result<DensityMatrix> {
    recovered_density(c, p * x)
}

/// Published concurrence of the extended scheme, evaluated verbatim.
pub fn extended_concurrence_printed(c: &TwoQubitCoeffs, p: f64, x: f64) -> f64 {
    let [a, _, _, d] = moduli_sqr(c);
    let px = p * x;
    let num = 2.0 * (c.entanglement_amplitude() - px * d.sqrt());
    (num / (1.0 + px * (1.0 - a - d) + px * px * d)).max(0.0)
}

pub fn extended_concurrence_corrected(c: &TwoQubitCoeffs, p: f64, x: f64) -> f64 {
    recovered_concurrence(c, p * x)
}

/// Joint probability that preparation and recovery both succeed,
/// `[x q / ((1+x)(1+x q))]^2 N_2(p x)`.
pub fn extended_success_probability(c: &TwoQubitCoeffs, p: f64, x: f64) -> f64 {
    let xq = x * (1.0 - p);
    (xq / ((1.0 + x) * (1.0 + xq))).powi(2) * recovered_normalizer(c, p * x)
}

/// Fidelity of the damped state with the input (real coefficients only).
pub fn damped_fidelity(c: &TwoQubitCoeffs, p: f64) -> Result<f64> {
    let [a, b, g, d] = c.real_parts("damped_fidelity")?;
    let q = 1.0 - p;
    let sq = q.sqrt();
    let (a2, b2, g2, d2) = (a * a, b * b, g * g, d * d);
    Ok((a2 + sq * b2 + sq * g2 + q * d2).powi(2)
        + 4.0 * p * sq * a * b * g * d
        + p * (a2 + q * d2) * (b2 + g2)
        + p * p * a2 * d2)
}

fn recovered_fidelity_with(c: &TwoQubitCoeffs, context: &'static str, p: f64, px_sq_term: f64) -> Result<f64> {
    let [a, b, g, d] = c.real_parts(context)?;
    let (a2, b2, g2, d2) = (a * a, b * b, g * g, d * d);
    let num = 1.0 + 4.0 * p * a * b * g * d + px_sq_term * (a2 + d2) * (b2 + g2) + p * p * a2 * d2;
    Ok(num / (1.0 + p * (1.0 - a2 + d2) + p * p * d2))
}

/// Fidelity of the recovered state with the input (real coefficients only).
pub fn recovered_fidelity(c: &TwoQubitCoeffs, p: f64) -> Result<f64> {
    recovered_fidelity_with(c, "recovered_fidelity", p, p)
}

/// Published fidelity of the extended scheme, whose middle term carries `p x^2`.
pub fn extended_fidelity_printed(c: &TwoQubitCoeffs, p: f64, x: f64) -> Result<f64> {
    recovered_fidelity_with(c, "extended_fidelity_printed", p * x, p * x * x)
}

pub fn extended_fidelity_corrected(c: &TwoQubitCoeffs, p: f64, x: f64) -> Result<f64> {
    recovered_fidelity_with(c, "extended_fidelity_corrected", p * x, p * x)
}

/// Every scalar closed form at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub c_damped: f64,
    pub c_recovered: f64,
    pub c_ext_printed: f64,
    pub c_ext_corrected: f64,
    pub p_threshold: Option<f64>,
    pub p_esd: Option<f64>,
    pub f_damped: f64,
    pub f_recovered: f64,
    pub f_ext_printed: f64,
    pub f_ext_corrected: f64,
}

pub fn closed_form_suite(c: &TwoQubitCoeffs, p: f64, x: f64) -> Result<ClosedForms> {
    Ok(ClosedForms {
        c_damped: damped_concurrence(c, p),
        c_recovered: recovered_concurrence(c, p),
        c_ext_printed: extended_concurrence_printed(c, p, x),
        c_ext_corrected: extended_concurrence_corrected(c, p, x),
        p_threshold: crossing_threshold(c),
        p_esd: esd_point(c),
        f_damped: damped_fidelity(c, p)?,
        f_recovered: recovered_fidelity(c, p)?,
        f_ext_printed: extended_fidelity_printed(c, p, x)?,
        f_ext_corrected: extended_fidelity_corrected(c, p, x)?,
    })
}
