#![allow(dead_code)]

use ampshield_core::{DensityMatrix, Operator, TwoQubitCoeffs};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    // Box-Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    let r = (-2.0 * u.ln()).sqrt();
    let t = std::f64::consts::TAU * v;
    (r * t.cos(), r * t.sin())
}

pub fn complex_coeffs(rng: &mut ChaCha8Rng) -> TwoQubitCoeffs {
    let mut c = [Complex64::new(0.0, 0.0); 4];
    for z in &mut c {
        let (re, im) = gaussian_pair(rng);
        *z = Complex64::new(re, im);
    }
    TwoQubitCoeffs::from_array(c).unwrap()
}

pub fn real_coeffs(rng: &mut ChaCha8Rng) -> TwoQubitCoeffs {
    let (a, b) = gaussian_pair(rng);
    let (g, d) = gaussian_pair(rng);
    TwoQubitCoeffs::real(a, b, g, d).unwrap()
}

pub fn unitary_2x2(rng: &mut ChaCha8Rng) -> Operator {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
    let [phi, a, b]: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()].map(|u: f64| u * std::f64::consts::TAU);
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            e(phi + a) * theta.cos(),
            e(phi + b) * theta.sin(),
            -e(phi - b) * theta.sin(),
            e(phi - a) * theta.cos(),
        ],
    );
    Operator::unitary(m).unwrap()
}

/// Random full-rank or rank-deficient two-qubit density matrix `G G^dagger / tr`.
pub fn density(rng: &mut ChaCha8Rng, rank: usize) -> DensityMatrix {
    let mut g = DMatrix::from_element(4, rank, Complex64::new(0.0, 0.0));
    for z in g.iter_mut() {
        let (re, im) = gaussian_pair(rng);
        *z = Complex64::new(re, im);
    }
    let m = &g * g.adjoint();
    let tr = m.trace();
    let mut m = m / tr;
    // symmetrize away roundoff
    m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(m).unwrap()
}

pub fn p_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}
