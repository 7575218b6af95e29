mod common;

use ampshield_core::channels::{cnot, hadamard_theta};
use ampshield_core::{kron, partial_trace, pure_to_density, Operator, PartialTrace, Role, StateVector};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn random_state(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> StateVector {
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let s = StateVector::new(amps, vec![Role::System; n]).unwrap();
    ampshield_core::renormalize(&s).unwrap().1
}

fn random_operator(rng: &mut rand_chacha::ChaCha8Rng, dim: usize) -> Operator {
    let entries: Vec<Complex64> = (0..dim * dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Operator::new(DMatrix::from_row_slice(dim, dim, &entries)).unwrap()
}

proptest! {
    #[test]
    fn unitaries_preserve_norm(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = common::rng(seed);
        let mut s = random_state(&mut rng, n);
        let mut qubits: Vec<usize> = (0..n).collect();
        for _ in 0..5 {
            qubits.shuffle(&mut rng);
            s = s.apply_unitary(&common::unitary_2x2(&mut rng), &qubits[..1]).unwrap();
            s = s.apply_unitary(&cnot(), &qubits[..2]).unwrap();
            s = s.apply_unitary(&hadamard_theta(rng.gen_range(-3.0..3.0)), &qubits[1..2]).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace(seed in any::<u64>(), n in 2usize..=6, keep_mask in 1u32..63) {
        let mut rng = common::rng(seed);
        let s = random_state(&mut rng, n);
        let keep: Vec<usize> = (0..n).filter(|i| keep_mask & (1 << i) != 0).collect();
        prop_assume!(!keep.is_empty());
        let rho = s.partial_trace(&keep).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.trace().im.abs() < 1e-12);
        // tracing twice agrees with tracing at once
        let full = pure_to_density(&s).unwrap();
        let via_density = partial_trace(&full, &keep).unwrap();
        prop_assert!(rho.max_abs_diff(&via_density) < 1e-12);
    }

    #[test]
    fn product_state_reduces_to_pure(seed in any::<u64>(), n_a in 1usize..=3, n_b in 1usize..=3) {
        let mut rng = common::rng(seed);
        let a = random_state(&mut rng, n_a);
        let b = random_state(&mut rng, n_b);
        let ab = a.tensor(&b);
        let keep: Vec<usize> = (0..n_a).collect();
        let rho = ab.partial_trace(&keep).unwrap();
        let eig = rho.eigenvalues();
        prop_assert!((eig[eig.len() - 1] - 1.0).abs() < 1e-10);
        prop_assert!(rho.max_abs_diff(&pure_to_density(&a).unwrap()) < 1e-12);
    }

    #[test]
    fn kron_is_associative(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let a = random_operator(&mut rng, 2);
        let b = random_operator(&mut rng, 4);
        let c = random_operator(&mut rng, 2);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        let diff = (left.matrix() - right.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-14);
    }

    #[test]
    fn general_operator_matches_embedded_kron(seed in any::<u64>()) {
        // applying U to qubit 1 of 3 equals applying I (x) U (x) I
        let mut rng = common::rng(seed);
        let s = random_state(&mut rng, 3);
        let u = random_operator(&mut rng, 2);
        let direct = s.apply(&u, &[1]).unwrap();
        let full = kron(&kron(&Operator::identity(1), &u), &Operator::identity(1));
        let embedded = s.apply(&full, &[0, 1, 2]).unwrap();
        for (x, y) in direct.amplitudes().iter().zip(embedded.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-14);
        }
    }
}
